#pragma once

#include <vector>

#include "textdet/geometry.hpp"

namespace textdet {

// One (top, bottom) boundary point couple at the same position along the
// text's reading direction.
struct PointPair {
  Point top;
  Point bottom;
};

// Variable-length ordered sequence of pairwise boundary points. The first
// pair is one end of the text, the last pair the other end; inside a pair
// the top point comes first. The ring formed by the top points in order
// followed by the bottom points in reverse must be a valid polygon.
struct AdaptiveTextRegion {
  std::vector<PointPair> pairs;

  int pair_count() const { return static_cast<int>(pairs.size()); }
};

// Candidate text box: center plus size, both in pixels.
struct ProposalBox {
  double x_a = 0.0;
  double y_a = 0.0;
  double w_a = 0.0;
  double h_a = 0.0;
};

// Ring polygon of a region: tops left to right, then bottoms right to left.
Polygon region_to_polygon(const AdaptiveTextRegion& region);

// Inverse of region_to_polygon for an even-length ring: vertex i pairs with
// vertex n-1-i. Throws on odd or short rings.
AdaptiveTextRegion region_from_ring(const std::vector<Point>& ring);

// Checks pair count >= 2 and that the ring is a valid polygon; throws
// input_error otherwise.
void validate_region(const AdaptiveTextRegion& region);

// Reduces a fixed 14-point annotation (7 points along the top boundary, then
// 7 along the bottom in reverse) to an adaptive number of pairs. Per-point
// flatness is the interior angle of the 14-gon; a pair scores the smaller of
// its two angles. Pairs are visited in descending score and removed while the
// area of the remaining ring stays larger than ratio_threshold times the
// original area; the first refusal stops the scan. End pairs are never
// candidates, so the result keeps 2..7 pairs.
AdaptiveTextRegion reduce_ctw1500(const std::vector<Point>& points, double ratio_threshold = 0.93);

// Groups a free-form polygon annotation into boundary pairs. Even vertex
// counts split into two equal chains matched index by index. Odd counts leave
// one chain a vertex longer; the surplus vertex is paired with the opposite
// chain interpolated at the same normalized arc length, so the output has at
// most one synthesized point. End edges are selected by principal-axis
// projection among the balanced splits.
AdaptiveTextRegion pair_totaltext(const std::vector<Point>& points);

// Two pairs from a quadrilateral: ends lie on the shorter opposite edge pair,
// i.e. across the longer axis of the quad.
AdaptiveTextRegion quad_to_pairs(const std::vector<Point>& quad);

// Scale-invariant regression targets: each coordinate is offset from the
// proposal center divided by the proposal size. Flat layout per pair:
// (top.x, top.y, bottom.x, bottom.y).
std::vector<double> normalize_targets(const AdaptiveTextRegion& region, const ProposalBox& proposal);

// Exact inverse of normalize_targets. Needs an even count of at least 8
// coordinates (two pairs).
AdaptiveTextRegion denormalize_targets(const std::vector<double>& coords, const ProposalBox& proposal);

}  // namespace textdet
