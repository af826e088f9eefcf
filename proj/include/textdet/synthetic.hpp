#pragma once

#include <random>
#include <vector>

#include "textdet/geometry.hpp"
#include "textdet/region.hpp"

namespace textdet {

// Synthetic text-like ribbons: a centerline (circular arc or full-period
// sine) swept by a constant half width. The ground-truth pair count 2..7 is
// a deterministic function of the bend (sagitta or amplitude as a fraction
// of length), mirroring how curvier text needs more boundary points. Bend
// bins are separated by gaps so the count stays recoverable from the shape
// descriptor.
struct RibbonConfig {
  int dense_samples = 61;        // centerline resolution; 60 divides all pair splits
  int grid = 7;                  // descriptor is grid x grid occupancy
  int subsamples = 8;            // per-cell sampling is subsamples^2 points
  double min_length = 80.0;
  double max_length = 160.0;
  double min_width_frac = 0.10;  // ribbon width as a fraction of length
  double max_width_frac = 0.30;
  double angle_jitter = 0.0;     // uniform rotation in +-radians
  double scene = 1000.0;         // placement field for the centers
  bool arcs = true;
  bool sines = true;
};

struct SyntheticRibbon {
  std::vector<Point> centerline;  // dense samples, image coordinates
  std::vector<Point> top_pts;     // dense top boundary, same parameterization
  std::vector<Point> bottom_pts;
  double half_width = 0.0;
  int family = 0;                 // 0 = arc, 1 = sine
  double bend = 0.0;              // sagitta/amplitude over length
  AdaptiveTextRegion gt;          // pairs at uniform parameter positions
  Polygon outline;                // dense ring (tops then reversed bottoms)
  ProposalBox proposal;           // tight bounding box of the outline
  std::vector<double> feature;    // occupancy descriptor, row-major from top
  std::vector<double> targets;    // normalized gt coordinates, 4 per pair
};

// Bend-to-pair-count rule shared by the generator and any consumer.
int bend_pair_count(double bend);

// Uniform bend inside the bin that maps back to exactly k pairs.
double sample_bend_for_pairs(int k, std::mt19937_64& rng);

// Occupancy fraction of the polygon over each cell of a grid spanning the
// box, sampled at subsamples^2 cell-interior points. Row-major, row 0 at the
// top (minimum y).
std::vector<double> occupancy_descriptor(const Polygon& outline, const ProposalBox& box,
                                         int grid = 7, int subsamples = 4);

SyntheticRibbon make_ribbon(std::mt19937_64& rng, const RibbonConfig& config = {});
std::vector<SyntheticRibbon> make_ribbons(int count, std::mt19937_64& rng,
                                          const RibbonConfig& config = {});

// Normalized targets for a fixed pair budget: the same boundaries resampled
// at `pairs` uniform parameter positions (endpoints included).
std::vector<double> fixed_pair_targets(const SyntheticRibbon& ribbon, int pairs);

}  // namespace textdet
