#include "textdet/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "textdet/errors.hpp"
#include "textdet/rng.hpp"

namespace textdet {

namespace {

// Bend bins per pair count, with gaps between bins so the classes stay
// separable. Sine centerlines are restricted to bends <= 0.10 (bins 2 and 3):
// beyond that the inner boundary of a full-period sine can self-intersect at
// the widest allowed ribbon.
struct BendBin {
  int pairs;
  double lo, hi;
};
constexpr BendBin kBendBins[] = {
    {2, 0.000, 0.020}, {3, 0.055, 0.100}, {4, 0.135, 0.180},
    {5, 0.215, 0.265}, {6, 0.300, 0.360}, {7, 0.400, 0.480},
};
constexpr int kBinCount = 6;
constexpr double kMaxSineBend = 0.10;

struct Frame {
  double cx, cy, cos_a, sin_a;

  // Rotate the local math-frame point (y up), then flip into image
  // coordinates (y down), so the +y local side becomes the visual top.
  Point to_image(const Point& p) const {
    const double qx = p.x() * cos_a - p.y() * sin_a;
    const double qy = p.x() * sin_a + p.y() * cos_a;
    return {cx + qx, cy - qy};
  }
};

// Centerline point and its +y-side unit normal in the local frame, t in [0,1].
void centerline_at(int family, double length, double bend, double t, Point* point,
                   Point* normal) {
  if (family == 1) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double x = (t - 0.5) * length;
    const double a = bend * length;
    const double y = a * std::sin(two_pi * t);
    const double slope = a * (two_pi / length) * std::cos(two_pi * t);
    const double inv = 1.0 / std::sqrt(1.0 + slope * slope);
    *point = {x, y};
    *normal = {-slope * inv, inv};
    return;
  }
  const double s = bend * length;  // sagitta
  if (s < 1e-9 * length) {
    *point = {(t - 0.5) * length, 0.0};
    *normal = {0.0, 1.0};
    return;
  }
  const double c = 0.5 * length;          // half chord
  const double r = (c * c + s * s) / (2.0 * s);
  const Point center{0.0, s - r};
  const double theta_l = std::atan2(r - s, -c);
  const double theta_r = std::atan2(r - s, c);
  const double theta = theta_l + t * (theta_r - theta_l);
  const Point radial{std::cos(theta), std::sin(theta)};
  *point = center + r * radial;
  *normal = radial;
}

}  // namespace

int bend_pair_count(double bend) {
  // Gap values resolve to the nearest bin via midpoint thresholds.
  for (int b = 0; b + 1 < kBinCount; ++b) {
    const double cut = 0.5 * (kBendBins[b].hi + kBendBins[b + 1].lo);
    if (bend < cut) return kBendBins[b].pairs;
  }
  return kBendBins[kBinCount - 1].pairs;
}

double sample_bend_for_pairs(int k, std::mt19937_64& rng) {
  for (const BendBin& bin : kBendBins)
    if (bin.pairs == k) return uniform_real(rng, bin.lo, bin.hi);
  throw input_error("pair count must lie in 2..7");
}

std::vector<double> occupancy_descriptor(const Polygon& outline, const ProposalBox& box,
                                         int grid, int subsamples) {
  if (grid < 1 || subsamples < 1) throw input_error("descriptor grid must be positive");
  if (!(box.w_a > 0.0 && box.h_a > 0.0)) throw input_error("descriptor box must be positive");
  const double x0 = box.x_a - 0.5 * box.w_a;
  const double y0 = box.y_a - 0.5 * box.h_a;
  const double cell_w = box.w_a / grid;
  const double cell_h = box.h_a / grid;

  std::vector<double> feature(static_cast<std::size_t>(grid) * grid, 0.0);
  const double denom = static_cast<double>(subsamples) * subsamples;
  for (int row = 0; row < grid; ++row) {
    for (int col = 0; col < grid; ++col) {
      int inside = 0;
      for (int a = 0; a < subsamples; ++a) {
        for (int b = 0; b < subsamples; ++b) {
          const Point p{x0 + (col + (b + 0.5) / subsamples) * cell_w,
                        y0 + (row + (a + 0.5) / subsamples) * cell_h};
          if (point_in_polygon(outline, p)) ++inside;
        }
      }
      feature[static_cast<std::size_t>(row) * grid + col] = inside / denom;
    }
  }
  return feature;
}

SyntheticRibbon make_ribbon(std::mt19937_64& rng, const RibbonConfig& config) {
  if (config.dense_samples < 8) throw input_error("ribbon needs at least 8 dense samples");
  if (!config.arcs && !config.sines) throw input_error("ribbon config enables no family");

  SyntheticRibbon ribbon;
  // Fixed draw order keeps the stream reproducible for a given config.
  // Sine-only configs stay within the first two bins (bend <= 0.10).
  const int bins = config.arcs ? kBinCount : 2;
  const int k = 2 + static_cast<int>(uniform_index(rng, bins));
  const bool family_coin = uniform_index(rng, 2) == 1;
  ribbon.bend = sample_bend_for_pairs(k, rng);
  const double length = uniform_real(rng, config.min_length, config.max_length);
  const double width_frac = uniform_real(rng, config.min_width_frac, config.max_width_frac);
  const double margin = config.max_length;
  const double cx = uniform_real(rng, margin, config.scene - margin);
  const double cy = uniform_real(rng, margin, config.scene - margin);
  const double angle = uniform_real(rng, -1.0, 1.0) * config.angle_jitter;

  const bool sine_allowed = config.sines && ribbon.bend <= kMaxSineBend;
  ribbon.family = config.arcs ? ((sine_allowed && family_coin) ? 1 : 0) : 1;

  ribbon.half_width = 0.5 * width_frac * length;
  const Frame frame{cx, cy, std::cos(angle), std::sin(angle)};

  const int n = config.dense_samples;
  ribbon.centerline.reserve(n);
  ribbon.top_pts.reserve(n);
  ribbon.bottom_pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    Point p, normal;
    centerline_at(ribbon.family, length, ribbon.bend, t, &p, &normal);
    ribbon.centerline.push_back(frame.to_image(p));
    ribbon.top_pts.push_back(frame.to_image(p + ribbon.half_width * normal));
    ribbon.bottom_pts.push_back(frame.to_image(p - ribbon.half_width * normal));
  }

  std::vector<Point> ring = ribbon.top_pts;
  ring.insert(ring.end(), ribbon.bottom_pts.rbegin(), ribbon.bottom_pts.rend());
  ribbon.outline = make_polygon(ring);
  if (!is_simple(ribbon.outline)) throw numeric_error("generated ribbon outline self-intersects");

  double min_x = ribbon.outline[0].x(), max_x = min_x;
  double min_y = ribbon.outline[0].y(), max_y = min_y;
  for (int i = 1; i < ribbon.outline.size(); ++i) {
    min_x = std::min(min_x, ribbon.outline[i].x());
    max_x = std::max(max_x, ribbon.outline[i].x());
    min_y = std::min(min_y, ribbon.outline[i].y());
    max_y = std::max(max_y, ribbon.outline[i].y());
  }
  ribbon.proposal = {0.5 * (min_x + max_x), 0.5 * (min_y + max_y), max_x - min_x, max_y - min_y};

  for (int j = 0; j < k; ++j) {
    // dense_samples = 61 puts every split point exactly on a sample.
    const double pos = static_cast<double>(j) * (n - 1) / (k - 1);
    const int idx = static_cast<int>(std::lround(pos));
    ribbon.gt.pairs.push_back({ribbon.top_pts[idx], ribbon.bottom_pts[idx]});
  }
  validate_region(ribbon.gt);

  ribbon.feature = occupancy_descriptor(ribbon.outline, ribbon.proposal, config.grid,
                                        config.subsamples);
  ribbon.targets = normalize_targets(ribbon.gt, ribbon.proposal);
  return ribbon;
}

std::vector<SyntheticRibbon> make_ribbons(int count, std::mt19937_64& rng,
                                          const RibbonConfig& config) {
  if (count < 0) throw input_error("ribbon count must be non-negative");
  std::vector<SyntheticRibbon> ribbons;
  ribbons.reserve(count);
  for (int i = 0; i < count; ++i) ribbons.push_back(make_ribbon(rng, config));
  return ribbons;
}

std::vector<double> fixed_pair_targets(const SyntheticRibbon& ribbon, int pairs) {
  if (pairs < 2) throw input_error("fixed pair budget must be at least 2");
  const int n = static_cast<int>(ribbon.top_pts.size());
  AdaptiveTextRegion region;
  for (int j = 0; j < pairs; ++j) {
    const double pos = static_cast<double>(j) * (n - 1) / (pairs - 1);
    const int lo = static_cast<int>(std::floor(pos));
    const int hi = std::min(lo + 1, n - 1);
    const double frac = pos - lo;
    region.pairs.push_back(
        {ribbon.top_pts[lo] + frac * (ribbon.top_pts[hi] - ribbon.top_pts[lo]),
         ribbon.bottom_pts[lo] + frac * (ribbon.bottom_pts[hi] - ribbon.bottom_pts[lo])});
  }
  return normalize_targets(region, ribbon.proposal);
}

}  // namespace textdet
