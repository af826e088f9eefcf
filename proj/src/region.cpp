#include "textdet/region.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "textdet/errors.hpp"

namespace textdet {

namespace {

bool finite_point(const Point& p) { return std::isfinite(p.x()) && std::isfinite(p.y()); }

std::vector<Point> ring_of(const std::vector<PointPair>& pairs) {
  std::vector<Point> ring;
  ring.reserve(pairs.size() * 2);
  for (const PointPair& pp : pairs) ring.push_back(pp.top);
  for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) ring.push_back(it->bottom);
  return ring;
}

// Unit direction of the dominant spread of the point cloud, sign-fixed to
// read left to right (top to bottom when nearly vertical).
Point principal_axis(const std::vector<Point>& points) {
  Point mean = Point::Zero();
  for (const Point& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const Point& p : points) {
    const Point d = p - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(cov);
  Point d = solver.eigenvectors().col(1);  // largest eigenvalue last
  if (d.x() < 0 || (std::abs(d.x()) < 1e-12 && d.y() < 0)) d = -d;
  return d;
}

// Cumulative normalized arc-length parameter per chain vertex.
std::vector<double> chain_params(const std::vector<Point>& chain) {
  std::vector<double> t(chain.size(), 0.0);
  double total = 0.0;
  for (size_t i = 1; i < chain.size(); ++i) {
    total += (chain[i] - chain[i - 1]).norm();
    t[i] = total;
  }
  if (total > 0) {
    for (double& v : t) v /= total;
  } else {
    for (size_t i = 0; i < t.size(); ++i)
      t[i] = t.size() > 1 ? static_cast<double>(i) / static_cast<double>(t.size() - 1) : 0.0;
  }
  return t;
}

Point chain_interp(const std::vector<Point>& chain, const std::vector<double>& t, double at) {
  at = std::clamp(at, 0.0, 1.0);
  for (size_t i = 1; i < chain.size(); ++i) {
    if (at <= t[i]) {
      const double span = t[i] - t[i - 1];
      const double u = span > 0 ? (at - t[i - 1]) / span : 0.0;
      return chain[i - 1] + u * (chain[i] - chain[i - 1]);
    }
  }
  return chain.back();
}

}  // namespace

Polygon region_to_polygon(const AdaptiveTextRegion& region) {
  if (region.pair_count() < 2) throw input_error("region needs at least 2 pairs");
  return make_polygon(ring_of(region.pairs));
}

AdaptiveTextRegion region_from_ring(const std::vector<Point>& ring) {
  const size_t n = ring.size();
  if (n < 4 || n % 2 != 0) throw input_error("pairwise ring needs an even count of at least 4 points");
  AdaptiveTextRegion region;
  region.pairs.reserve(n / 2);
  for (size_t i = 0; i < n / 2; ++i) region.pairs.push_back({ring[i], ring[n - 1 - i]});
  return region;
}

void validate_region(const AdaptiveTextRegion& region) {
  if (region.pair_count() < 2) throw input_error("region needs at least 2 pairs");
  for (const PointPair& pp : region.pairs)
    if (!finite_point(pp.top) || !finite_point(pp.bottom)) throw input_error("region has non-finite point");
  region_to_polygon(region);  // throws when the ring is degenerate
}

AdaptiveTextRegion reduce_ctw1500(const std::vector<Point>& points, double ratio_threshold) {
  if (points.size() != 14) throw input_error("ctw14 annotation needs exactly 14 points");
  const Polygon original = make_polygon(points);
  if (original.size() != 14) throw input_error("ctw14 annotation has duplicate consecutive points");
  const double original_area = polygon_area(original);
  if (original_area <= 0) throw input_error("ctw14 annotation is degenerate");

  // Pair i couples top vertex i with bottom vertex 13-i. Flatness score is
  // the smaller interior angle of the couple, taken on the full 14-gon.
  std::array<double, 7> score{};
  for (int i = 0; i < 7; ++i)
    score[static_cast<size_t>(i)] =
        std::min(interior_angle(original, i), interior_angle(original, 13 - i));

  std::vector<int> order = {1, 2, 3, 4, 5};  // end pairs 0 and 6 stay
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return score[static_cast<size_t>(a)] > score[static_cast<size_t>(b)];
  });

  std::array<bool, 7> kept;
  kept.fill(true);
  const auto current_ring = [&](int skip) {
    std::vector<PointPair> pairs;
    for (int i = 0; i < 7; ++i)
      if (kept[static_cast<size_t>(i)] && i != skip) pairs.push_back({points[static_cast<size_t>(i)], points[static_cast<size_t>(13 - i)]});
    return make_polygon(ring_of(pairs));
  };

  for (int candidate : order) {
    const double ratio = polygon_area(current_ring(candidate)) / original_area;
    if (ratio > ratio_threshold) {
      kept[static_cast<size_t>(candidate)] = false;
    } else {
      break;  // first refusal ends the scan
    }
  }

  AdaptiveTextRegion region;
  for (int i = 0; i < 7; ++i)
    if (kept[static_cast<size_t>(i)]) region.pairs.push_back({points[static_cast<size_t>(i)], points[static_cast<size_t>(13 - i)]});
  validate_region(region);
  return region;
}

AdaptiveTextRegion pair_totaltext(const std::vector<Point>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 4) throw input_error("totaltext annotation needs at least 4 points");
  const Polygon poly = make_polygon(points);
  if (poly.size() != n) throw input_error("totaltext annotation has duplicate consecutive points");

  const Point axis = principal_axis(points);
  const auto edge_proj = [&](int e) {
    const Point mid = 0.5 * (points[static_cast<size_t>(e)] + points[static_cast<size_t>((e + 1) % n)]);
    return mid.dot(axis);
  };
  const auto edge_len = [&](int e) {
    return (points[static_cast<size_t>((e + 1) % n)] - points[static_cast<size_t>(e)]).norm();
  };

  // Pick the start edge j and far edge i = j + gap among splits that leave
  // the two side chains balanced within one vertex.
  std::vector<int> gaps = {n / 2};
  if (n % 2 != 0) gaps.push_back(n / 2 + 1);
  int best_j = -1, best_i = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  double best_len = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    for (int gap : gaps) {
      const int i = (j + gap) % n;
      const double sc = edge_proj(i) - edge_proj(j);
      const double len = edge_len(i) + edge_len(j);
      if (sc > best_score + 1e-12 || (sc > best_score - 1e-12 && len < best_len - 1e-12)) {
        best_score = sc;
        best_len = len;
        best_j = j;
        best_i = i;
      }
    }
  }

  std::vector<Point> chain_a, chain_b;  // both will run start -> far end
  for (int t = (best_j + 1) % n; ; t = (t + 1) % n) {
    chain_a.push_back(points[static_cast<size_t>(t)]);
    if (t == best_i) break;
  }
  for (int t = (best_i + 1) % n; ; t = (t + 1) % n) {
    chain_b.push_back(points[static_cast<size_t>(t)]);
    if (t == best_j) break;
  }
  std::reverse(chain_b.begin(), chain_b.end());

  const auto centroid = [](const std::vector<Point>& c) {
    Point m = Point::Zero();
    for (const Point& p : c) m += p;
    return Point(m / static_cast<double>(c.size()));
  };
  // Top chain: smaller y; for near-vertical texts the left chain plays top.
  const bool vertical = std::abs(axis.y()) > std::abs(axis.x());
  const Point ca = centroid(chain_a), cb = centroid(chain_b);
  const double ka = vertical ? ca.x() : ca.y();
  const double kb = vertical ? cb.x() : cb.y();
  std::vector<Point>& top = ka <= kb ? chain_a : chain_b;
  std::vector<Point>& bottom = ka <= kb ? chain_b : chain_a;

  AdaptiveTextRegion region;
  if (top.size() == bottom.size()) {
    for (size_t q = 0; q < top.size(); ++q) region.pairs.push_back({top[q], bottom[q]});
  } else {
    const bool top_longer = top.size() > bottom.size();
    const std::vector<Point>& longer = top_longer ? top : bottom;
    const std::vector<Point>& shorter = top_longer ? bottom : top;
    const std::vector<double> tl = chain_params(longer);
    const std::vector<double> ts = chain_params(shorter);

    // Interior vertex of the longer chain left without a partner: the one
    // whose exclusion aligns the remaining arc-length parameters best.
    const int a = static_cast<int>(longer.size());
    int skip = 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int m = 1; m + 1 < a; ++m) {
      double cost = 0.0;
      for (int q = 0; q < a; ++q) {
        if (q == m) continue;
        const int sq = q < m ? q : q - 1;
        cost += std::abs(tl[static_cast<size_t>(q)] - ts[static_cast<size_t>(sq)]);
      }
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        skip = m;
      }
    }

    for (int q = 0; q < a; ++q) {
      Point partner;
      if (q == skip) partner = chain_interp(shorter, ts, tl[static_cast<size_t>(q)]);
      else partner = shorter[static_cast<size_t>(q < skip ? q : q - 1)];
      if (top_longer) region.pairs.push_back({longer[static_cast<size_t>(q)], partner});
      else region.pairs.push_back({partner, longer[static_cast<size_t>(q)]});
    }
  }

  validate_region(region);
  return region;
}

AdaptiveTextRegion quad_to_pairs(const std::vector<Point>& quad) {
  if (quad.size() != 4) throw input_error("quad annotation needs exactly 4 points");
  const Polygon poly = make_polygon(quad);
  if (poly.size() != 4) throw input_error("quad annotation has duplicate points");
  if (polygon_area(poly) <= 1e-12) throw input_error("degenerate quad");

  const auto len = [&](int a, int b) { return (quad[static_cast<size_t>(b)] - quad[static_cast<size_t>(a)]).norm(); };
  // Reading direction runs along the longer opposite-edge pair.
  const bool chains_01_32 = len(0, 1) + len(2, 3) >= len(1, 2) + len(3, 0);
  std::vector<Point> chain_a = chains_01_32 ? std::vector<Point>{quad[0], quad[1]} : std::vector<Point>{quad[1], quad[2]};
  std::vector<Point> chain_b = chains_01_32 ? std::vector<Point>{quad[3], quad[2]} : std::vector<Point>{quad[0], quad[3]};

  const Point axis_dir = (chain_a[1] + chain_b[1]) - (chain_a[0] + chain_b[0]);
  const bool vertical = std::abs(axis_dir.y()) > std::abs(axis_dir.x());

  // First pair sits at the lower-coordinate end of the reading axis.
  const double forward = vertical ? axis_dir.y() : axis_dir.x();
  if (forward < 0) {
    std::swap(chain_a[0], chain_a[1]);
    std::swap(chain_b[0], chain_b[1]);
  }
  const double ka = vertical ? chain_a[0].x() + chain_a[1].x() : chain_a[0].y() + chain_a[1].y();
  const double kb = vertical ? chain_b[0].x() + chain_b[1].x() : chain_b[0].y() + chain_b[1].y();
  const std::vector<Point>& top = ka <= kb ? chain_a : chain_b;
  const std::vector<Point>& bottom = ka <= kb ? chain_b : chain_a;

  AdaptiveTextRegion region{{{top[0], bottom[0]}, {top[1], bottom[1]}}};
  validate_region(region);
  return region;
}

std::vector<double> normalize_targets(const AdaptiveTextRegion& region, const ProposalBox& proposal) {
  if (region.pair_count() < 2) throw input_error("region needs at least 2 pairs");
  if (!(proposal.w_a > 0) || !(proposal.h_a > 0)) throw input_error("proposal needs positive size");
  for (const PointPair& pp : region.pairs)
    if (!finite_point(pp.top) || !finite_point(pp.bottom)) throw input_error("region has non-finite point");

  std::vector<double> out;
  out.reserve(static_cast<size_t>(region.pair_count()) * 4);
  for (const PointPair& pp : region.pairs) {
    out.push_back((pp.top.x() - proposal.x_a) / proposal.w_a);
    out.push_back((pp.top.y() - proposal.y_a) / proposal.h_a);
    out.push_back((pp.bottom.x() - proposal.x_a) / proposal.w_a);
    out.push_back((pp.bottom.y() - proposal.y_a) / proposal.h_a);
  }
  return out;
}

AdaptiveTextRegion denormalize_targets(const std::vector<double>& coords, const ProposalBox& proposal) {
  if (coords.size() < 8 || coords.size() % 4 != 0)
    throw input_error("coordinate list must hold at least two pairs of four values");
  if (!(proposal.w_a > 0) || !(proposal.h_a > 0)) throw input_error("proposal needs positive size");

  AdaptiveTextRegion region;
  for (size_t i = 0; i < coords.size(); i += 4) {
    PointPair pp;
    pp.top = Point(proposal.x_a + coords[i] * proposal.w_a, proposal.y_a + coords[i + 1] * proposal.h_a);
    pp.bottom = Point(proposal.x_a + coords[i + 2] * proposal.w_a, proposal.y_a + coords[i + 3] * proposal.h_a);
    region.pairs.push_back(pp);
  }
  return region;
}

}  // namespace textdet
