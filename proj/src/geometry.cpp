#include "textdet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "textdet/errors.hpp"

namespace textdet {

namespace {

constexpr double kDedupEps = 1e-9;
constexpr double kCrossEps = 1e-9;

double cross2(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

bool finite_point(const Point& p) { return std::isfinite(p.x()) && std::isfinite(p.y()); }

void validate(const Polygon& poly) {
  if (poly.size() < 3) throw input_error("polygon has fewer than 3 vertices");
  for (const Point& p : poly.vertices)
    if (!finite_point(p)) throw input_error("polygon has non-finite vertex");
}

// Proper or improper intersection of closed segments [a,b] and [c,d].
bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
  const auto orient = [](const Point& p, const Point& q, const Point& r) {
    const double v = cross2(q - p, r - p);
    if (v > kCrossEps) return 1;
    if (v < -kCrossEps) return -1;
    return 0;
  };
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;

  const auto on_segment = [](const Point& p, const Point& q, const Point& r) {
    return std::min(p.x(), r.x()) - kDedupEps <= q.x() && q.x() <= std::max(p.x(), r.x()) + kDedupEps &&
           std::min(p.y(), r.y()) - kDedupEps <= q.y() && q.y() <= std::max(p.y(), r.y()) + kDedupEps;
  };
  if (o1 == 0 && on_segment(a, c, b)) return true;
  if (o2 == 0 && on_segment(a, d, b)) return true;
  if (o3 == 0 && on_segment(c, a, d)) return true;
  if (o4 == 0 && on_segment(c, b, d)) return true;
  return false;
}

}  // namespace

Polygon make_polygon(std::vector<Point> points) {
  for (const Point& p : points)
    if (!finite_point(p)) throw input_error("polygon has non-finite vertex");

  std::vector<Point> out;
  out.reserve(points.size());
  for (const Point& p : points) {
    if (!out.empty() && (p - out.back()).norm() < kDedupEps) continue;
    out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() < kDedupEps) out.pop_back();
  if (out.size() < 3) throw input_error("polygon reduced below 3 vertices after dedup");
  return Polygon{std::move(out)};
}

double polygon_signed_area(const Polygon& poly) {
  validate(poly);
  const int n = poly.size();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    acc += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * acc;
}

double polygon_area(const Polygon& poly) { return std::abs(polygon_signed_area(poly)); }

bool is_convex(const Polygon& poly) {
  validate(poly);
  const int n = poly.size();
  int sign = 0;
  for (int i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    const Point& c = poly[(i + 2) % n];
    const double z = cross2(b - a, c - b);
    if (std::abs(z) <= kCrossEps) continue;
    const int s = z > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return true;
}

bool is_simple(const Polygon& poly) {
  validate(poly);
  const int n = poly.size();
  for (int i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    for (int j = i + 1; j < n; ++j) {
      // Skip edges sharing a vertex; their touching point is legitimate.
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      const Point& c = poly[j];
      const Point& d = poly[(j + 1) % n];
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

double convex_intersection_area(const Polygon& subject, const Polygon& clip) {
  validate(subject);
  validate(clip);

  std::vector<Point> out = subject.vertices;
  std::vector<Point> clip_ring = clip.vertices;
  if (polygon_signed_area(clip) < 0) std::reverse(clip_ring.begin(), clip_ring.end());

  const int m = static_cast<int>(clip_ring.size());
  for (int e = 0; e < m && out.size() >= 2; ++e) {
    const Point& ca = clip_ring[static_cast<size_t>(e)];
    const Point& cb = clip_ring[static_cast<size_t>((e + 1) % m)];
    const Point dir = cb - ca;

    std::vector<Point> in;
    in.swap(out);
    const int k = static_cast<int>(in.size());
    for (int v = 0; v < k; ++v) {
      const Point& s = in[static_cast<size_t>(v)];
      const Point& t = in[static_cast<size_t>((v + 1) % k)];
      const double ds = cross2(dir, s - ca);
      const double dt = cross2(dir, t - ca);
      const bool s_in = ds >= -kCrossEps;
      const bool t_in = dt >= -kCrossEps;
      if (s_in) out.push_back(s);
      if (s_in != t_in) {
        const double denom = ds - dt;
        if (std::abs(denom) > 0) out.push_back(s + (ds / denom) * (t - s));
      }
    }
  }
  if (out.size() < 3) return 0.0;

  double acc = 0.0;
  const int k = static_cast<int>(out.size());
  for (int i = 0; i < k; ++i) {
    const Point& p = out[static_cast<size_t>(i)];
    const Point& q = out[static_cast<size_t>((i + 1) % k)];
    acc += p.x() * q.y() - q.x() * p.y();
  }
  return std::abs(0.5 * acc);
}

double polygon_iou(const Polygon& a, const Polygon& b) {
  validate(a);
  validate(b);
  const double area_a = polygon_area(a);
  const double area_b = polygon_area(b);
  if (area_a <= 0.0 || area_b <= 0.0) return 0.0;

  if (is_convex(a) && is_convex(b)) {
    const double inter = convex_intersection_area(a, b);
    const double uni = area_a + area_b - inter;
    if (uni <= 0.0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
  }
  return raster_iou(a, b, 512);
}

double raster_iou(const Polygon& a, const Polygon& b, int resolution) {
  validate(a);
  validate(b);
  if (resolution < 64) throw input_error("raster_iou resolution must be >= 64");

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = xmax;
  for (const Polygon* poly : {&a, &b}) {
    for (const Point& p : poly->vertices) {
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
  }
  const double dx = (xmax - xmin) / resolution;
  const double dy = (ymax - ymin) / resolution;
  if (dx <= 0.0 || dy <= 0.0) return 0.0;

  long in_a = 0, in_b = 0, in_both = 0;
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = ymin + (iy + 0.5) * dy;
    for (int ix = 0; ix < resolution; ++ix) {
      const Point p(xmin + (ix + 0.5) * dx, y);
      const bool pa = point_in_polygon(a, p);
      const bool pb = point_in_polygon(b, p);
      in_a += pa;
      in_b += pb;
      in_both += pa && pb;
    }
  }
  const long uni = in_a + in_b - in_both;
  if (uni == 0) return 0.0;
  return static_cast<double>(in_both) / static_cast<double>(uni);
}

double interior_angle(const Polygon& poly, int i) {
  validate(poly);
  const int n = poly.size();
  if (i < 0 || i >= n) throw input_error("interior_angle: vertex index out of range");
  const Point& prev = poly[(i + n - 1) % n];
  const Point& cur = poly[i];
  const Point& next = poly[(i + 1) % n];
  const Point u = prev - cur;
  const Point v = next - cur;
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu < kDedupEps || nv < kDedupEps) throw input_error("interior_angle: duplicate neighbour vertex");
  const double c = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
  return std::acos(c) * 180.0 / M_PI;
}

bool point_in_polygon(const Polygon& poly, const Point& p) {
  const int n = poly.size();
  bool inside = false;
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace textdet
