#pragma once

#include <Eigen/Dense>
#include <vector>

namespace textdet {

using Point = Eigen::Vector2d;

// Ordered vertex ring in image coordinates (y grows downward). Construction
// through make_polygon drops duplicate consecutive vertices and rejects rings
// that fall below 3 distinct vertices or contain non-finite coordinates.
// Simplicity (non-self-intersection) is checked explicitly via is_simple,
// never as a construction side effect.
struct Polygon {
  std::vector<Point> vertices;

  int size() const { return static_cast<int>(vertices.size()); }
  const Point& operator[](int i) const { return vertices[static_cast<size_t>(i)]; }
};

// Builds a polygon from a vertex list. Consecutive vertices closer than
// 1e-9 are merged (including the closing last/first pair). Throws
// input_error on fewer than 3 surviving vertices or non-finite input.
Polygon make_polygon(std::vector<Point> points);

// Unsigned area by the shoelace formula. Orientation independent; collinear
// rings yield 0.
double polygon_area(const Polygon& poly);

// Signed shoelace area. Positive when the ring winds counterclockwise in the
// standard x-right/y-up frame.
double polygon_signed_area(const Polygon& poly);

// True when consecutive edge cross products never flip sign (tolerance 1e-9).
bool is_convex(const Polygon& poly);

// O(n^2) segment test: no two non-adjacent edges intersect and adjacent
// edges meet only at their shared vertex.
bool is_simple(const Polygon& poly);

// Intersection area of two convex polygons by Sutherland-Hodgman clipping.
double convex_intersection_area(const Polygon& subject, const Polygon& clip);

// Intersection over union. Convex pairs go through exact clipping;
// any non-convex operand falls back to raster_iou at resolution 512.
// Throws input_error on invalid polygons.
double polygon_iou(const Polygon& a, const Polygon& b);

// Grid-sampled IoU over the joint bounding box: resolution x resolution cell
// centers classified by even-odd point-in-polygon tests. Discretization error
// is O(perimeter / resolution) of the covered area. Requires resolution >= 64.
double raster_iou(const Polygon& a, const Polygon& b, int resolution);

// Interior angle at vertex i in degrees, in [0, 180]: the unsigned angle
// between the vectors from vertex i to its two neighbours. Reflex corners
// fold onto [0, 180]. Throws on duplicate neighbours (zero-length vector).
double interior_angle(const Polygon& poly, int i);

// Even-odd ray-crossing containment test.
bool point_in_polygon(const Polygon& poly, const Point& p);

}  // namespace textdet
