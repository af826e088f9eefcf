#include "textdet/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "textdet/errors.hpp"
#include "textdet/geometry.hpp"

namespace textdet {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void draw_regions(std::ostringstream& out, const std::vector<AdaptiveTextRegion>& regions,
                  const char* color) {
  for (const AdaptiveTextRegion& region : regions) {
    validate_region(region);
    const Polygon ring = region_to_polygon(region);
    out << "  <polygon fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (int i = 0; i < ring.size(); ++i) {
      if (i) out << ' ';
      out << num(ring[i].x()) << ',' << num(ring[i].y());
    }
    out << "\"/>\n";
    for (const PointPair& pair : region.pairs) {
      out << "  <line stroke=\"" << color << "\" stroke-width=\"0.75\" x1=\""
          << num(pair.top.x()) << "\" y1=\"" << num(pair.top.y()) << "\" x2=\""
          << num(pair.bottom.x()) << "\" y2=\"" << num(pair.bottom.y()) << "\"/>\n";
      for (const Point& p : {pair.top, pair.bottom})
        out << "  <circle fill=\"" << color << "\" r=\"2.5\" cx=\"" << num(p.x()) << "\" cy=\""
            << num(p.y()) << "\"/>\n";
    }
  }
}

}  // namespace

std::string svg_document(const std::vector<AdaptiveTextRegion>& gts,
                         const std::vector<AdaptiveTextRegion>& dets) {
  double min_x = 0.0, min_y = 0.0, max_x = 100.0, max_y = 100.0;
  bool first = true;
  for (const auto* list : {&gts, &dets}) {
    for (const AdaptiveTextRegion& region : *list) {
      for (const PointPair& pair : region.pairs) {
        for (const Point& p : {pair.top, pair.bottom}) {
          if (first) {
            min_x = max_x = p.x();
            min_y = max_y = p.y();
            first = false;
          } else {
            min_x = std::min(min_x, p.x());
            max_x = std::max(max_x, p.x());
            min_y = std::min(min_y, p.y());
            max_y = std::max(max_y, p.y());
          }
        }
      }
    }
  }
  const double margin = 10.0;
  min_x -= margin;
  min_y -= margin;
  max_x += margin;
  max_y += margin;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(min_x) << ' '
      << num(min_y) << ' ' << num(max_x - min_x) << ' ' << num(max_y - min_y) << "\">\n";
  draw_regions(out, gts, "#2b8a3e");
  draw_regions(out, dets, "#d9480f");
  out << "</svg>\n";
  return out.str();
}

void write_svg(const std::string& path, const std::vector<AdaptiveTextRegion>& gts,
               const std::vector<AdaptiveTextRegion>& dets) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write " + path);
  out << svg_document(gts, dets);
}

}  // namespace textdet
