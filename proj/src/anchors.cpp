#include "textdet/anchors.hpp"

#include <cmath>

#include "textdet/errors.hpp"

namespace textdet {

std::vector<Anchor> anchor_grid(const std::vector<double>& sizes,
                                const std::vector<double>& ratios, int stride, int fmap_w,
                                int fmap_h) {
  if (sizes.empty() || ratios.empty()) throw input_error("anchor_grid needs sizes and ratios");
  if (stride < 1) throw input_error("anchor_grid stride must be at least 1");
  if (fmap_w < 1 || fmap_h < 1) throw input_error("anchor_grid feature map must be non-empty");
  for (double s : sizes)
    if (!(s > 0)) throw input_error("anchor sizes must be positive");
  for (double r : ratios)
    if (!(r > 0)) throw input_error("anchor ratios must be positive");

  std::vector<Anchor> anchors;
  anchors.reserve(static_cast<std::size_t>(fmap_w) * fmap_h * sizes.size() * ratios.size());
  for (int y = 0; y < fmap_h; ++y) {
    for (int x = 0; x < fmap_w; ++x) {
      const double cx = (x + 0.5) * stride;
      const double cy = (y + 0.5) * stride;
      for (double size : sizes) {
        for (double ratio : ratios) {
          const double root = std::sqrt(ratio);
          anchors.push_back({cx, cy, size / root, size * root});
        }
      }
    }
  }
  return anchors;
}

}  // namespace textdet
