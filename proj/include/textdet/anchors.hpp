#pragma once

#include <vector>

namespace textdet {

// One proposal-network anchor in pixel coordinates.
struct Anchor {
  double x_c = 0.0;
  double y_c = 0.0;
  double width = 0.0;
  double height = 0.0;
};

// Dense anchor grid over an fmap_h x fmap_w feature map. Each cell centers
// |sizes| * |ratios| anchors at ((x + 0.5) * stride, (y + 0.5) * stride);
// an anchor of (size, ratio) has width size / sqrt(ratio) and height
// size * sqrt(ratio), so its area is size^2 and height/width is ratio.
// Emission order: y, then x, then size, then ratio.
std::vector<Anchor> anchor_grid(const std::vector<double>& sizes,
                                const std::vector<double>& ratios, int stride, int fmap_w,
                                int fmap_h);

}  // namespace textdet
