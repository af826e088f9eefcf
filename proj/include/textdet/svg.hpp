#pragma once

#include <string>
#include <vector>

#include "textdet/region.hpp"

namespace textdet {

// Standalone SVG with ground truth in green and detections in orange: each
// region's ring polygon, a dot per boundary point, and a rung connecting the
// top point of every pair to its bottom partner. The canvas fits all regions
// with a margin; no regions at all still yields a valid empty canvas.
std::string svg_document(const std::vector<AdaptiveTextRegion>& gts,
                         const std::vector<AdaptiveTextRegion>& dets);

void write_svg(const std::string& path, const std::vector<AdaptiveTextRegion>& gts,
               const std::vector<AdaptiveTextRegion>& dets);

}  // namespace textdet
