#include "textdet/detection.hpp"

#include <algorithm>
#include <numeric>

#include "textdet/errors.hpp"
#include "textdet/geometry.hpp"

namespace textdet {

namespace {

// Indices sorted by descending score, ties keeping input order.
std::vector<int> score_order(const std::vector<Detection>& dets) {
  std::vector<int> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return dets[a].score > dets[b].score; });
  return order;
}

std::vector<Polygon> render_all(const std::vector<Detection>& dets) {
  std::vector<Polygon> polys;
  polys.reserve(dets.size());
  for (const Detection& d : dets) {
    validate_region(d.region);
    if (!(d.score >= 0.0 && d.score <= 1.0))
      throw input_error("detection score must lie in [0, 1]");
    polys.push_back(region_to_polygon(d.region));
  }
  return polys;
}

double hmean_of(double recall, double precision) {
  const double sum = recall + precision;
  return sum > 0.0 ? 2.0 * recall * precision / sum : 0.0;
}

}  // namespace

std::vector<Detection> polygon_nms(const std::vector<Detection>& dets, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0))
    throw input_error("nms threshold must lie in (0, 1)");
  const std::vector<Polygon> polys = render_all(dets);
  const std::vector<int> order = score_order(dets);

  std::vector<Detection> kept;
  std::vector<bool> suppressed(dets.size(), false);
  for (std::size_t a = 0; a < order.size(); ++a) {
    const int i = order[a];
    if (suppressed[i]) continue;
    kept.push_back(dets[i]);
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const int j = order[b];
      if (!suppressed[j] && polygon_iou(polys[i], polys[j]) > iou_threshold)
        suppressed[j] = true;
    }
  }
  return kept;
}

MatchResult match_detections(const std::vector<Detection>& dets,
                             const std::vector<AdaptiveTextRegion>& gts, double iou_threshold) {
  const std::vector<Polygon> det_polys = render_all(dets);
  std::vector<Polygon> gt_polys;
  gt_polys.reserve(gts.size());
  for (const AdaptiveTextRegion& gt : gts) {
    validate_region(gt);
    gt_polys.push_back(region_to_polygon(gt));
  }

  MatchResult result;
  std::vector<bool> det_matched(dets.size(), false);
  std::vector<bool> gt_claimed(gts.size(), false);
  for (int i : score_order(dets)) {
    int best_gt = -1;
    double best_iou = iou_threshold;  // strict: must exceed the threshold
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (gt_claimed[j]) continue;
      const double iou = polygon_iou(det_polys[i], gt_polys[j]);
      if (iou > best_iou) {
        best_iou = iou;
        best_gt = static_cast<int>(j);
      }
    }
    if (best_gt >= 0) {
      gt_claimed[best_gt] = true;
      det_matched[i] = true;
      result.pairs.emplace_back(i, best_gt);
    }
  }
  for (std::size_t i = 0; i < dets.size(); ++i)
    if (!det_matched[i]) result.unmatched_dets.push_back(static_cast<int>(i));
  for (std::size_t j = 0; j < gts.size(); ++j)
    if (!gt_claimed[j]) result.unmatched_gts.push_back(static_cast<int>(j));
  return result;
}

EvalReport evaluate(const std::vector<std::vector<Detection>>& dets,
                    const std::vector<GroundTruthImage>& gts, double iou_threshold, bool macro) {
  if (dets.size() != gts.size())
    throw input_error("evaluate: detection and ground-truth image lists are misaligned");

  EvalReport report;
  double recall_sum = 0.0, precision_sum = 0.0;
  for (std::size_t img = 0; img < dets.size(); ++img) {
    const GroundTruthImage& gt = gts[img];
    if (!gt.ignored.empty() && gt.ignored.size() != gt.regions.size())
      throw input_error("evaluate: ignored flags misaligned with regions");

    std::vector<AdaptiveTextRegion> care, ignored;
    std::vector<int> care_index;  // back to original gt indices
    for (std::size_t j = 0; j < gt.regions.size(); ++j) {
      if (!gt.ignored.empty() && gt.ignored[j])
        ignored.push_back(gt.regions[j]);
      else {
        care_index.push_back(static_cast<int>(j));
        care.push_back(gt.regions[j]);
      }
    }

    const MatchResult matched = match_detections(dets[img], care, iou_threshold);

    // Unmatched detections overlapping an ignored region don't count as
    // false positives; they leave the precision denominator entirely.
    std::vector<Polygon> ignored_polys;
    for (const AdaptiveTextRegion& r : ignored) {
      validate_region(r);
      ignored_polys.push_back(region_to_polygon(r));
    }
    ImageEval image;
    for (const auto& [det_i, care_j] : matched.pairs)
      image.matches.emplace_back(det_i, care_index[care_j]);
    for (int det_i : matched.unmatched_dets) {
      bool discard = false;
      const Polygon det_poly = region_to_polygon(dets[img][det_i].region);
      for (const Polygon& ip : ignored_polys) {
        if (polygon_iou(det_poly, ip) > iou_threshold) {
          discard = true;
          break;
        }
      }
      if (discard)
        ++image.discarded_dets;
      else
        ++image.unmatched_dets;
    }
    image.unmatched_gts = static_cast<int>(matched.unmatched_gts.size());

    const long img_gts = static_cast<long>(care.size());
    const long img_dets = static_cast<long>(image.matches.size()) + image.unmatched_dets;
    const long img_matched = static_cast<long>(image.matches.size());
    report.total_gts += img_gts;
    report.total_dets += img_dets;
    report.total_matched += img_matched;
    recall_sum += img_gts > 0 ? static_cast<double>(img_matched) / img_gts : 0.0;
    precision_sum += img_dets > 0 ? static_cast<double>(img_matched) / img_dets : 0.0;
    report.per_image.push_back(std::move(image));
  }

  if (macro) {
    const double n = static_cast<double>(dets.size());
    report.recall = n > 0 ? recall_sum / n : 0.0;
    report.precision = n > 0 ? precision_sum / n : 0.0;
  } else {
    report.recall =
        report.total_gts > 0 ? static_cast<double>(report.total_matched) / report.total_gts : 0.0;
    report.precision =
        report.total_dets > 0 ? static_cast<double>(report.total_matched) / report.total_dets
                              : 0.0;
  }
  report.hmean = hmean_of(report.recall, report.precision);
  return report;
}

}  // namespace textdet
