#pragma once

#include <utility>
#include <vector>

#include "textdet/region.hpp"

namespace textdet {

// A scored region hypothesis; score is the text-class probability.
struct Detection {
  AdaptiveTextRegion region;
  double score = 0.0;
};

// Greedy non-maximum suppression on polygon IoU: repeatedly keep the
// highest-scored remaining detection and drop everything overlapping it with
// IoU strictly above the threshold. Ties in score break by input order.
// Output is sorted by descending score. Throws on invalid regions or a
// threshold outside (0, 1).
std::vector<Detection> polygon_nms(const std::vector<Detection>& dets,
                                   double iou_threshold = 0.3);

// One-to-one greedy matching: detections in descending score order each claim
// the unclaimed ground truth of highest IoU, provided IoU is strictly above
// the threshold ("larger than", so equality is a non-match).
struct MatchResult {
  std::vector<std::pair<int, int>> pairs;  // (det index, gt index)
  std::vector<int> unmatched_dets;
  std::vector<int> unmatched_gts;
};

MatchResult match_detections(const std::vector<Detection>& dets,
                             const std::vector<AdaptiveTextRegion>& gts,
                             double iou_threshold = 0.5);

// Ground truth for one image. ignored, when non-empty, must align with
// regions; ignored entries do not count toward recall, and detections whose
// best remaining overlap is with an ignored region are excluded from the
// precision denominator as well.
struct GroundTruthImage {
  std::vector<AdaptiveTextRegion> regions;
  std::vector<bool> ignored;
};

struct ImageEval {
  std::vector<std::pair<int, int>> matches;  // original det/gt indices
  int unmatched_dets = 0;                    // false positives
  int unmatched_gts = 0;                     // missed non-ignored regions
  int discarded_dets = 0;                    // removed via ignored regions
};

struct EvalReport {
  double recall = 0.0;
  double precision = 0.0;
  double hmean = 0.0;
  long total_gts = 0;     // non-ignored ground truths
  long total_dets = 0;    // detections after ignore filtering
  long total_matched = 0;
  std::vector<ImageEval> per_image;
};

// Dataset-level recall/precision/hmean at the given IoU threshold. Lists must
// be aligned per image. Micro-averaged by default (global counts); macro
// averages per-image recall and precision instead, with hmean recomputed from
// the averages. Empty denominators yield 0.
EvalReport evaluate(const std::vector<std::vector<Detection>>& dets,
                    const std::vector<GroundTruthImage>& gts, double iou_threshold = 0.5,
                    bool macro = false);

}  // namespace textdet
