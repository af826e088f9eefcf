#pragma once

#include <string>
#include <vector>

#include "textdet/detection.hpp"
#include "textdet/region.hpp"

namespace textdet {

// One image worth of regions in the JSON-lines interchange format:
//   {"image_id": "...", "regions": [[[x,y],...],...],
//    "scores": [...]?, "ignored": [...]?}
// Regions are ring vertex lists (tops in order, bottoms reversed); vertex i
// pairs with vertex n-1-i. scores attaches to detections, ignored to ground
// truth; both are optional and, when present, align with regions.
struct AnnotationRecord {
  std::string image_id;
  std::vector<AdaptiveTextRegion> regions;
  std::vector<double> scores;
  std::vector<bool> ignored;
};

// Serializes with coordinates rendered at exactly 3 fractional digits, so
// write/read round-trips are exact in that encoding.
std::string record_to_json(const AnnotationRecord& record);
AnnotationRecord record_from_json(const std::string& line, long line_number);

std::vector<AnnotationRecord> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<AnnotationRecord>& records);

// Detections of one record; throws if scores are missing or misaligned.
std::vector<Detection> record_to_detections(const AnnotationRecord& record);
AnnotationRecord detections_to_record(const std::string& image_id,
                                      const std::vector<Detection>& dets);
GroundTruthImage record_to_ground_truth(const AnnotationRecord& record);

// Raw annotation ingestion. Each non-empty input line is one region; the
// 1-based line number becomes its image_id.
//   ctw14     comma-separated integers: 28 absolute coordinates
//             x1,y1,...,x14,y14 (7 top points left to right, then 7 bottom
//             points right to left). With relative_boxes, 32 integers:
//             xmin,ymin,xmax,ymax then 28 offsets added to (xmin, ymin).
//   totaltext comma-separated ring coordinates, at least 4 vertices.
//   quad      8 comma-separated coordinates, one quadrilateral.
enum class SourceFormat { ctw14, totaltext, quad };

SourceFormat parse_source_format(const std::string& name);

struct ConvertOptions {
  SourceFormat from = SourceFormat::ctw14;
  bool relative_boxes = false;
  double ratio_threshold = 0.93;  // ctw14 reduction acceptance bound
};

struct ConvertSummary {
  long records = 0;
  std::vector<int> pair_counts;      // per record
  std::vector<double> area_ratios;   // output ring area / input ring area
};

ConvertSummary convert_file(const std::string& in_path, const std::string& out_path,
                            const ConvertOptions& options);

}  // namespace textdet
