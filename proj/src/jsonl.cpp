#include "textdet/jsonl.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "textdet/errors.hpp"
#include "textdet/geometry.hpp"

namespace textdet {

namespace {

std::string escape_json(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string fixed(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

input_error at_line(long line_number, const std::string& what) {
  return input_error("line " + std::to_string(line_number) + ": " + what);
}

}  // namespace

std::string record_to_json(const AnnotationRecord& record) {
  std::ostringstream out;
  out << "{\"image_id\": \"" << escape_json(record.image_id) << "\", \"regions\": [";
  for (std::size_t r = 0; r < record.regions.size(); ++r) {
    if (r) out << ", ";
    const Polygon ring = region_to_polygon(record.regions[r]);
    out << '[';
    for (int i = 0; i < ring.size(); ++i) {
      if (i) out << ", ";
      out << '[' << fixed(ring[i].x(), "%.3f") << ", " << fixed(ring[i].y(), "%.3f") << ']';
    }
    out << ']';
  }
  out << ']';
  if (!record.scores.empty()) {
    if (record.scores.size() != record.regions.size())
      throw input_error("record scores misaligned with regions");
    out << ", \"scores\": [";
    for (std::size_t i = 0; i < record.scores.size(); ++i) {
      if (i) out << ", ";
      out << fixed(record.scores[i], "%.6f");
    }
    out << ']';
  }
  if (!record.ignored.empty()) {
    if (record.ignored.size() != record.regions.size())
      throw input_error("record ignored flags misaligned with regions");
    out << ", \"ignored\": [";
    for (std::size_t i = 0; i < record.ignored.size(); ++i) {
      if (i) out << ", ";
      out << (record.ignored[i] ? "true" : "false");
    }
    out << ']';
  }
  out << '}';
  return out.str();
}

AnnotationRecord record_from_json(const std::string& line, long line_number) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw at_line(line_number, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("image_id") || !j["image_id"].is_string() ||
      !j.contains("regions") || !j["regions"].is_array())
    throw at_line(line_number, "record needs an image_id string and a regions array");

  AnnotationRecord record;
  record.image_id = j["image_id"].get<std::string>();
  for (std::size_t r = 0; r < j["regions"].size(); ++r) {
    const auto& ring_json = j["regions"][r];
    if (!ring_json.is_array())
      throw at_line(line_number, "region " + std::to_string(r) + " is not an array");
    std::vector<Point> ring;
    for (const auto& v : ring_json) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw at_line(line_number, "region " + std::to_string(r) + " has a malformed vertex");
      ring.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    try {
      AdaptiveTextRegion region = region_from_ring(ring);
      validate_region(region);
      record.regions.push_back(std::move(region));
    } catch (const input_error& e) {
      throw at_line(line_number, "region " + std::to_string(r) + ": " + e.what());
    }
  }
  if (j.contains("scores")) {
    if (!j["scores"].is_array() || j["scores"].size() != record.regions.size())
      throw at_line(line_number, "scores misaligned with regions");
    for (const auto& s : j["scores"]) {
      if (!s.is_number()) throw at_line(line_number, "scores must be numbers");
      record.scores.push_back(s.get<double>());
    }
  }
  if (j.contains("ignored")) {
    if (!j["ignored"].is_array() || j["ignored"].size() != record.regions.size())
      throw at_line(line_number, "ignored flags misaligned with regions");
    for (const auto& b : j["ignored"]) {
      if (!b.is_boolean()) throw at_line(line_number, "ignored flags must be booleans");
      record.ignored.push_back(b.get<bool>());
    }
  }
  return record;
}

std::vector<AnnotationRecord> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open " + path);
  std::vector<AnnotationRecord> records;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    records.push_back(record_from_json(line, line_number));
  }
  return records;
}

void write_jsonl(const std::string& path, const std::vector<AnnotationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write " + path);
  for (const AnnotationRecord& record : records) out << record_to_json(record) << '\n';
}

std::vector<Detection> record_to_detections(const AnnotationRecord& record) {
  if (record.scores.size() != record.regions.size())
    throw input_error("record " + record.image_id + " lacks aligned scores");
  std::vector<Detection> dets;
  dets.reserve(record.regions.size());
  for (std::size_t i = 0; i < record.regions.size(); ++i)
    dets.push_back({record.regions[i], record.scores[i]});
  return dets;
}

AnnotationRecord detections_to_record(const std::string& image_id,
                                      const std::vector<Detection>& dets) {
  AnnotationRecord record;
  record.image_id = image_id;
  for (const Detection& d : dets) {
    record.regions.push_back(d.region);
    record.scores.push_back(d.score);
  }
  return record;
}

GroundTruthImage record_to_ground_truth(const AnnotationRecord& record) {
  return {record.regions, record.ignored};
}

SourceFormat parse_source_format(const std::string& name) {
  if (name == "ctw14") return SourceFormat::ctw14;
  if (name == "totaltext") return SourceFormat::totaltext;
  if (name == "quad") return SourceFormat::quad;
  throw input_error("unknown source format '" + name + "' (expected ctw14, totaltext, or quad)");
}

namespace {

std::vector<double> parse_csv_numbers(const std::string& line, long line_number) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    const std::string token = line.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
      if (used != token.size()) throw std::invalid_argument(token);
      values.push_back(v);
    } catch (const std::exception&) {
      throw at_line(line_number, "cannot parse number '" + token + "'");
    }
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return values;
}

std::vector<Point> to_points(const std::vector<double>& values) {
  std::vector<Point> points;
  points.reserve(values.size() / 2);
  for (std::size_t i = 0; i + 1 < values.size(); i += 2)
    points.emplace_back(values[i], values[i + 1]);
  return points;
}

}  // namespace

ConvertSummary convert_file(const std::string& in_path, const std::string& out_path,
                            const ConvertOptions& options) {
  std::ifstream in(in_path);
  if (!in) throw input_error("cannot open " + in_path);
  std::ofstream out(out_path);
  if (!out) throw input_error("cannot write " + out_path);

  ConvertSummary summary;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::vector<double> values = parse_csv_numbers(line, line_number);

    AdaptiveTextRegion region;
    std::vector<Point> raw;
    try {
      switch (options.from) {
        case SourceFormat::ctw14: {
          if (options.relative_boxes) {
            if (values.size() != 32)
              throw input_error("expected 32 values (bbox + 28 offsets)");
            const double xmin = values[0], ymin = values[1];
            for (std::size_t i = 4; i + 1 < values.size(); i += 2) {
              values[i] += xmin;
              values[i + 1] += ymin;
            }
            values.erase(values.begin(), values.begin() + 4);
          } else if (values.size() != 28) {
            throw input_error("expected 28 values (14 absolute points)");
          }
          raw = to_points(values);
          region = reduce_ctw1500(raw, options.ratio_threshold);
          break;
        }
        case SourceFormat::totaltext: {
          if (values.size() < 8 || values.size() % 2 != 0)
            throw input_error("expected an even count of at least 8 values");
          raw = to_points(values);
          region = pair_totaltext(raw);
          break;
        }
        case SourceFormat::quad: {
          if (values.size() != 8) throw input_error("expected 8 values (4 corners)");
          raw = to_points(values);
          region = quad_to_pairs(raw);
          break;
        }
      }
    } catch (const input_error& e) {
      throw at_line(line_number, e.what());
    }

    AnnotationRecord record;
    record.image_id = std::to_string(line_number);
    record.regions.push_back(region);
    out << record_to_json(record) << '\n';

    ++summary.records;
    summary.pair_counts.push_back(region.pair_count());
    summary.area_ratios.push_back(polygon_area(region_to_polygon(region)) /
                                  polygon_area(make_polygon(raw)));
  }
  return summary;
}

}  // namespace textdet
