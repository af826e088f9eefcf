#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "textdet/config.hpp"
#include "textdet/decoder.hpp"
#include "textdet/detection.hpp"
#include "textdet/errors.hpp"
#include "textdet/jsonl.hpp"
#include "textdet/rng.hpp"
#include "textdet/svg.hpp"
#include "textdet/trainer.hpp"

namespace {

using namespace textdet;

// TEXTDET_LOG=info enables progress lines, =debug adds per-record detail.
int log_level() {
  const char* env = std::getenv("TEXTDET_LOG");
  if (!env) return 0;
  const std::string value(env);
  if (value == "debug") return 2;
  if (value == "info") return 1;
  return 0;
}

std::string prob(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

int run_convert(const std::string& from, const std::string& in_path,
                const std::string& out_path, bool relative, double ratio_threshold) {
  ConvertOptions options;
  options.from = parse_source_format(from);
  options.relative_boxes = relative;
  options.ratio_threshold = ratio_threshold;
  const ConvertSummary summary = convert_file(in_path, out_path, options);

  if (log_level() >= 2) {
    for (long i = 0; i < summary.records; ++i)
      std::cerr << "record " << (i + 1) << ": " << summary.pair_counts[i] << " pairs, area ratio "
                << prob(summary.area_ratios[i]) << "\n";
  }
  std::map<int, long> histogram;
  double ratio_sum = 0.0;
  for (int pairs : summary.pair_counts) ++histogram[pairs];
  for (double ratio : summary.area_ratios) ratio_sum += ratio;
  std::cout << "converted " << summary.records << " records\n";
  for (const auto& [pairs, count] : histogram)
    std::cout << "  " << pairs << " pairs: " << count << "\n";
  if (summary.records > 0)
    std::cout << "  mean area ratio: " << prob(ratio_sum / summary.records) << "\n";
  return 0;
}

int run_nms(const std::string& in_path, const std::string& out_path, double iou) {
  const std::vector<AnnotationRecord> records = read_jsonl(in_path);
  std::vector<AnnotationRecord> kept_records;
  long total = 0, kept = 0;
  for (const AnnotationRecord& record : records) {
    const std::vector<Detection> dets = record_to_detections(record);
    const std::vector<Detection> survivors = polygon_nms(dets, iou);
    total += static_cast<long>(dets.size());
    kept += static_cast<long>(survivors.size());
    kept_records.push_back(detections_to_record(record.image_id, survivors));
  }
  write_jsonl(out_path, kept_records);
  std::cout << "kept " << kept << " of " << total << " detections\n";
  return 0;
}

int run_eval(const std::string& dets_path, const std::string& gts_path, double iou, bool macro) {
  const std::vector<AnnotationRecord> det_records = read_jsonl(dets_path);
  const std::vector<AnnotationRecord> gt_records = read_jsonl(gts_path);

  std::map<std::string, const AnnotationRecord*> dets_by_id;
  for (const AnnotationRecord& record : det_records) {
    if (!dets_by_id.emplace(record.image_id, &record).second)
      throw input_error("duplicate detection image_id '" + record.image_id + "'");
  }
  std::map<std::string, bool> gt_ids;
  for (const AnnotationRecord& record : gt_records) {
    if (!gt_ids.emplace(record.image_id, true).second)
      throw input_error("duplicate ground-truth image_id '" + record.image_id + "'");
  }
  std::string unknown;
  for (const AnnotationRecord& record : det_records)
    if (!gt_ids.count(record.image_id)) unknown += " '" + record.image_id + "'";
  if (!unknown.empty())
    throw input_error("detection image ids missing from ground truth:" + unknown);

  std::vector<std::vector<Detection>> dets;
  std::vector<GroundTruthImage> gts;
  for (const AnnotationRecord& record : gt_records) {
    gts.push_back(record_to_ground_truth(record));
    const auto it = dets_by_id.find(record.image_id);
    dets.push_back(it == dets_by_id.end() ? std::vector<Detection>{}
                                          : record_to_detections(*it->second));
  }

  const EvalReport report = evaluate(dets, gts, iou, macro);
  std::cout << "{\"recall\": " << prob(report.recall) << ", \"precision\": "
            << prob(report.precision) << ", \"hmean\": " << prob(report.hmean)
            << ", \"images\": " << gts.size() << ", \"gts\": " << report.total_gts
            << ", \"dets\": " << report.total_dets << ", \"matched\": " << report.total_matched
            << "}\n";
  return 0;
}

int run_toy_train(const std::string& config_path, long seed_override) {
  TrainConfig config = config_path.empty() ? TrainConfig{}
                                           : train_config_from(Config::from_file(config_path));
  if (seed_override >= 0) config.seed = static_cast<unsigned long long>(seed_override);

  std::ostream* log = log_level() >= 1 ? &std::cerr : nullptr;
  const TrainResult result = train_toy(config, log);
  std::cout << "{\"train_loss\": " << prob(result.history.back().total)
            << ", \"point_error\": " << prob(result.held_out.point_error)
            << ", \"stop_accuracy\": " << prob(result.held_out.stop_accuracy)
            << ", \"teacher_forced_error\": " << prob(result.held_out.teacher_forced_error)
            << ", \"train_count\": " << result.train_count
            << ", \"eval_count\": " << result.eval_count << "}\n";
  return 0;
}

int run_grad_check(long seed, double epsilon, int hidden_dim, int steps, int input_dim) {
  std::mt19937_64 rng(static_cast<unsigned long long>(seed));
  const DecoderParams<double> params = init_decoder<double>(input_dim, hidden_dim, rng);
  VectorX<double> feature(input_dim);
  for (int i = 0; i < input_dim; ++i) feature(i) = uniform_real(rng, 0.0, 1.0);
  DecoderTargets<double> targets;
  for (int j = 0; j < steps; ++j) {
    Vector4<double> pair;
    for (int i = 0; i < 4; ++i) pair(i) = uniform_real(rng, -0.5, 0.5);
    targets.coords.push_back(pair);
  }

  const GradCheckReport report = grad_check(params, feature, targets, Lambdas{}, epsilon);
  std::cout << "{\"max_rel_error\": " << report.max_rel_error << ", \"worst_param\": \""
            << report.worst_param << "\", \"params_checked\": " << report.params_checked
            << "}\n";
  if (report.max_rel_error > 1e-4) {
    std::cerr << "gradient check failed: " << report.max_rel_error << " at "
              << report.worst_param << "\n";
    throw numeric_error("analytic and numeric gradients disagree");
  }
  return 0;
}

int run_plot(const std::string& in_path, const std::string& dets_path,
             const std::string& out_path) {
  std::vector<AdaptiveTextRegion> gts, dets;
  for (const AnnotationRecord& record : read_jsonl(in_path))
    gts.insert(gts.end(), record.regions.begin(), record.regions.end());
  if (!dets_path.empty()) {
    for (const AnnotationRecord& record : read_jsonl(dets_path))
      dets.insert(dets.end(), record.regions.begin(), record.regions.end());
  }
  write_svg(out_path, gts, dets);
  std::cout << "wrote " << out_path << " (" << gts.size() << " regions, " << dets.size()
            << " detections)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive boundary-point text detection toolkit"};
  app.require_subcommand(1);

  auto* convert = app.add_subcommand("convert", "convert raw annotations to JSON-lines regions");
  std::string convert_from, convert_in, convert_out;
  bool convert_relative = false;
  double convert_ratio = 0.93;
  convert->add_option("--from", convert_from, "input format")
      ->required()
      ->check(CLI::IsMember({"ctw14", "totaltext", "quad"}));
  convert->add_option("--in", convert_in, "input annotation file")->required();
  convert->add_option("--out", convert_out, "output JSON-lines file")->required();
  convert->add_flag("--relative", convert_relative,
                    "ctw14 lines carry a bounding box plus relative offsets");
  convert->add_option("--ratio-threshold", convert_ratio,
                      "minimum kept area fraction during point reduction");

  auto* nms = app.add_subcommand("nms", "suppress overlapping detections per image");
  std::string nms_in, nms_out;
  double nms_iou = 0.3;
  nms->add_option("--in", nms_in, "scored detections, JSON-lines")->required();
  nms->add_option("--out", nms_out, "surviving detections, JSON-lines")->required();
  nms->add_option("--iou", nms_iou, "suppression IoU threshold");

  auto* eval = app.add_subcommand("eval", "score detections against ground truth");
  std::string eval_dets, eval_gts;
  double eval_iou = 0.5;
  bool eval_macro = false;
  eval->add_option("--dets", eval_dets, "detections, JSON-lines")->required();
  eval->add_option("--gts", eval_gts, "ground truth, JSON-lines")->required();
  eval->add_option("--iou", eval_iou, "match IoU threshold");
  eval->add_flag("--macro", eval_macro, "average per image instead of over the dataset");

  auto* toy = app.add_subcommand("toy-train", "train the decoder on synthetic ribbons");
  std::string toy_config;
  long toy_seed = -1;
  toy->add_option("--config", toy_config, "key=value training configuration");
  toy->add_option("--seed", toy_seed, "override the config seed");

  auto* gc = app.add_subcommand("grad-check", "verify decoder gradients numerically");
  long gc_seed = 1;
  double gc_epsilon = 1e-5;
  int gc_hidden = 32, gc_steps = 5, gc_input = 8;
  gc->add_option("--seed", gc_seed, "random configuration seed");
  gc->add_option("--epsilon", gc_epsilon, "central difference step");
  gc->add_option("--hidden", gc_hidden, "hidden dimension");
  gc->add_option("--steps", gc_steps, "coordinate pairs in the target");
  gc->add_option("--input-dim", gc_input, "feature dimension");

  auto* plot = app.add_subcommand("plot", "render regions to SVG");
  std::string plot_in, plot_dets, plot_out;
  plot->add_option("--in", plot_in, "regions, JSON-lines")->required();
  plot->add_option("--dets", plot_dets, "optional detections, JSON-lines");
  plot->add_option("--out", plot_out, "output SVG path")->required();

  try {
    app.parse(argc, argv);
    if (convert->parsed())
      return run_convert(convert_from, convert_in, convert_out, convert_relative, convert_ratio);
    if (nms->parsed()) return run_nms(nms_in, nms_out, nms_iou);
    if (eval->parsed()) return run_eval(eval_dets, eval_gts, eval_iou, eval_macro);
    if (toy->parsed()) return run_toy_train(toy_config, toy_seed);
    if (gc->parsed()) return run_grad_check(gc_seed, gc_epsilon, gc_hidden, gc_steps, gc_input);
    if (plot->parsed()) return run_plot(plot_in, plot_dets, plot_out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // bad usage is an input error; --help stays 0
  } catch (const textdet::input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const textdet::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
