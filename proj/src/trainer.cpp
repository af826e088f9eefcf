#include "textdet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "textdet/errors.hpp"
#include "textdet/rng.hpp"

namespace textdet {

namespace {

constexpr double kDivergenceBound = 1e15;

DecoderTargets<double> targets_for(const SyntheticRibbon& ribbon, int fixed_pairs) {
  const std::vector<double> flat =
      fixed_pairs > 0 ? fixed_pair_targets(ribbon, fixed_pairs) : ribbon.targets;
  DecoderTargets<double> targets;
  for (std::size_t i = 0; i + 3 < flat.size(); i += 4)
    targets.coords.push_back(Vector4<double>(flat[i], flat[i + 1], flat[i + 2], flat[i + 3]));
  return targets;
}

VectorX<double> feature_of(const SyntheticRibbon& ribbon) {
  return Eigen::Map<const VectorX<double>>(ribbon.feature.data(),
                                           static_cast<Eigen::Index>(ribbon.feature.size()));
}

double pair_error(const Vector4<double>& pred, const Vector4<double>& target) {
  const double top = std::hypot(pred(0) - target(0), pred(1) - target(1));
  const double bottom = std::hypot(pred(2) - target(2), pred(3) - target(3));
  return 0.5 * (top + bottom);
}

// v = momentum * v - lr * (g + decay * p); p += v. Decay skips biases so the
// forget-gate offset is not pulled toward zero.
struct Momentum {
  DecoderGrads<double> v;

  explicit Momentum(const DecoderParams<double>& p) : v(zero_grads(p)) {}

  template <class Mat>
  static void step_one(Mat& param, Mat& vel, const Mat& grad, double lr, double momentum,
                       double decay) {
    vel = momentum * vel - lr * (grad + decay * param);
    param += vel;
  }

  void apply(DecoderParams<double>& p, const DecoderGrads<double>& g, double lr, double momentum,
             double decay) {
    step_one(p.lstm.w_ih, v.w_ih, g.w_ih, lr, momentum, decay);
    step_one(p.lstm.w_hh, v.w_hh, g.w_hh, lr, momentum, decay);
    step_one(p.coord_w, v.coord_w, g.coord_w, lr, momentum, decay);
    step_one(p.stop_w, v.stop_w, g.stop_w, lr, momentum, decay);
    step_one(p.lstm.bias, v.bias, g.bias, lr, momentum, 0.0);
    step_one(p.coord_b, v.coord_b, g.coord_b, lr, momentum, 0.0);
    step_one(p.stop_b, v.stop_b, g.stop_b, lr, momentum, 0.0);
  }
};

void scale_grads(DecoderGrads<double>& g, double s) {
  g.w_ih *= s;
  g.w_hh *= s;
  g.bias *= s;
  g.coord_w *= s;
  g.coord_b *= s;
  g.stop_w *= s;
  g.stop_b *= s;
}

}  // namespace

TrainConfig train_config_from(const Config& config) {
  TrainConfig t;
  t.seed = static_cast<unsigned long long>(config.get_int("seed", 42));
  t.ribbons = config.get_int("ribbons", t.ribbons);
  t.train_frac = config.get_double("train_frac", t.train_frac);
  t.hidden_dim = config.get_int("hidden_dim", t.hidden_dim);
  t.max_steps = config.get_int("max_steps", t.max_steps);
  t.epochs = config.get_int("epochs", t.epochs);
  t.batch_size = config.get_int("batch_size", t.batch_size);
  t.lr = config.get_double("lr", t.lr);
  t.momentum = config.get_double("momentum", t.momentum);
  t.weight_decay = config.get_double("weight_decay", t.weight_decay);
  t.plateau_patience = config.get_int("plateau_patience", t.plateau_patience);
  t.lambdas.l1 = config.get_double("lambda1", t.lambdas.l1);
  t.lambdas.l2 = config.get_double("lambda2", t.lambdas.l2);
  t.lambdas.l3 = config.get_double("lambda3", t.lambdas.l3);
  t.fixed_pairs = config.get_int("fixed_pairs", t.fixed_pairs);
  t.ribbon.angle_jitter = config.get_double("angle_jitter", t.ribbon.angle_jitter);
  t.ribbon.arcs = config.get_bool("arcs", t.ribbon.arcs);
  t.ribbon.sines = config.get_bool("sines", t.ribbon.sines);
  t.ribbon.grid = config.get_int("grid", t.ribbon.grid);
  t.ribbon.subsamples = config.get_int("subsamples", t.ribbon.subsamples);
  t.ribbon.dense_samples = config.get_int("dense_samples", t.ribbon.dense_samples);
  t.ribbon.min_length = config.get_double("min_length", t.ribbon.min_length);
  t.ribbon.max_length = config.get_double("max_length", t.ribbon.max_length);
  t.ribbon.min_width_frac = config.get_double("min_width_frac", t.ribbon.min_width_frac);
  t.ribbon.max_width_frac = config.get_double("max_width_frac", t.ribbon.max_width_frac);
  t.csv_path = config.get_string("csv", t.csv_path);
  t.checkpoint_path = config.get_string("checkpoint", t.checkpoint_path);
  return t;
}

EvalMetrics evaluate_decoder(const DecoderParams<double>& params,
                             const std::vector<SyntheticRibbon>& ribbons, int max_steps,
                             int fixed_pairs) {
  EvalMetrics metrics;
  const Lambdas unit;
  for (const SyntheticRibbon& ribbon : ribbons) {
    const DecoderTargets<double> targets = targets_for(ribbon, fixed_pairs);
    const VectorX<double> feature = feature_of(ribbon);
    const int k = static_cast<int>(targets.coords.size());

    const DecoderOutput<double> out = decoder_forward(params, feature, max_steps);
    const int predicted = static_cast<int>(out.steps.size());
    const int shared = std::min(predicted, k);
    if (shared == 0) {
      metrics.point_error += 1.0;
    } else {
      double err = 0.0;
      for (int j = 0; j < shared; ++j) err += pair_error(out.steps[j].coords, targets.coords[j]);
      metrics.point_error += err / shared;
    }
    if (predicted == k) metrics.stop_accuracy += 1.0;

    const DecoderTrace<double> trace = decoder_training_forward(params, feature, targets, unit);
    double forced = 0.0;
    for (int j = 0; j < k; ++j) forced += pair_error(trace.coords[j], targets.coords[j]);
    metrics.teacher_forced_error += forced / k;
    ++metrics.count;
  }
  if (metrics.count > 0) {
    metrics.point_error /= metrics.count;
    metrics.stop_accuracy /= metrics.count;
    metrics.teacher_forced_error /= metrics.count;
  }
  return metrics;
}

TrainResult train_toy(const TrainConfig& config, std::ostream* log) {
  if (config.ribbons < 2 || config.train_frac <= 0.0 || config.train_frac >= 1.0)
    throw input_error("training needs ribbons >= 2 and train_frac in (0, 1)");
  if (config.epochs < 1 || config.batch_size < 1 || config.hidden_dim < 1)
    throw input_error("training needs positive epochs, batch_size, hidden_dim");

  std::mt19937_64 rng(config.seed);
  const std::vector<SyntheticRibbon> data = make_ribbons(config.ribbons, rng, config.ribbon);
  const int train_count =
      std::clamp(static_cast<int>(std::lround(config.ribbons * config.train_frac)), 1,
                 config.ribbons - 1);
  const std::vector<SyntheticRibbon> train(data.begin(), data.begin() + train_count);
  const std::vector<SyntheticRibbon> held(data.begin() + train_count, data.end());
  const int input_dim = static_cast<int>(train.front().feature.size());

  TrainResult result;
  result.params = init_decoder<double>(input_dim, config.hidden_dim, rng);
  result.train_count = train_count;
  result.eval_count = static_cast<int>(held.size());

  Momentum momentum(result.params);
  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  double lr = config.lr;
  double best_loss = std::numeric_limits<double>::infinity();
  int stale_epochs = 0;

  std::ofstream csv;
  if (!config.csv_path.empty()) {
    csv.open(config.csv_path);
    if (!csv) throw input_error("cannot write " + config.csv_path);
    csv << "epoch,lr,total,cls,bbox,points,stop\n";
  }

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_inplace(order, rng);
    double epoch_total = 0.0, epoch_points = 0.0, epoch_stop = 0.0;

    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(begin + config.batch_size, order.size());
      DecoderGrads<double> batch_grads = zero_grads(result.params);
      for (std::size_t pos = begin; pos < end; ++pos) {
        const SyntheticRibbon& sample = train[order[pos]];
        DecoderTrace<double> trace;
        const DecoderGrads<double> grads =
            decoder_backward(result.params, feature_of(sample),
                             targets_for(sample, config.fixed_pairs), config.lambdas, &trace);
        if (!std::isfinite(trace.total) || trace.total > kDivergenceBound) {
          if (log)
            *log << "training aborted at epoch " << epoch << ", sample " << order[pos]
                 << " (family " << sample.family << ", bend " << sample.bend << ", pairs "
                 << sample.gt.pair_count() << "): loss " << trace.total << " (points "
                 << trace.points_raw << ", stop " << trace.stop_raw << ")\n";
          throw numeric_error("training loss diverged");
        }
        accumulate(batch_grads, grads);
        epoch_total += trace.total;
        epoch_points += trace.points_raw;
        epoch_stop += trace.stop_raw;
      }
      scale_grads(batch_grads, 1.0 / static_cast<double>(end - begin));
      momentum.apply(result.params, batch_grads, lr, config.momentum, config.weight_decay);
    }

    const double n = static_cast<double>(train.size());
    EpochStats stats{epoch, lr, epoch_total / n, epoch_points / n, epoch_stop / n};
    result.history.push_back(stats);
    if (csv.is_open())
      csv << stats.epoch << ',' << stats.lr << ',' << stats.total << ",0,0," << stats.points
          << ',' << stats.stop << '\n';
    if (log)
      *log << "epoch " << stats.epoch << " lr " << stats.lr << " loss " << stats.total
           << " (points " << stats.points << ", stop " << stats.stop << ")\n";

    if (stats.total < best_loss - 1e-12) {
      best_loss = stats.total;
      stale_epochs = 0;
    } else if (++stale_epochs >= config.plateau_patience) {
      lr *= 0.5;
      stale_epochs = 0;
      if (log) *log << "plateau: halving learning rate to " << lr << "\n";
    }
  }

  result.held_out = evaluate_decoder(result.params, held, config.max_steps, config.fixed_pairs);
  if (!config.checkpoint_path.empty()) save_checkpoint(config.checkpoint_path, result.params);
  return result;
}

namespace {

nlohmann::json matrix_to_json(const MatrixX<double>& m) {
  // Column-major flat list, matching the in-memory layout.
  nlohmann::json values = nlohmann::json::array();
  const double* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) values.push_back(data[i]);
  return values;
}

void matrix_from_json(const nlohmann::json& values, MatrixX<double>& m) {
  if (!values.is_array() || static_cast<Eigen::Index>(values.size()) != m.size())
    throw input_error("checkpoint field has wrong element count");
  double* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!values[i].is_number()) throw input_error("checkpoint field has non-numeric entry");
    data[i] = values[i].get<double>();
  }
}

void vector_from_json(const nlohmann::json& values, VectorX<double>& v) {
  if (!values.is_array() || static_cast<Eigen::Index>(values.size()) != v.size())
    throw input_error("checkpoint field has wrong element count");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!values[i].is_number()) throw input_error("checkpoint field has non-numeric entry");
    v(i) = values[i].get<double>();
  }
}

nlohmann::json vector_to_json(const VectorX<double>& v) {
  nlohmann::json values = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) values.push_back(v(i));
  return values;
}

}  // namespace

void save_checkpoint(const std::string& path, const DecoderParams<double>& params) {
  validate_decoder(params);
  nlohmann::json j;
  j["format"] = "textdet-decoder";
  j["version"] = 1;
  j["input_dim"] = params.lstm.input_dim;
  j["hidden_dim"] = params.lstm.hidden_dim;
  j["w_ih"] = matrix_to_json(params.lstm.w_ih);
  j["w_hh"] = matrix_to_json(params.lstm.w_hh);
  j["bias"] = vector_to_json(params.lstm.bias);
  j["coord_w"] = matrix_to_json(params.coord_w);
  j["coord_b"] = vector_to_json(params.coord_b);
  j["stop_w"] = matrix_to_json(params.stop_w);
  j["stop_b"] = vector_to_json(params.stop_b);
  std::ofstream out(path);
  if (!out) throw input_error("cannot write " + path);
  out << j.dump() << '\n';
}

DecoderParams<double> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw input_error(path + ": invalid checkpoint JSON: " + e.what());
  }
  if (j.value("format", "") != "textdet-decoder" || j.value("version", 0) != 1)
    throw input_error(path + ": not a version-1 decoder checkpoint");
  if (!j.contains("input_dim") || !j.contains("hidden_dim") || !j["input_dim"].is_number_integer() ||
      !j["hidden_dim"].is_number_integer())
    throw input_error(path + ": checkpoint lacks dimensions");

  const int input_dim = j["input_dim"].get<int>();
  const int hidden_dim = j["hidden_dim"].get<int>();
  if (input_dim < 1 || hidden_dim < 1) throw input_error(path + ": non-positive dimensions");

  DecoderParams<double> params;
  params.lstm.input_dim = input_dim;
  params.lstm.hidden_dim = hidden_dim;
  params.lstm.w_ih.resize(4 * hidden_dim, input_dim);
  params.lstm.w_hh.resize(4 * hidden_dim, hidden_dim);
  params.lstm.bias.resize(4 * hidden_dim);
  params.coord_w.resize(4, hidden_dim);
  params.coord_b.resize(4);
  params.stop_w.resize(2, hidden_dim);
  params.stop_b.resize(2);
  try {
    matrix_from_json(j.at("w_ih"), params.lstm.w_ih);
    matrix_from_json(j.at("w_hh"), params.lstm.w_hh);
    vector_from_json(j.at("bias"), params.lstm.bias);
    matrix_from_json(j.at("coord_w"), params.coord_w);
    vector_from_json(j.at("coord_b"), params.coord_b);
    matrix_from_json(j.at("stop_w"), params.stop_w);
    vector_from_json(j.at("stop_b"), params.stop_b);
  } catch (const nlohmann::json::exception&) {
    throw input_error(path + ": checkpoint is missing parameter fields");
  }
  validate_decoder(params);
  return params;
}

}  // namespace textdet
