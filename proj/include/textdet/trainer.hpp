#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "textdet/config.hpp"
#include "textdet/decoder.hpp"
#include "textdet/loss.hpp"
#include "textdet/synthetic.hpp"

namespace textdet {

// Toy training run: fit the boundary-point decoder on synthetic ribbons with
// plain SGD (momentum 0.9, weight decay 5e-4 on weights only, learning rate
// halved when the train loss plateaus). Fully deterministic given seed and
// config: one generator drives data creation, parameter init, and epoch
// shuffles, and all reductions run in a fixed order on one thread.
struct TrainConfig {
  unsigned long long seed = 42;
  int ribbons = 200;
  double train_frac = 0.8;   // leading fraction trains, the rest is held out
  int hidden_dim = 128;
  int max_steps = 16;
  int epochs = 50;
  int batch_size = 5;
  double lr = 8e-3;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  int plateau_patience = 10;  // epochs without improvement before halving lr
  Lambdas lambdas;
  int fixed_pairs = 0;       // 0 trains on adaptive targets; >0 on that many
  RibbonConfig ribbon;
  std::string csv_path;         // per-epoch loss table; empty skips the file
  std::string checkpoint_path;  // final parameters; empty skips the file
};

TrainConfig train_config_from(const Config& config);

struct EpochStats {
  int epoch = 0;
  double lr = 0.0;
  double total = 0.0;   // mean per-sample loss, lambda-weighted
  double points = 0.0;  // mean raw coordinate term
  double stop = 0.0;    // mean raw stop term
};

// Free-run quality on a ribbon set. point_error compares the predicted pairs
// against the first min(predicted, target) target pairs — mean over pairs of
// the average top/bottom endpoint distance in normalized units — and charges
// a full 1.0 for a decoder that stops before producing any pair. A ribbon
// counts toward stop_accuracy only when the predicted pair count matches
// exactly. teacher_forced_error is the same coordinate error with the step
// count forced to the target length.
struct EvalMetrics {
  double point_error = 0.0;
  double stop_accuracy = 0.0;
  double teacher_forced_error = 0.0;
  int count = 0;
};

// fixed_pairs = 0 scores against each ribbon's adaptive ground truth;
// otherwise against uniformly resampled fixed-size targets.
EvalMetrics evaluate_decoder(const DecoderParams<double>& params,
                             const std::vector<SyntheticRibbon>& ribbons, int max_steps,
                             int fixed_pairs = 0);

struct TrainResult {
  DecoderParams<double> params;
  std::vector<EpochStats> history;
  EvalMetrics held_out;    // scored against the targets the model trained on
  int train_count = 0;
  int eval_count = 0;
};

// Generates the dataset, trains, writes the CSV/checkpoint side outputs when
// configured, and reports held-out metrics. Aborts with numeric_error and a
// diagnostic dump on non-finite or runaway loss. Progress lines go to *log
// when given.
TrainResult train_toy(const TrainConfig& config, std::ostream* log = nullptr);

// Decoder parameters as versioned JSON. Values survive the round-trip
// bit-exactly (shortest-round-trip double encoding).
void save_checkpoint(const std::string& path, const DecoderParams<double>& params);
DecoderParams<double> load_checkpoint(const std::string& path);

}  // namespace textdet
