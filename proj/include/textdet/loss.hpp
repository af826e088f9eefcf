#pragma once

#include <array>
#include <vector>

#include "textdet/region.hpp"

namespace textdet {

struct Lambdas {
  double l1 = 1.0;  // bounding box term
  double l2 = 1.0;  // boundary points term
  double l3 = 1.0;  // stop/continue term
};

// Per-proposal multi-task loss split into its raw components. The identity
//   total = cls + l1*t*bbox + l2*t*points + l3*t*stop
// holds exactly; bbox/points/stop store the unweighted sums.
struct LossBreakdown {
  double total = 0.0;
  double cls = 0.0;
  double bbox = 0.0;
  double points = 0.0;
  double stop = 0.0;
  Lambdas lambdas;
  // Diagnostics only: per-coordinate / per-step means of the raw sums.
  double points_mean = 0.0;
  double stop_mean = 0.0;
};

// Scale-invariant translation plus log-space size shift of a box against a
// proposal.
struct BboxTarget {
  double v_x = 0.0;
  double v_y = 0.0;
  double v_w = 0.0;
  double v_h = 0.0;
};

// Piecewise regression loss: 0.5*x^2 inside |x| < 1, |x| - 0.5 outside.
double smooth_l1(double x);

// d/dx of smooth_l1: x inside the quadratic zone, sign(x) outside.
double smooth_l1_grad(double x);

// Log loss of the true class over a two-class probability pair. The selected
// probability is clamped to >= 1e-12 before the log.
double cls_log_loss(const std::array<double, 2>& p, int true_class);

BboxTarget bbox_targets(const ProposalBox& proposal, const ProposalBox& gt);

// Everything the refinement network predicts for one proposal.
struct ProposalPrediction {
  std::array<double, 2> cls_prob{0.5, 0.5};      // (background, text) after softmax
  std::array<double, 4> bbox{};                  // predicted v*
  std::vector<double> point_coords;              // normalized, 4 per step
  std::vector<std::array<double, 2>> stop_probs; // per step, (continue, stop)
};

// Supervision for one proposal. For background (text_label = 0) the
// regression and stop targets are ignored.
struct ProposalTarget {
  int text_label = 0;                  // 1 text, 0 background
  std::array<double, 4> bbox{};        // true v
  std::vector<double> point_coords;    // normalized, 4 per pair
  std::vector<int> stop_labels;        // 0 continue / 1 stop, one per step
};

// Sum of the four terms over one proposal. Background proposals contribute
// only the classification term. Throws input_error on pred/target length
// mismatches for text proposals.
LossBreakdown multitask_loss(const ProposalPrediction& pred, const ProposalTarget& gt,
                             const Lambdas& lambdas = {});

}  // namespace textdet
