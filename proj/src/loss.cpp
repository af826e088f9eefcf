#include "textdet/loss.hpp"

#include <cmath>

#include "textdet/errors.hpp"

namespace textdet {

namespace {
constexpr double kProbFloor = 1e-12;
}

double smooth_l1(double x) {
  const double ax = std::abs(x);
  return ax < 1.0 ? 0.5 * x * x : ax - 0.5;
}

double smooth_l1_grad(double x) {
  if (std::abs(x) < 1.0) return x;
  return x > 0 ? 1.0 : -1.0;
}

double cls_log_loss(const std::array<double, 2>& p, int true_class) {
  if (true_class != 0 && true_class != 1) throw input_error("class label must be 0 or 1");
  return -std::log(std::max(p[static_cast<size_t>(true_class)], kProbFloor));
}

BboxTarget bbox_targets(const ProposalBox& proposal, const ProposalBox& gt) {
  if (!(proposal.w_a > 0) || !(proposal.h_a > 0) || !(gt.w_a > 0) || !(gt.h_a > 0))
    throw input_error("bbox_targets needs positive box sizes");
  BboxTarget t;
  t.v_x = (gt.x_a - proposal.x_a) / proposal.w_a;
  t.v_y = (gt.y_a - proposal.y_a) / proposal.h_a;
  t.v_w = std::log(gt.w_a / proposal.w_a);
  t.v_h = std::log(gt.h_a / proposal.h_a);
  return t;
}

LossBreakdown multitask_loss(const ProposalPrediction& pred, const ProposalTarget& gt,
                             const Lambdas& lambdas) {
  LossBreakdown out;
  out.lambdas = lambdas;
  out.cls = cls_log_loss(pred.cls_prob, gt.text_label);

  if (gt.text_label == 1) {
    if (pred.point_coords.size() != gt.point_coords.size())
      throw input_error("point coordinate count mismatch between prediction and target");
    if (pred.stop_probs.size() != gt.stop_labels.size())
      throw input_error("stop step count mismatch between prediction and target");

    for (int i = 0; i < 4; ++i)
      out.bbox += smooth_l1(pred.bbox[static_cast<size_t>(i)] - gt.bbox[static_cast<size_t>(i)]);
    for (size_t i = 0; i < pred.point_coords.size(); ++i)
      out.points += smooth_l1(pred.point_coords[i] - gt.point_coords[i]);
    for (size_t s = 0; s < pred.stop_probs.size(); ++s)
      out.stop += cls_log_loss(pred.stop_probs[s], gt.stop_labels[s]);

    if (!pred.point_coords.empty())
      out.points_mean = out.points / static_cast<double>(pred.point_coords.size());
    if (!pred.stop_probs.empty())
      out.stop_mean = out.stop / static_cast<double>(pred.stop_probs.size());
  }

  const double t = gt.text_label == 1 ? 1.0 : 0.0;
  out.total = out.cls + lambdas.l1 * t * out.bbox + lambdas.l2 * t * out.points +
              lambdas.l3 * t * out.stop;
  return out;
}

}  // namespace textdet
