#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "textdet/errors.hpp"
#include "textdet/loss.hpp"
#include "textdet/lstm.hpp"

namespace textdet {

template <class Scalar>
using Vector4 = Eigen::Matrix<Scalar, 4, 1>;
template <class Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

// Two-headed recurrent boundary-point decoder. Every step feeds the same
// feature vector to the LSTM; the coordinate head regresses one (top, bottom)
// point pair in normalized units and the stop head classifies continue/stop.
// Stop is class index 1.
template <class Scalar>
struct DecoderParams {
  LstmParams<Scalar> lstm;
  MatrixX<Scalar> coord_w;  // 4 x hidden
  VectorX<Scalar> coord_b;  // 4
  MatrixX<Scalar> stop_w;   // 2 x hidden
  VectorX<Scalar> stop_b;   // 2
};

template <class Scalar>
void validate_decoder(const DecoderParams<Scalar>& p) {
  validate_lstm(p.lstm);
  const int h = p.lstm.hidden_dim;
  if (p.coord_w.rows() != 4 || p.coord_w.cols() != h || p.coord_b.size() != 4 ||
      p.stop_w.rows() != 2 || p.stop_w.cols() != h || p.stop_b.size() != 2)
    throw input_error("decoder head shapes do not match hidden_dim");
  if (!p.coord_w.allFinite() || !p.coord_b.allFinite() || !p.stop_w.allFinite() ||
      !p.stop_b.allFinite())
    throw input_error("decoder head weights contain non-finite values");
}

template <class Scalar>
DecoderParams<Scalar> init_decoder(int input_dim, int hidden_dim, std::mt19937_64& rng,
                                   double scale = 0.08) {
  DecoderParams<Scalar> p;
  p.lstm = init_lstm<Scalar>(input_dim, hidden_dim, rng, scale);
  p.coord_w.resize(4, hidden_dim);
  p.stop_w.resize(2, hidden_dim);
  p.coord_b = VectorX<Scalar>::Zero(4);
  p.stop_b = VectorX<Scalar>::Zero(2);
  for (int j = 0; j < hidden_dim; ++j)
    for (int i = 0; i < 4; ++i)
      p.coord_w(i, j) = static_cast<Scalar>(uniform_real(rng, -scale, scale));
  for (int j = 0; j < hidden_dim; ++j)
    for (int i = 0; i < 2; ++i)
      p.stop_w(i, j) = static_cast<Scalar>(uniform_real(rng, -scale, scale));
  return p;
}

template <class Scalar>
Vector2<Scalar> softmax2(const Vector2<Scalar>& logits) {
  const Scalar m = logits.maxCoeff();
  Vector2<Scalar> e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

// One emitted pair: coordinates plus the stop-class probability seen at that
// step (which lost to continue, or the decoder would have halted).
template <class Scalar>
struct DecoderStep {
  Vector4<Scalar> coords;
  Scalar stop_prob;
};

// stop_step == steps.size() always: the index of the first step whose stop
// class won, or max_steps if the decoder ran out of budget. The stop step
// itself contributes no coordinates.
template <class Scalar>
struct DecoderOutput {
  std::vector<DecoderStep<Scalar>> steps;
  int stop_step = 0;
};

template <class Scalar>
DecoderOutput<Scalar> decoder_forward(const DecoderParams<Scalar>& params,
                                      const VectorX<Scalar>& feature, int max_steps = 16) {
  validate_decoder(params);
  if (feature.size() != params.lstm.input_dim)
    throw input_error("decoder feature dimension mismatch");
  if (max_steps < 2) throw input_error("decoder max_steps must be at least 2");

  DecoderOutput<Scalar> out;
  LstmState<Scalar> state = zero_state(params.lstm);
  for (int t = 0; t < max_steps; ++t) {
    state = lstm_step(params.lstm, state, feature);
    const Vector2<Scalar> probs =
        softmax2<Scalar>(params.stop_w * state.h + params.stop_b);
    if (probs(1) > probs(0)) break;
    out.steps.push_back({params.coord_w * state.h + params.coord_b, probs(1)});
  }
  out.stop_step = static_cast<int>(out.steps.size());
  return out;
}

// Supervision for one region: k coordinate pairs, flat (top.x, top.y,
// bottom.x, bottom.y) per pair. Stop labels are implied: continue for the
// first k steps, stop at step k, so training always runs k + 1 steps.
template <class Scalar>
struct DecoderTargets {
  std::vector<Vector4<Scalar>> coords;
};

// Everything the backward pass needs, plus the loss split. Raw sums carry no
// lambda weighting; total = l2 * points_raw + l3 * stop_raw.
template <class Scalar>
struct DecoderTrace {
  std::vector<LstmStepTrace<Scalar>> cells;       // k + 1
  std::vector<Vector4<Scalar>> coords;            // k (continue steps only)
  std::vector<Vector2<Scalar>> stop_probs;        // k + 1
  double points_raw = 0.0;
  double stop_raw = 0.0;
  double total = 0.0;
};

template <class Scalar>
DecoderTrace<Scalar> decoder_training_forward(const DecoderParams<Scalar>& params,
                                              const VectorX<Scalar>& feature,
                                              const DecoderTargets<Scalar>& targets,
                                              const Lambdas& lambdas) {
  validate_decoder(params);
  if (feature.size() != params.lstm.input_dim)
    throw input_error("decoder feature dimension mismatch");
  const int k = static_cast<int>(targets.coords.size());
  if (k < 1) throw input_error("decoder targets need at least one pair");

  DecoderTrace<Scalar> trace;
  trace.cells.reserve(k + 1);
  LstmState<Scalar> state = zero_state(params.lstm);
  for (int t = 0; t <= k; ++t) {
    const LstmStepTrace<Scalar> cell = lstm_step_traced(params.lstm, state, feature);
    state = {cell.h, cell.c};
    const Vector2<Scalar> probs = softmax2<Scalar>(params.stop_w * cell.h + params.stop_b);
    const int label = (t == k) ? 1 : 0;
    trace.stop_raw +=
        cls_log_loss({static_cast<double>(probs(0)), static_cast<double>(probs(1))}, label);
    if (t < k) {
      const Vector4<Scalar> pred = params.coord_w * cell.h + params.coord_b;
      for (int j = 0; j < 4; ++j)
        trace.points_raw +=
            smooth_l1(static_cast<double>(pred(j)) - static_cast<double>(targets.coords[t](j)));
      trace.coords.push_back(pred);
    }
    trace.stop_probs.push_back(probs);
    trace.cells.push_back(cell);
  }
  trace.total = lambdas.l2 * trace.points_raw + lambdas.l3 * trace.stop_raw;
  return trace;
}

template <class Scalar>
struct DecoderGrads {
  MatrixX<Scalar> w_ih, w_hh;
  VectorX<Scalar> bias;
  MatrixX<Scalar> coord_w;
  VectorX<Scalar> coord_b;
  MatrixX<Scalar> stop_w;
  VectorX<Scalar> stop_b;
};

template <class Scalar>
DecoderGrads<Scalar> zero_grads(const DecoderParams<Scalar>& p) {
  DecoderGrads<Scalar> g;
  g.w_ih = MatrixX<Scalar>::Zero(p.lstm.w_ih.rows(), p.lstm.w_ih.cols());
  g.w_hh = MatrixX<Scalar>::Zero(p.lstm.w_hh.rows(), p.lstm.w_hh.cols());
  g.bias = VectorX<Scalar>::Zero(p.lstm.bias.size());
  g.coord_w = MatrixX<Scalar>::Zero(4, p.lstm.hidden_dim);
  g.coord_b = VectorX<Scalar>::Zero(4);
  g.stop_w = MatrixX<Scalar>::Zero(2, p.lstm.hidden_dim);
  g.stop_b = VectorX<Scalar>::Zero(2);
  return g;
}

template <class Scalar>
void accumulate(DecoderGrads<Scalar>& into, const DecoderGrads<Scalar>& g) {
  into.w_ih += g.w_ih;
  into.w_hh += g.w_hh;
  into.bias += g.bias;
  into.coord_w += g.coord_w;
  into.coord_b += g.coord_b;
  into.stop_w += g.stop_w;
  into.stop_b += g.stop_b;
}

// Backpropagation through time over the k + 1 supervised steps. Runs its own
// forward pass; pass trace_out to also receive the loss split.
template <class Scalar>
DecoderGrads<Scalar> decoder_backward(const DecoderParams<Scalar>& params,
                                      const VectorX<Scalar>& feature,
                                      const DecoderTargets<Scalar>& targets,
                                      const Lambdas& lambdas,
                                      DecoderTrace<Scalar>* trace_out = nullptr) {
  const DecoderTrace<Scalar> trace = decoder_training_forward(params, feature, targets, lambdas);
  const int k = static_cast<int>(targets.coords.size());
  const int hidden = params.lstm.hidden_dim;

  DecoderGrads<Scalar> g = zero_grads(params);
  VectorX<Scalar> dh_future = VectorX<Scalar>::Zero(hidden);
  VectorX<Scalar> dc = VectorX<Scalar>::Zero(hidden);  // carries dc_next * f_next
  for (int t = k; t >= 0; --t) {
    const LstmStepTrace<Scalar>& cell = trace.cells[t];

    // Stop head: softmax cross-entropy, so dlogits = p - onehot(label).
    Vector2<Scalar> dlogits = trace.stop_probs[t];
    dlogits((t == k) ? 1 : 0) -= Scalar(1);
    dlogits *= static_cast<Scalar>(lambdas.l3);
    g.stop_w += dlogits * cell.h.transpose();
    g.stop_b += dlogits;
    VectorX<Scalar> dh = params.stop_w.transpose() * dlogits + dh_future;

    if (t < k) {
      Vector4<Scalar> dcoords;
      for (int j = 0; j < 4; ++j) {
        const double r = static_cast<double>(trace.coords[t](j)) -
                         static_cast<double>(targets.coords[t](j));
        dcoords(j) = static_cast<Scalar>(lambdas.l2 * smooth_l1_grad(r));
      }
      g.coord_w += dcoords * cell.h.transpose();
      g.coord_b += dcoords;
      dh += params.coord_w.transpose() * dcoords;
    }

    const VectorX<Scalar> d_o = (dh.array() * cell.tanh_c.array()).matrix();
    dc += (dh.array() * cell.o.array() * (Scalar(1) - cell.tanh_c.array().square())).matrix();
    const VectorX<Scalar> d_i = (dc.array() * cell.g.array()).matrix();
    const VectorX<Scalar> d_g = (dc.array() * cell.i.array()).matrix();
    const VectorX<Scalar> d_f = (dc.array() * cell.c_prev.array()).matrix();
    const VectorX<Scalar> dc_prev = (dc.array() * cell.f.array()).matrix();

    // Gate pre-activation gradients, block order i | f | g | o.
    VectorX<Scalar> da(4 * hidden);
    da.segment(0, hidden) =
        (d_i.array() * cell.i.array() * (Scalar(1) - cell.i.array())).matrix();
    da.segment(hidden, hidden) =
        (d_f.array() * cell.f.array() * (Scalar(1) - cell.f.array())).matrix();
    da.segment(2 * hidden, hidden) =
        (d_g.array() * (Scalar(1) - cell.g.array().square())).matrix();
    da.segment(3 * hidden, hidden) =
        (d_o.array() * cell.o.array() * (Scalar(1) - cell.o.array())).matrix();

    g.w_ih += da * feature.transpose();
    if (t > 0) g.w_hh += da * trace.cells[t - 1].h.transpose();
    g.bias += da;
    dh_future = params.lstm.w_hh.transpose() * da;
    dc = dc_prev;
  }
  if (trace_out) *trace_out = trace;
  return g;
}

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;  // e.g. "w_hh[137]"
  long params_checked = 0;
};

// Central-difference verification of decoder_backward, every parameter
// element. Relative error |a - n| / max(1e-4, |a| + |n|): the floor keeps
// near-zero gradients from amplifying round-off into false alarms while
// still exposing any real defect (which shifts gradients at the 1e-2 scale).
// Pass analytic to check externally supplied (e.g. deliberately corrupted)
// gradients instead of a fresh decoder_backward run.
inline GradCheckReport grad_check(DecoderParams<double> params,
                                  const VectorX<double>& feature,
                                  const DecoderTargets<double>& targets,
                                  const Lambdas& lambdas, double epsilon = 1e-5,
                                  const DecoderGrads<double>* analytic = nullptr) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3))
    throw input_error("grad_check epsilon must lie in [1e-7, 1e-3]");
  const DecoderGrads<double> grads =
      analytic ? *analytic : decoder_backward(params, feature, targets, lambdas);

  struct View {
    const char* name;
    double* value;
    const double* grad;
    Eigen::Index size;
  };
  const View views[] = {
      {"w_ih", params.lstm.w_ih.data(), grads.w_ih.data(), params.lstm.w_ih.size()},
      {"w_hh", params.lstm.w_hh.data(), grads.w_hh.data(), params.lstm.w_hh.size()},
      {"bias", params.lstm.bias.data(), grads.bias.data(), params.lstm.bias.size()},
      {"coord_w", params.coord_w.data(), grads.coord_w.data(), params.coord_w.size()},
      {"coord_b", params.coord_b.data(), grads.coord_b.data(), params.coord_b.size()},
      {"stop_w", params.stop_w.data(), grads.stop_w.data(), params.stop_w.size()},
      {"stop_b", params.stop_b.data(), grads.stop_b.data(), params.stop_b.size()},
  };

  GradCheckReport report;
  for (const View& v : views) {
    for (Eigen::Index idx = 0; idx < v.size; ++idx) {
      const double saved = v.value[idx];
      v.value[idx] = saved + epsilon;
      const double plus = decoder_training_forward(params, feature, targets, lambdas).total;
      v.value[idx] = saved - epsilon;
      const double minus = decoder_training_forward(params, feature, targets, lambdas).total;
      v.value[idx] = saved;

      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double a = v.grad[idx];
      const double rel = std::abs(a - numeric) / std::max(1e-4, std::abs(a) + std::abs(numeric));
      ++report.params_checked;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = std::string(v.name) + "[" + std::to_string(idx) + "]";
      }
    }
  }
  return report;
}

}  // namespace textdet
