#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "textdet/errors.hpp"
#include "textdet/rng.hpp"

namespace textdet {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Single-layer forget-gate LSTM cell, no peepholes. Gate pre-activations are
// w_ih * x + w_hh * h + bias with row blocks ordered input, forget, cell
// candidate, output.
template <class Scalar>
struct LstmParams {
  int input_dim = 0;
  int hidden_dim = 0;
  MatrixX<Scalar> w_ih;   // 4H x F
  MatrixX<Scalar> w_hh;   // 4H x H
  VectorX<Scalar> bias;   // 4H
};

template <class Scalar>
struct LstmState {
  VectorX<Scalar> h;
  VectorX<Scalar> c;
};

template <class Scalar>
LstmState<Scalar> zero_state(const LstmParams<Scalar>& params) {
  return {VectorX<Scalar>::Zero(params.hidden_dim), VectorX<Scalar>::Zero(params.hidden_dim)};
}

template <class Scalar>
void validate_lstm(const LstmParams<Scalar>& params) {
  if (params.input_dim <= 0 || params.hidden_dim <= 0)
    throw input_error("lstm dimensions must be positive");
  if (params.w_ih.rows() != 4 * params.hidden_dim || params.w_ih.cols() != params.input_dim ||
      params.w_hh.rows() != 4 * params.hidden_dim || params.w_hh.cols() != params.hidden_dim ||
      params.bias.size() != 4 * params.hidden_dim)
    throw input_error("lstm weight shapes do not match declared dimensions");
  if (!params.w_ih.allFinite() || !params.w_hh.allFinite() || !params.bias.allFinite())
    throw input_error("lstm weights contain non-finite values");
}

// Weights uniform in (-0.08, 0.08), forget-gate bias +1.
template <class Scalar>
LstmParams<Scalar> init_lstm(int input_dim, int hidden_dim, std::mt19937_64& rng,
                             double scale = 0.08) {
  LstmParams<Scalar> p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.w_ih.resize(4 * hidden_dim, input_dim);
  p.w_hh.resize(4 * hidden_dim, hidden_dim);
  p.bias = VectorX<Scalar>::Zero(4 * hidden_dim);
  for (int j = 0; j < p.w_ih.cols(); ++j)
    for (int i = 0; i < p.w_ih.rows(); ++i)
      p.w_ih(i, j) = static_cast<Scalar>(uniform_real(rng, -scale, scale));
  for (int j = 0; j < p.w_hh.cols(); ++j)
    for (int i = 0; i < p.w_hh.rows(); ++i)
      p.w_hh(i, j) = static_cast<Scalar>(uniform_real(rng, -scale, scale));
  p.bias.segment(hidden_dim, hidden_dim).setConstant(static_cast<Scalar>(1));
  return p;
}

template <class Scalar>
VectorX<Scalar> sigmoid(const VectorX<Scalar>& x) {
  return ((-x.array()).exp() + Scalar(1)).inverse().matrix();
}

// Per-step activations kept for backpropagation through time.
template <class Scalar>
struct LstmStepTrace {
  VectorX<Scalar> i, f, g, o;   // gate activations
  VectorX<Scalar> c, tanh_c, h; // post-step cell, tanh(cell), hidden
  VectorX<Scalar> c_prev;
};

template <class Scalar>
LstmStepTrace<Scalar> lstm_step_traced(const LstmParams<Scalar>& params,
                                       const LstmState<Scalar>& state,
                                       const VectorX<Scalar>& input) {
  if (input.size() != params.input_dim || state.h.size() != params.hidden_dim ||
      state.c.size() != params.hidden_dim)
    throw input_error("lstm_step dimension mismatch");

  const int h = params.hidden_dim;
  const VectorX<Scalar> pre = params.w_ih * input + params.w_hh * state.h + params.bias;
  LstmStepTrace<Scalar> t;
  t.i = sigmoid<Scalar>(pre.segment(0, h));
  t.f = sigmoid<Scalar>(pre.segment(h, h));
  t.g = pre.segment(2 * h, h).array().tanh().matrix();
  t.o = sigmoid<Scalar>(pre.segment(3 * h, h));
  t.c_prev = state.c;
  t.c = (t.f.array() * state.c.array() + t.i.array() * t.g.array()).matrix();
  t.tanh_c = t.c.array().tanh().matrix();
  t.h = (t.o.array() * t.tanh_c.array()).matrix();
  return t;
}

// One recurrence step; returns the updated state (h is the step output).
template <class Scalar>
LstmState<Scalar> lstm_step(const LstmParams<Scalar>& params, const LstmState<Scalar>& state,
                            const VectorX<Scalar>& input) {
  const LstmStepTrace<Scalar> t = lstm_step_traced(params, state, input);
  return {t.h, t.c};
}

}  // namespace textdet
