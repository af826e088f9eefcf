#pragma once

#include <Eigen/Dense>
#include <random>

#include "textdet/errors.hpp"
#include "textdet/lstm.hpp"

namespace textdet {

// C x H x W feature map stored channel-major: row c holds channel c in
// row-major spatial order.
template <class Scalar>
struct ChannelMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  MatrixX<Scalar> data;  // channels x (height * width)
};

// Squeeze-and-excitation bottleneck: global average pool, FC down, ReLU,
// FC up, sigmoid, channel-wise scale.
template <class Scalar>
struct SeBlockParams {
  int channels = 0;
  int reduced = 0;
  MatrixX<Scalar> fc1_w;  // reduced x channels
  VectorX<Scalar> fc1_b;  // reduced
  MatrixX<Scalar> fc2_w;  // channels x reduced
  VectorX<Scalar> fc2_b;  // channels
};

template <class Scalar>
void validate_se(const SeBlockParams<Scalar>& p) {
  if (p.channels <= 0 || p.reduced <= 0) throw input_error("se block dimensions must be positive");
  if (p.fc1_w.rows() != p.reduced || p.fc1_w.cols() != p.channels || p.fc1_b.size() != p.reduced ||
      p.fc2_w.rows() != p.channels || p.fc2_w.cols() != p.reduced || p.fc2_b.size() != p.channels)
    throw input_error("se block weight shapes do not match declared dimensions");
}

// Bottleneck width fixed at channels/16, matching the backbone's SE stages
// (64->4 up to 512->32).
template <class Scalar>
SeBlockParams<Scalar> init_se_block(int channels, std::mt19937_64& rng, double scale = 0.08) {
  if (channels < 16 || channels % 16 != 0)
    throw input_error("se block channels must be a positive multiple of 16");
  SeBlockParams<Scalar> p;
  p.channels = channels;
  p.reduced = channels / 16;
  p.fc1_w.resize(p.reduced, channels);
  p.fc2_w.resize(channels, p.reduced);
  p.fc1_b = VectorX<Scalar>::Zero(p.reduced);
  p.fc2_b = VectorX<Scalar>::Zero(channels);
  for (int j = 0; j < p.fc1_w.cols(); ++j)
    for (int i = 0; i < p.fc1_w.rows(); ++i)
      p.fc1_w(i, j) = static_cast<Scalar>(uniform_real(rng, -scale, scale));
  for (int j = 0; j < p.fc2_w.cols(); ++j)
    for (int i = 0; i < p.fc2_w.rows(); ++i)
      p.fc2_w(i, j) = static_cast<Scalar>(uniform_real(rng, -scale, scale));
  return p;
}

// Returns the per-channel gate values in (0, 1).
template <class Scalar>
VectorX<Scalar> se_scales(const SeBlockParams<Scalar>& params, const ChannelMap<Scalar>& feature) {
  validate_se(params);
  if (feature.channels != params.channels) throw input_error("se block channel mismatch");
  if (feature.data.rows() != feature.channels ||
      feature.data.cols() != static_cast<Eigen::Index>(feature.height) * feature.width)
    throw input_error("channel map shape mismatch");

  const VectorX<Scalar> pooled = feature.data.rowwise().mean();
  const VectorX<Scalar> hidden =
      ((params.fc1_w * pooled + params.fc1_b).array().max(Scalar(0))).matrix();
  return sigmoid<Scalar>(params.fc2_w * hidden + params.fc2_b);
}

template <class Scalar>
ChannelMap<Scalar> se_forward(const SeBlockParams<Scalar>& params, const ChannelMap<Scalar>& feature) {
  const VectorX<Scalar> s = se_scales(params, feature);
  ChannelMap<Scalar> out = feature;
  out.data = feature.data.array().colwise() * s.array();
  return out;
}

}  // namespace textdet
