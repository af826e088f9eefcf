#include <doctest.h>

#include <random>
#include <vector>

#include "textdet/decoder.hpp"
#include "textdet/errors.hpp"

using namespace textdet;

namespace {

VectorX<double> random_feature(std::mt19937_64& rng, int dim) {
  VectorX<double> f(dim);
  for (int i = 0; i < dim; ++i) f(i) = uniform_real(rng, 0.0, 1.0);
  return f;
}

DecoderTargets<double> random_targets(std::mt19937_64& rng, int k) {
  DecoderTargets<double> t;
  for (int i = 0; i < k; ++i) {
    Vector4<double> c;
    for (int j = 0; j < 4; ++j) c(j) = uniform_real(rng, -1.0, 1.0);
    t.coords.push_back(c);
  }
  return t;
}

}  // namespace

TEST_CASE("a dominant stop bias halts before any pair") {
  std::mt19937_64 rng(1);
  DecoderParams<double> p = init_decoder<double>(8, 16, rng);
  p.stop_b << -10.0, 10.0;
  const DecoderOutput<double> out = decoder_forward(p, random_feature(rng, 8));
  CHECK(out.steps.empty());
  CHECK(out.stop_step == 0);
}

TEST_CASE("a suppressed stop class runs out the budget") {
  std::mt19937_64 rng(2);
  DecoderParams<double> p = init_decoder<double>(8, 16, rng);
  p.stop_b << 10.0, -10.0;
  const DecoderOutput<double> out = decoder_forward(p, random_feature(rng, 8), 9);
  REQUIRE(out.steps.size() == 9);
  CHECK(out.stop_step == 9);
  for (const DecoderStep<double>& s : out.steps) CHECK(s.stop_prob < 0.5);
}

TEST_CASE("stop_step always equals the emitted pair count") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    // Large biases make both early and late stops common across draws.
    DecoderParams<double> p = init_decoder<double>(6, 8, rng, 0.5);
    p.stop_b(0) = uniform_real(rng, -2.0, 2.0);
    p.stop_b(1) = uniform_real(rng, -2.0, 2.0);
    const DecoderOutput<double> out = decoder_forward(p, random_feature(rng, 6), 12);
    CHECK(out.stop_step == static_cast<int>(out.steps.size()));
    CHECK(out.stop_step <= 12);
  }
}

TEST_CASE("decoding is deterministic") {
  std::mt19937_64 rng(4);
  const DecoderParams<double> p = init_decoder<double>(10, 24, rng);
  const VectorX<double> f = random_feature(rng, 10);
  const DecoderOutput<double> a = decoder_forward(p, f);
  const DecoderOutput<double> b = decoder_forward(p, f);
  REQUIRE(a.steps.size() == b.steps.size());
  for (size_t i = 0; i < a.steps.size(); ++i) {
    CHECK((a.steps[i].coords - b.steps[i].coords).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(a.steps[i].stop_prob == b.steps[i].stop_prob);
  }
}

TEST_CASE("decoder_forward validates its inputs") {
  std::mt19937_64 rng(5);
  const DecoderParams<double> p = init_decoder<double>(8, 16, rng);
  CHECK_THROWS_AS(decoder_forward(p, random_feature(rng, 7)), input_error);
  CHECK_THROWS_AS(decoder_forward(p, random_feature(rng, 8), 1), input_error);

  DecoderParams<double> bad = p;
  bad.coord_w.resize(3, 16);
  CHECK_THROWS_AS(decoder_forward(bad, random_feature(rng, 8)), input_error);
}

TEST_CASE("training forward shapes and loss identity") {
  std::mt19937_64 rng(6);
  const DecoderParams<double> p = init_decoder<double>(8, 16, rng);
  const VectorX<double> f = random_feature(rng, 8);
  const DecoderTargets<double> targets = random_targets(rng, 5);
  const Lambdas lambdas{1.0, 0.7, 1.3};
  const DecoderTrace<double> trace = decoder_training_forward(p, f, targets, lambdas);
  CHECK(trace.cells.size() == 6);       // k continue steps + 1 stop step
  CHECK(trace.coords.size() == 5);
  CHECK(trace.stop_probs.size() == 6);
  CHECK(trace.total ==
        doctest::Approx(lambdas.l2 * trace.points_raw + lambdas.l3 * trace.stop_raw));
  CHECK(trace.points_raw >= 0.0);
  CHECK(trace.stop_raw > 0.0);  // log loss of a softmax never reaches zero

  DecoderTargets<double> empty;
  CHECK_THROWS_AS(decoder_training_forward(p, f, empty, lambdas), input_error);
}

TEST_CASE("perfectly matched coordinates leave no gradient when stop is unweighted") {
  std::mt19937_64 rng(7);
  const DecoderParams<double> p = init_decoder<double>(8, 12, rng);
  const VectorX<double> f = random_feature(rng, 8);

  // Harvest the decoder's own outputs as targets: the coordinate residuals
  // vanish, and lambda3 = 0 silences the stop path.
  DecoderTargets<double> probe = random_targets(rng, 4);
  const DecoderTrace<double> trace = decoder_training_forward(p, f, probe, {1, 1, 1});
  DecoderTargets<double> exact;
  exact.coords = trace.coords;

  const Lambdas lambdas{1.0, 1.0, 0.0};
  DecoderTrace<double> check;
  const DecoderGrads<double> g = decoder_backward(p, f, exact, lambdas, &check);
  CHECK(check.points_raw == 0.0);
  CHECK(check.total == 0.0);
  CHECK(g.w_ih.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(g.w_hh.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(g.bias.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(g.coord_w.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(g.coord_b.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(g.stop_w.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(g.stop_b.lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("gradients are linear in the point weight") {
  std::mt19937_64 rng(8);
  const DecoderParams<double> p = init_decoder<double>(8, 12, rng);
  const VectorX<double> f = random_feature(rng, 8);
  const DecoderTargets<double> targets = random_targets(rng, 3);

  // With the stop path silenced the whole backward pass is linear in
  // lambda2, and doubling is exact in floating point.
  const DecoderGrads<double> g1 = decoder_backward(p, f, targets, {1.0, 1.0, 0.0});
  const DecoderGrads<double> g2 = decoder_backward(p, f, targets, {1.0, 2.0, 0.0});
  CHECK((g2.w_ih - 2.0 * g1.w_ih).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((g2.w_hh - 2.0 * g1.w_hh).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((g2.bias - 2.0 * g1.bias).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((g2.coord_w - 2.0 * g1.coord_w).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((g2.coord_b - 2.0 * g1.coord_b).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((g2.stop_w - 2.0 * g1.stop_w).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((g2.stop_b - 2.0 * g1.stop_b).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("numeric gradient check passes across seeds") {
  for (const unsigned seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    const DecoderParams<double> p = init_decoder<double>(8, 8, rng);
    const VectorX<double> f = random_feature(rng, 8);
    const DecoderTargets<double> targets = random_targets(rng, 3);
    const GradCheckReport report = grad_check(p, f, targets, {1.0, 1.0, 1.0});
    CAPTURE(seed);
    CAPTURE(report.worst_param);
    CHECK(report.max_rel_error < 1e-4);
    CHECK(report.params_checked > 0);
  }
}

TEST_CASE("the gradient check catches a corrupted entry") {
  std::mt19937_64 rng(9);
  const DecoderParams<double> p = init_decoder<double>(6, 8, rng);
  const VectorX<double> f = random_feature(rng, 6);
  const DecoderTargets<double> targets = random_targets(rng, 2);
  const Lambdas lambdas{1.0, 1.0, 1.0};

  DecoderGrads<double> corrupted = decoder_backward(p, f, targets, lambdas);
  corrupted.w_hh(5, 2) += 0.5;
  const GradCheckReport report = grad_check(p, f, targets, lambdas, 1e-5, &corrupted);
  CHECK(report.max_rel_error > 1e-2);
  CHECK(report.worst_param == "w_hh[" + std::to_string(5 + 2 * 32) + "]");
}

TEST_CASE("grad_check rejects out-of-range epsilon") {
  std::mt19937_64 rng(10);
  const DecoderParams<double> p = init_decoder<double>(6, 8, rng);
  const VectorX<double> f = random_feature(rng, 6);
  const DecoderTargets<double> targets = random_targets(rng, 2);
  CHECK_THROWS_AS(grad_check(p, f, targets, {}, 1e-8), input_error);
  CHECK_THROWS_AS(grad_check(p, f, targets, {}, 1e-2), input_error);
}
