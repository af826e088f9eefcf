#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "textdet/errors.hpp"
#include "textdet/loss.hpp"
#include "textdet/rng.hpp"

using namespace textdet;

TEST_CASE("smooth_l1 exact values") {
  CHECK(smooth_l1(0.0) == 0.0);
  CHECK(smooth_l1(0.5) == doctest::Approx(0.125));
  CHECK(smooth_l1(-0.5) == doctest::Approx(0.125));
  CHECK(smooth_l1(1.0) == doctest::Approx(0.5));
  CHECK(smooth_l1(-1.0) == doctest::Approx(0.5));
  CHECK(smooth_l1(2.0) == doctest::Approx(1.5));
  CHECK(smooth_l1(-3.0) == doctest::Approx(2.5));
}

TEST_CASE("smooth_l1 is continuous and its gradient matches") {
  // Value and slope agree across the |x| = 1 seam.
  const double eps = 1e-9;
  CHECK(smooth_l1(1.0 + eps) - smooth_l1(1.0 - eps) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(smooth_l1_grad(0.3) == doctest::Approx(0.3));
  CHECK(smooth_l1_grad(-0.7) == doctest::Approx(-0.7));
  CHECK(smooth_l1_grad(1.5) == doctest::Approx(1.0));
  CHECK(smooth_l1_grad(-2.5) == doctest::Approx(-1.0));

  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const double x = uniform_real(rng, -3.0, 3.0);
    const double h = 1e-6;
    const double numeric = (smooth_l1(x + h) - smooth_l1(x - h)) / (2 * h);
    CHECK(smooth_l1_grad(x) == doctest::Approx(numeric).epsilon(1e-4));
  }
}

TEST_CASE("cls_log_loss picks the true class and floors the probability") {
  CHECK(cls_log_loss({0.25, 0.75}, 1) == doctest::Approx(-std::log(0.75)));
  CHECK(cls_log_loss({0.25, 0.75}, 0) == doctest::Approx(-std::log(0.25)));
  CHECK(cls_log_loss({1.0, 0.0}, 1) == doctest::Approx(-std::log(1e-12)));
  CHECK_THROWS_AS(cls_log_loss({0.5, 0.5}, 2), input_error);
  CHECK_THROWS_AS(cls_log_loss({0.5, 0.5}, -1), input_error);
}

TEST_CASE("bbox_targets matches the closed form") {
  const ProposalBox proposal{10.0, 20.0, 4.0, 8.0};
  const ProposalBox gt{12.0, 16.0, 8.0, 4.0};
  const BboxTarget v = bbox_targets(proposal, gt);
  CHECK(v.v_x == doctest::Approx(0.5));             // (12-10)/4
  CHECK(v.v_y == doctest::Approx(-0.5));            // (16-20)/8
  CHECK(v.v_w == doctest::Approx(std::log(2.0)));   // log(8/4)
  CHECK(v.v_h == doctest::Approx(std::log(0.5)));   // log(4/8)

  // Identical boxes give all-zero targets.
  const BboxTarget zero = bbox_targets(proposal, proposal);
  CHECK(zero.v_x == 0.0);
  CHECK(zero.v_y == 0.0);
  CHECK(zero.v_w == 0.0);
  CHECK(zero.v_h == 0.0);

  CHECK_THROWS_AS(bbox_targets({0, 0, 0, 4}, gt), input_error);
  CHECK_THROWS_AS(bbox_targets(proposal, {0, 0, 4, -1}), input_error);
}

namespace {

ProposalPrediction random_pred(std::mt19937_64& rng, int steps) {
  ProposalPrediction pred;
  const double a = uniform_real(rng, 0.05, 0.95);
  pred.cls_prob = {a, 1.0 - a};
  for (double& b : pred.bbox) b = uniform_real(rng, -1.0, 1.0);
  for (int s = 0; s < steps; ++s) {
    for (int k = 0; k < 4; ++k) pred.point_coords.push_back(uniform_real(rng, -1.0, 1.0));
    const double q = uniform_real(rng, 0.05, 0.95);
    pred.stop_probs.push_back({q, 1.0 - q});
  }
  return pred;
}

ProposalTarget random_target(std::mt19937_64& rng, int steps) {
  ProposalTarget gt;
  gt.text_label = 1;
  for (double& b : gt.bbox) b = uniform_real(rng, -1.0, 1.0);
  for (int s = 0; s < steps; ++s) {
    for (int k = 0; k < 4; ++k) gt.point_coords.push_back(uniform_real(rng, -1.0, 1.0));
    gt.stop_labels.push_back(s + 1 == steps ? 1 : 0);
  }
  return gt;
}

}  // namespace

TEST_CASE("multitask loss satisfies its weighting identity") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int steps = 2 + static_cast<int>(uniform_index(rng, 5));
    const ProposalPrediction pred = random_pred(rng, steps);
    const ProposalTarget gt = random_target(rng, steps);
    const Lambdas lambdas{uniform_real(rng, 0.1, 3.0), uniform_real(rng, 0.1, 3.0),
                          uniform_real(rng, 0.1, 3.0)};
    const LossBreakdown loss = multitask_loss(pred, gt, lambdas);
    const double recomposed =
        loss.cls + lambdas.l1 * loss.bbox + lambdas.l2 * loss.points + lambdas.l3 * loss.stop;
    CHECK(loss.total == doctest::Approx(recomposed).epsilon(1e-12));
    CHECK(loss.cls >= 0.0);
    CHECK(loss.bbox >= 0.0);
    CHECK(loss.points >= 0.0);
    CHECK(loss.stop >= 0.0);
  }
}

TEST_CASE("background proposals contribute only classification") {
  std::mt19937_64 rng(23);
  const ProposalPrediction pred = random_pred(rng, 4);
  ProposalTarget gt = random_target(rng, 4);
  gt.text_label = 0;
  const LossBreakdown loss = multitask_loss(pred, gt, {2.0, 3.0, 4.0});
  CHECK(loss.bbox == 0.0);
  CHECK(loss.points == 0.0);
  CHECK(loss.stop == 0.0);
  CHECK(loss.total == doctest::Approx(-std::log(pred.cls_prob[0])));
}

TEST_CASE("multitask loss components match direct sums") {
  ProposalPrediction pred;
  pred.cls_prob = {0.2, 0.8};
  pred.bbox = {0.5, 0.0, 0.0, 0.0};                       // smooth_l1(0.5) = 0.125
  pred.point_coords = {2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};  // smooth_l1(2) = 1.5
  pred.stop_probs = {{0.9, 0.1}, {0.3, 0.7}};

  ProposalTarget gt;
  gt.text_label = 1;
  gt.bbox = {0.0, 0.0, 0.0, 0.0};
  gt.point_coords.assign(8, 0.0);
  gt.stop_labels = {0, 1};

  const LossBreakdown loss = multitask_loss(pred, gt, {1.0, 1.0, 1.0});
  CHECK(loss.cls == doctest::Approx(-std::log(0.8)));
  CHECK(loss.bbox == doctest::Approx(0.125));
  CHECK(loss.points == doctest::Approx(1.5));
  CHECK(loss.stop == doctest::Approx(-std::log(0.9) - std::log(0.7)));
  CHECK(loss.points_mean == doctest::Approx(1.5 / 8.0));
  CHECK(loss.stop_mean == doctest::Approx((-std::log(0.9) - std::log(0.7)) / 2.0));
}

TEST_CASE("multitask loss rejects mismatched supervision") {
  std::mt19937_64 rng(29);
  const ProposalPrediction pred = random_pred(rng, 3);

  ProposalTarget wrong_points = random_target(rng, 3);
  wrong_points.point_coords.push_back(0.0);
  CHECK_THROWS_AS(multitask_loss(pred, wrong_points, {}), input_error);

  ProposalTarget wrong_stops = random_target(rng, 3);
  wrong_stops.stop_labels.push_back(1);
  CHECK_THROWS_AS(multitask_loss(pred, wrong_stops, {}), input_error);

  // Background targets never look at the regression payload.
  ProposalTarget background = random_target(rng, 5);
  background.text_label = 0;
  CHECK_NOTHROW(multitask_loss(pred, background, {}));
}
