#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "textdet/config.hpp"
#include "textdet/errors.hpp"
#include "textdet/svg.hpp"
#include "textdet/trainer.hpp"

using namespace textdet;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/textdet_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  std::string read() const {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
};

template <class M>
bool mat_eq(const M& a, const M& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

bool params_equal(const DecoderParams<double>& a, const DecoderParams<double>& b) {
  return a.lstm.input_dim == b.lstm.input_dim && a.lstm.hidden_dim == b.lstm.hidden_dim &&
         mat_eq(a.lstm.w_ih, b.lstm.w_ih) && mat_eq(a.lstm.w_hh, b.lstm.w_hh) &&
         mat_eq(a.lstm.bias, b.lstm.bias) && mat_eq(a.coord_w, b.coord_w) &&
         mat_eq(a.coord_b, b.coord_b) && mat_eq(a.stop_w, b.stop_w) && mat_eq(a.stop_b, b.stop_b);
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.seed = 7;
  c.ribbons = 12;
  c.hidden_dim = 16;
  c.epochs = 3;
  c.max_steps = 10;
  c.ribbon.subsamples = 4;
  return c;
}

}  // namespace

TEST_CASE("ribbons are valid, bounded, and descriptor-complete") {
  std::mt19937_64 rng(21);
  RibbonConfig config;
  for (int i = 0; i < 30; ++i) {
    const SyntheticRibbon r = make_ribbon(rng, config);

    CHECK(is_simple(r.outline));
    CHECK(r.gt.pair_count() >= 2);
    CHECK(r.gt.pair_count() <= 7);
    CHECK(bend_pair_count(r.bend) == r.gt.pair_count());
    CHECK((r.family == 0 || r.family == 1));

    // Descriptor: 49 occupancy fractions in [0, 1], some mass present.
    REQUIRE(r.feature.size() == 49);
    double mass = 0.0;
    for (double v : r.feature) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      mass += v;
    }
    CHECK(mass > 0.0);

    // Proposal box bounds the outline tightly.
    double xmin = 1e18, xmax = -1e18, ymin = 1e18, ymax = -1e18;
    for (int v = 0; v < r.outline.size(); ++v) {
      xmin = std::min(xmin, r.outline[v].x());
      xmax = std::max(xmax, r.outline[v].x());
      ymin = std::min(ymin, r.outline[v].y());
      ymax = std::max(ymax, r.outline[v].y());
    }
    CHECK(r.proposal.x_a == doctest::Approx(0.5 * (xmin + xmax)));
    CHECK(r.proposal.y_a == doctest::Approx(0.5 * (ymin + ymax)));
    CHECK(r.proposal.w_a == doctest::Approx(xmax - xmin));
    CHECK(r.proposal.h_a == doctest::Approx(ymax - ymin));

    // Targets are the normalized ground-truth pairs.
    const std::vector<double> expect = normalize_targets(r.gt, r.proposal);
    REQUIRE(r.targets.size() == expect.size());
    for (size_t j = 0; j < expect.size(); ++j)
      CHECK(r.targets[j] == doctest::Approx(expect[j]).epsilon(1e-12));

    // Ground-truth pairs sit on the dense boundaries.
    const int k = r.gt.pair_count();
    const int n = static_cast<int>(r.top_pts.size());
    for (int j = 0; j < k; ++j) {
      const int idx = j * (n - 1) / (k - 1);
      CHECK((r.gt.pairs[static_cast<size_t>(j)].top - r.top_pts[static_cast<size_t>(idx)]).norm() <
            1e-12);
      CHECK((r.gt.pairs[static_cast<size_t>(j)].bottom -
             r.bottom_pts[static_cast<size_t>(idx)]).norm() < 1e-12);
    }
  }
}

TEST_CASE("bend bins map to pair counts with gaps between bins") {
  CHECK(bend_pair_count(0.0) == 2);
  std::mt19937_64 rng(22);
  for (int k = 2; k <= 7; ++k)
    for (int i = 0; i < 20; ++i) CHECK(bend_pair_count(sample_bend_for_pairs(k, rng)) == k);
}

TEST_CASE("sine-only configs stay within the gentle-bend bins") {
  std::mt19937_64 rng(23);
  RibbonConfig config;
  config.arcs = false;
  for (int i = 0; i < 40; ++i) {
    const SyntheticRibbon r = make_ribbon(rng, config);
    CHECK(r.family == 1);
    CHECK(r.bend <= 0.10);
    CHECK(r.gt.pair_count() <= 3);
    CHECK(is_simple(r.outline));
  }
}

TEST_CASE("fixed_pair_targets endpoints agree with the adaptive ground truth") {
  std::mt19937_64 rng(24);
  const SyntheticRibbon r = make_ribbon(rng);
  const std::vector<double> fixed = fixed_pair_targets(r, 7);
  REQUIRE(fixed.size() == 28);
  const std::vector<double> adaptive = normalize_targets(r.gt, r.proposal);
  // First pair and last pair coincide: both sample the boundary ends.
  for (int j = 0; j < 4; ++j) {
    CHECK(fixed[static_cast<size_t>(j)] == doctest::Approx(adaptive[static_cast<size_t>(j)]));
    CHECK(fixed[static_cast<size_t>(24 + j)] ==
          doctest::Approx(adaptive[adaptive.size() - 4 + static_cast<size_t>(j)]));
  }
}

TEST_CASE("occupancy descriptor sees full and empty cells") {
  // A polygon covering the box exactly gives all ones.
  const Polygon square = make_polygon({{0, 0}, {70, 0}, {70, 70}, {0, 70}});
  const ProposalBox box{35, 35, 70, 70};
  const std::vector<double> full = occupancy_descriptor(square, box, 7, 4);
  REQUIRE(full.size() == 49);
  for (double v : full) CHECK(v == doctest::Approx(1.0));

  // A polygon covering the left half splits columns cleanly.
  const Polygon half = make_polygon({{0, 0}, {35, 0}, {35, 70}, {0, 70}});
  const std::vector<double> left = occupancy_descriptor(half, box, 7, 4);
  for (int row = 0; row < 7; ++row) {
    for (int col = 0; col < 3; ++col) CHECK(left[static_cast<size_t>(row * 7 + col)] == doctest::Approx(1.0));
    CHECK(left[static_cast<size_t>(row * 7 + 3)] == doctest::Approx(0.5));
    for (int col = 4; col < 7; ++col) CHECK(left[static_cast<size_t>(row * 7 + col)] == doctest::Approx(0.0));
  }

  // Row 0 is the top of the image (minimum y).
  const Polygon top_half = make_polygon({{0, 0}, {70, 0}, {70, 35}, {0, 35}});
  const std::vector<double> top = occupancy_descriptor(top_half, box, 7, 4);
  CHECK(top[0] == doctest::Approx(1.0));
  CHECK(top[48] == doctest::Approx(0.0));
}

TEST_CASE("training runs are bit-identical across repeats") {
  const TrainConfig config = tiny_config();
  const TrainResult a = train_toy(config);
  const TrainResult b = train_toy(config);
  CHECK(params_equal(a.params, b.params));
  REQUIRE(a.history.size() == b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].total == b.history[i].total);
    CHECK(a.history[i].points == b.history[i].points);
    CHECK(a.history[i].stop == b.history[i].stop);
    CHECK(a.history[i].lr == b.history[i].lr);
  }
  CHECK(a.held_out.point_error == b.held_out.point_error);
  CHECK(a.held_out.stop_accuracy == b.held_out.stop_accuracy);
  CHECK(a.train_count == 10);  // 12 ribbons, leading 80% rounded
  CHECK(a.eval_count == 2);
}

TEST_CASE("default run: loss strictly decreases over the first five epochs") {
  const TrainResult run = train_toy(TrainConfig{});
  REQUIRE(run.history.size() >= 5);
  for (size_t e = 1; e < 5; ++e) CHECK(run.history[e].total < run.history[e - 1].total);
}

TEST_CASE("training writes the per-epoch csv") {
  TempFile csv("loss.csv");
  TrainConfig config = tiny_config();
  config.csv_path = csv.path;
  const TrainResult result = train_toy(config);
  const std::string text = csv.read();
  CHECK(text.find("epoch,lr,total,cls,bbox,points,stop") == 0);
  // Header plus one line per epoch.
  long lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  CHECK(lines == static_cast<long>(result.history.size()) + 1);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  TempFile file("ckpt.json");
  std::mt19937_64 rng(25);
  const DecoderParams<double> params = init_decoder<double>(49, 24, rng);
  save_checkpoint(file.path, params);
  const DecoderParams<double> back = load_checkpoint(file.path);
  CHECK(params_equal(params, back));
}

TEST_CASE("checkpoint loading validates the payload") {
  CHECK_THROWS_AS(load_checkpoint("/tmp/textdet_test_missing_ckpt.json"), input_error);

  TempFile file("bad_ckpt.json");
  {
    std::ofstream out(file.path);
    out << "{\"format\": \"something-else\", \"version\": 1}";
  }
  CHECK_THROWS_AS(load_checkpoint(file.path), input_error);

  TempFile trunc("trunc_ckpt.json");
  {
    std::mt19937_64 rng(26);
    const DecoderParams<double> params = init_decoder<double>(8, 4, rng);
    save_checkpoint(trunc.path, params);
    std::ifstream in(trunc.path);
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    in.close();
    const size_t pos = text.find("\"hidden_dim\":4");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 14, "\"hidden_dim\":6");  // shapes no longer match
    std::ofstream out(trunc.path);
    out << text;
  }
  CHECK_THROWS_AS(load_checkpoint(trunc.path), input_error);
}

TEST_CASE("evaluate_decoder charges a full error for immediate stops") {
  std::mt19937_64 rng(27);
  DecoderParams<double> params = init_decoder<double>(49, 8, rng);
  params.stop_b << -10.0, 10.0;  // stops before the first pair every time
  const std::vector<SyntheticRibbon> ribbons = make_ribbons(5, rng);
  const EvalMetrics m = evaluate_decoder(params, ribbons, 16);
  CHECK(m.count == 5);
  CHECK(m.point_error == doctest::Approx(1.0));
  CHECK(m.stop_accuracy == doctest::Approx(0.0));
}

TEST_CASE("train_config_from maps config keys") {
  const Config config = Config::from_string(
      "seed = 11\n"
      "ribbons = 40\n"
      "hidden_dim = 32\n"
      "epochs = 5\n"
      "batch_size = 4\n"
      "lr = 0.02\n"
      "lambda2 = 0.5\n"
      "fixed_pairs = 7\n"
      "arcs = false\n"
      "grid = 7\n"
      "subsamples = 6\n"
      "min_length = 90\n");
  const TrainConfig tc = train_config_from(config);
  CHECK(tc.seed == 11);
  CHECK(tc.ribbons == 40);
  CHECK(tc.hidden_dim == 32);
  CHECK(tc.epochs == 5);
  CHECK(tc.batch_size == 4);
  CHECK(tc.lr == doctest::Approx(0.02));
  CHECK(tc.lambdas.l2 == doctest::Approx(0.5));
  CHECK(tc.lambdas.l3 == doctest::Approx(1.0));  // untouched default
  CHECK(tc.fixed_pairs == 7);
  CHECK_FALSE(tc.ribbon.arcs);
  CHECK(tc.ribbon.sines);
  CHECK(tc.ribbon.subsamples == 6);
  CHECK(tc.ribbon.min_length == doctest::Approx(90.0));
}

TEST_CASE("config parsing rejects bad values where defaults exist") {
  const Config config = Config::from_string("epochs = soon\n");
  CHECK_THROWS_AS(train_config_from(config), input_error);
}

TEST_CASE("svg output draws rings, rungs, and dots") {
  AdaptiveTextRegion gt;
  gt.pairs = {{{0, 0}, {0, 10}}, {{20, 0}, {20, 10}}};
  AdaptiveTextRegion det;
  det.pairs.clear();
  for (int i = 0; i < 7; ++i)
    det.pairs.push_back({{i * 10.0, 30.0}, {i * 10.0, 40.0}});

  const std::string svg = svg_document({gt}, {det});
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("viewBox") != std::string::npos);

  // 2 polygons, 2 + 7 rungs, 4 + 14 dots.
  size_t polygons = 0, lines = 0, dots = 0;
  for (size_t pos = 0; (pos = svg.find("<polygon", pos)) != std::string::npos; ++pos) ++polygons;
  for (size_t pos = 0; (pos = svg.find("<line", pos)) != std::string::npos; ++pos) ++lines;
  for (size_t pos = 0; (pos = svg.find("<circle", pos)) != std::string::npos; ++pos) ++dots;
  CHECK(polygons == 2);
  CHECK(lines == 9);
  CHECK(dots == 18);

  // Empty input still renders a valid document.
  const std::string empty = svg_document({}, {});
  CHECK(empty.find("<svg") != std::string::npos);
  CHECK(empty.find("</svg>") != std::string::npos);
}
