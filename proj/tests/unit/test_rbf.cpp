#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "swingid/rbf.hpp"

using namespace swingid;
using namespace swingid::rbf;
using features::FeatureVector;

namespace {

Eigen::MatrixXd centers_on_axis(std::initializer_list<double> xs) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(xs.size()), 12);
  Eigen::Index i = 0;
  for (double x : xs) c(i++, 0) = x;
  return c;
}

RbfModel hand_model(const Eigen::MatrixXd& centers, const Eigen::VectorXd& widths,
                    const Eigen::VectorXd& weights, double bias) {
  RbfModel m;
  m.centers = centers;
  m.widths = widths;
  m.weights = weights;
  m.bias = bias;
  return m;
}

}  // namespace

TEST_CASE("enum names round trip") {
  for (auto h : {WidthHeuristic::nearest_center, WidthHeuristic::global}) {
    CHECK(parse_width_heuristic(to_string(h)) == h);
  }
  for (auto i : {CenterInit::random_points, CenterInit::farthest_first}) {
    CHECK(parse_center_init(to_string(i)) == i);
  }
  for (auto s : {OutputSolver::pseudo_inverse, OutputSolver::gradient}) {
    CHECK(parse_output_solver(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_width_heuristic("widest"), ParseError);
}

TEST_CASE("k-means finds the means of two separated clouds") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0, 0.05);
  Eigen::MatrixXd pts(20, 12);
  for (int i = 0; i < 20; ++i) {
    for (int k = 0; k < 12; ++k) pts(i, k) = (i < 10 ? -1.0 : 1.0) + n(rng);
  }
  const Eigen::RowVectorXd mean_a = pts.topRows(10).colwise().mean();
  const Eigen::RowVectorXd mean_b = pts.bottomRows(10).colwise().mean();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = place_centers(pts, 2, seed, 100);
    CHECK(c.converged);
    CHECK(c.epochs <= 3);
    const bool order = c.centers(0, 0) < 0;
    CHECK((c.centers.row(order ? 0 : 1) - mean_a).norm() < 1e-12);
    CHECK((c.centers.row(order ? 1 : 0) - mean_b).norm() < 1e-12);
  }
}

TEST_CASE("h = N puts one center on every point in one epoch") {
  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd pts(6, 12);
  for (int i = 0; i < 6; ++i) {
    for (int k = 0; k < 12; ++k) pts(i, k) = u(rng);
  }
  const auto c = place_centers(pts, 6, 3, 100);
  CHECK(c.converged);
  CHECK(c.epochs == 1);
  for (int i = 0; i < 6; ++i) {
    bool found = false;
    for (int j = 0; j < 6; ++j) found = found || (c.centers.row(j) - pts.row(i)).norm() == 0.0;
    CHECK(found);
  }
}

TEST_CASE("identical points give flagged duplicate centers") {
  const Eigen::MatrixXd pts = Eigen::MatrixXd::Constant(5, 12, 0.3);
  const auto c = place_centers(pts, 2, 1, 100);
  CHECK(c.duplicate_centers);
  CHECK(c.converged);
}

TEST_CASE("more centers never raise the clustering objective on nested data") {
  // Farthest-first initialisation makes the comparison deterministic.
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd pts(14, 12);
  for (int i = 0; i < 14; ++i) {
    for (int k = 0; k < 12; ++k) pts(i, k) = u(rng) + (i % 3) * 2.0;
  }
  auto objective = [&](const Clustering& c) {
    double s = 0;
    for (int i = 0; i < 14; ++i) s += (pts.row(i) - c.centers.row(c.assignment[i])).squaredNorm();
    return s;
  };
  double prev = 1e300;
  for (int h = 1; h <= 8; ++h) {
    const double cur = objective(place_centers(pts, h, 0, 100, CenterInit::farthest_first));
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("k-means argument checks") {
  const Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(3, 12);
  CHECK_THROWS_AS(place_centers(pts, 0, 1, 10), InvalidArgument);
  CHECK_THROWS_AS(place_centers(pts, 4, 1, 10), InvalidArgument);
  CHECK_THROWS_AS(place_centers(pts, 2, 1, 0), InvalidArgument);
}

TEST_CASE("nearest-center widths") {
  auto w = set_widths(centers_on_axis({0, 2}), WidthHeuristic::nearest_center);
  CHECK(w.sigma(0) == 2);
  CHECK(w.sigma(1) == 2);
  w = set_widths(centers_on_axis({0, 1, 5}), WidthHeuristic::nearest_center);
  CHECK(w.sigma(0) == 1);
  CHECK(w.sigma(1) == 1);
  CHECK(w.sigma(2) == 4);
  CHECK(w.warnings.empty());
  w = set_widths(centers_on_axis({3, 3}), WidthHeuristic::nearest_center);
  CHECK(w.sigma(0) == kWidthFloor);
  CHECK(w.warnings.size() == 2);
}

TEST_CASE("global width heuristic") {
  const auto w = set_widths(centers_on_axis({0, 1, 5}), WidthHeuristic::global);
  for (int j = 0; j < 3; ++j) CHECK(w.sigma(j) == doctest::Approx(5 / std::sqrt(6.0)));
  const Eigen::MatrixXd one = centers_on_axis({0});
  const Eigen::MatrixXd training = centers_on_axis({1, -3});
  CHECK(set_widths(one, WidthHeuristic::global, &training).sigma(0) == 2);
}

TEST_CASE("identity activations are solved exactly") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(5, 5);
  const Eigen::VectorXd t = (Eigen::VectorXd(5) << 1, 0, 1, 1, 0).finished();
  CHECK((solve_output_weights(a, t) - t).norm() < 1e-15);
}

TEST_CASE("conflicting duplicate rows are fitted with the average") {
  Eigen::MatrixXd a(2, 2);
  a << 0.7, 1, 0.7, 1;
  const Eigen::VectorXd t = (Eigen::VectorXd(2) << 0, 1).finished();
  const Eigen::VectorXd fitted = a * solve_output_weights(a, t);
  CHECK(fitted(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fitted(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("known weights are recovered from their targets") {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a(14, 5);
    for (int i = 0; i < 14; ++i) {
      for (int j = 0; j < 5; ++j) a(i, j) = u(rng);
    }
    Eigen::VectorXd w(5);
    for (int j = 0; j < 5; ++j) w(j) = u(rng);
    CHECK((solve_output_weights(a, a * w) - w).norm() < 1e-8);
  }
}

TEST_CASE("gradient solver approaches the least-squares solution") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd a(14, 3);
  for (int i = 0; i < 14; ++i) {
    for (int j = 0; j < 3; ++j) a(i, j) = u(rng);
  }
  Eigen::VectorXd t(14);
  for (int i = 0; i < 14; ++i) t(i) = u(rng) > 0 ? 1 : 0;
  const auto exact = solve_output_weights(a, t);
  const auto g = solve_output_weights_gradient(a, t, 100000, 1e-15);
  CHECK(g.converged);
  CHECK((g.weights - exact).norm() < 1e-4);
  const auto capped = solve_output_weights_gradient(a, t, 1, 0);
  CHECK(capped.epochs == 1);
  CHECK_FALSE(capped.converged);
}

TEST_CASE("design matrix has a trailing bias column") {
  Eigen::MatrixXd pts = centers_on_axis({0, 2});
  const auto d = design_matrix(pts, centers_on_axis({0}), Eigen::VectorXd::Constant(1, 1.0));
  CHECK(d.cols() == 2);
  CHECK(d(0, 0) == 1.0);
  CHECK(d(1, 0) == doctest::Approx(std::exp(-2.0)));
  CHECK(d(0, 1) == 1.0);
  CHECK(d(1, 1) == 1.0);
}

TEST_CASE("scores at a center, far away, and on a tie") {
  const auto c = centers_on_axis({-10, 10});
  const Eigen::VectorXd sigma = Eigen::VectorXd::Constant(2, 1.0);
  const auto m = hand_model(c, sigma, (Eigen::VectorXd(2) << 0.3, -0.3).finished(), 0.5);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(12);
  x(0) = -10;
  CHECK(score_normalized(m, x) == doctest::Approx(0.8).epsilon(1e-12));
  x(0) = 0;
  CHECK(score_normalized(m, x) == 0.5);
  CHECK(decide(score_normalized(m, x)) == Label::bad);
  x(0) = 1e3;
  CHECK(score_normalized(m, x) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(decide(0.4999) == Label::good);
  CHECK_THROWS_AS(score_normalized(m, Eigen::VectorXd::Zero(3)), InvalidArgument);
  CHECK_THROWS_AS(score_normalized(RbfModel{}, x), ModelError);
}

TEST_CASE("scores stay within bias +- sum of absolute weights") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const int h = 2 + static_cast<int>(rng() % 5);
    Eigen::MatrixXd c(h, 12);
    for (int j = 0; j < h; ++j) {
      for (int k = 0; k < 12; ++k) c(j, k) = u(rng);
    }
    Eigen::VectorXd w(h), s(h);
    for (int j = 0; j < h; ++j) {
      w(j) = u(rng);
      s(j) = 0.1 + std::abs(u(rng));
    }
    const auto m = hand_model(c, s, w, u(rng));
    Eigen::VectorXd x(12);
    for (int k = 0; k < 12; ++k) x(k) = u(rng);
    CHECK(std::abs(score_normalized(m, x) - m.bias) <= w.cwiseAbs().sum() + 1e-12);
  }
}

TEST_CASE("separable blobs are fitted perfectly at h = 4") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  oracle::blobs(7, 5.0, 0.2, 23, x, y);
  TrainConfig cfg;
  cfg.hidden_units = 4;
  cfg.rng_seed = 4;
  const auto model = train(x, y, cfg);
  CHECK(model.hidden_units() == 4);
  CHECK(model.training_size == 14);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(classify(model, x[i]) == y[i]);
  CHECK(model.diagnostics.clustering_converged);
}

TEST_CASE("refusal rule") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  oracle::blobs(7, 5.0, 0.2, 24, x, y);
  TrainConfig cfg;
  cfg.hidden_units = 6;
  try {
    train(x, y, cfg);
    FAIL("expected TrainingRefused");
  } catch (const TrainingRefused& e) {
    CHECK(std::string(e.what()).find("small-sample limit") != std::string::npos);
  }
  CHECK(refusal_reason(13, TrainConfig{.hidden_units = 5}).empty());
  CHECK_FALSE(refusal_reason(14, TrainConfig{.hidden_units = 6}).empty());
  CHECK_FALSE(refusal_reason(13, TrainConfig{.hidden_units = 6}).empty());
  CHECK_FALSE(refusal_reason(1, TrainConfig{.hidden_units = 2}).empty());
  CHECK_FALSE(refusal_reason(10, TrainConfig{.hidden_units = 1}).empty());
  CHECK_FALSE(refusal_reason(4, TrainConfig{.hidden_units = 4, .min_vectors_per_unit = 0}).empty());
  CHECK(refusal_reason(5, TrainConfig{.hidden_units = 4, .min_vectors_per_unit = 0}).empty());
  CHECK_THROWS_AS(train(std::vector<FeatureVector>{}, std::vector<Label>{}, cfg), InvalidArgument);
  CHECK_THROWS_AS(train(x, std::vector<Label>(3, Label::good), cfg), InvalidArgument);
}

TEST_CASE("single-class training predicts that class everywhere") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  oracle::blobs(4, 3.0, 0.5, 25, x, y);
  std::fill(y.begin(), y.end(), Label::bad);
  TrainConfig cfg;
  cfg.hidden_units = 2;
  const auto m = train(x, y, cfg);
  CHECK(m.diagnostics.single_class);
  CHECK_FALSE(m.diagnostics.warnings.empty());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 50; ++i) {
    FeatureVector f;
    for (auto& v : f.values) v = u(rng);
    CHECK(classify(m, f) == Label::bad);
  }
}

TEST_CASE("training is bitwise deterministic") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  oracle::blobs(7, 1.0, 0.6, 26, x, y);
  TrainConfig cfg;
  cfg.rng_seed = 99;
  const auto a = to_json(train(x, y, cfg)).dump();
  const auto b = to_json(train(x, y, cfg)).dump();
  CHECK(a == b);
  cfg.rng_seed = 100;
  const auto c = train(x, y, cfg);
  CHECK(c.trained());
}

TEST_CASE("trained output weights are optimal against random perturbations") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  oracle::blobs(7, 1.0, 0.8, 27, x, y);
  TrainConfig cfg;
  cfg.rng_seed = 5;
  const auto m = train(x, y, cfg);
  Eigen::MatrixXd pts(14, 12);
  for (int i = 0; i < 14; ++i) {
    pts.row(i) = to_eigen(features::apply_normalizer(m.normalizer, x[static_cast<std::size_t>(i)]));
  }
  const auto design = design_matrix(pts, m.centers, m.widths);
  Eigen::VectorXd w(m.weights.size() + 1), t(14);
  w << m.weights, m.bias;
  for (int i = 0; i < 14; ++i) t(i) = target_of(y[static_cast<std::size_t>(i)]);
  const double best = (design * w - t).squaredNorm();
  CHECK(best == doctest::Approx(m.diagnostics.training_sse));
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> u(-1e-4, 1e-4);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd p = w;
    for (Eigen::Index k = 0; k < p.size(); ++k) p(k) += u(rng);
    CHECK((design * p - t).squaredNorm() >= best - 1e-12);
  }
}

TEST_CASE("gradient solver and farthest-first options train") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  oracle::blobs(7, 5.0, 0.2, 29, x, y);
  TrainConfig cfg;
  cfg.output_solver = OutputSolver::gradient;
  cfg.center_init = CenterInit::farthest_first;
  cfg.max_epochs = 5000;
  const auto m = train(x, y, cfg);
  CHECK(m.diagnostics.output_epochs > 0);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(classify(m, x[i]) == y[i]);
  cfg.rng_seed = 1234;
  CHECK(to_json(train(x, y, cfg)).at("centers") == to_json(m).at("centers"));
}

TEST_CASE("model JSON round trip preserves predictions") {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  oracle::blobs(7, 1.0, 0.6, 30, x, y);
  const auto m = train(x, y, TrainConfig{.rng_seed = 8});
  const auto text = to_json(m).dump(2);
  const auto back = model_from_json(nlohmann::json::parse(text));
  for (const auto& f : x) CHECK(predict(back, f) == predict(m, f));
  CHECK(to_json(back).dump(2) == text);
  auto j = nlohmann::json::parse(text);
  j["format"] = "other";
  CHECK_THROWS_AS(model_from_json(j), ModelError);
  j = nlohmann::json::parse(text);
  j["version"] = 99;
  CHECK_THROWS_AS(model_from_json(j), ModelError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::object()), ModelError);
}

TEST_CASE("train config JSON round trip") {
  TrainConfig c;
  c.hidden_units = 3;
  c.rng_seed = 0xffffffffffffffffULL;
  c.width_heuristic = WidthHeuristic::global;
  const auto back = train_config_from_json(to_json(c));
  CHECK(back.hidden_units == 3);
  CHECK(back.rng_seed == c.rng_seed);
  CHECK(back.width_heuristic == WidthHeuristic::global);
}
