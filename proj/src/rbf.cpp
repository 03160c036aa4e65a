#include "swingid/rbf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>

namespace swingid::rbf {

using features::FeatureVector;
using features::kFeatureCount;

WidthHeuristic parse_width_heuristic(std::string_view name) {
  if (name == "nearest-center") return WidthHeuristic::nearest_center;
  if (name == "global") return WidthHeuristic::global;
  throw ParseError("unknown width heuristic '" + std::string(name) + "'");
}

std::string_view to_string(WidthHeuristic h) {
  return h == WidthHeuristic::global ? "global" : "nearest-center";
}

CenterInit parse_center_init(std::string_view name) {
  if (name == "random-points") return CenterInit::random_points;
  if (name == "farthest-first") return CenterInit::farthest_first;
  throw ParseError("unknown center initialization '" + std::string(name) + "'");
}

std::string_view to_string(CenterInit init) {
  return init == CenterInit::farthest_first ? "farthest-first" : "random-points";
}

OutputSolver parse_output_solver(std::string_view name) {
  if (name == "pseudo-inverse") return OutputSolver::pseudo_inverse;
  if (name == "gradient") return OutputSolver::gradient;
  throw ParseError("unknown output solver '" + std::string(name) + "'");
}

std::string_view to_string(OutputSolver solver) {
  return solver == OutputSolver::gradient ? "gradient" : "pseudo-inverse";
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"hidden_units", c.hidden_units},
          {"max_epochs", c.max_epochs},
          {"convergence_tol", c.convergence_tol},
          {"rng_seed", c.rng_seed},
          {"width_heuristic", to_string(c.width_heuristic)},
          {"center_init", to_string(c.center_init)},
          {"output_solver", to_string(c.output_solver)},
          {"min_vectors_per_unit", c.min_vectors_per_unit}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.hidden_units = j.at("hidden_units").get<int>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.convergence_tol = j.at("convergence_tol").get<double>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  c.width_heuristic = parse_width_heuristic(j.at("width_heuristic").get<std::string>());
  c.center_init = parse_center_init(j.at("center_init").get<std::string>());
  c.output_solver = parse_output_solver(j.at("output_solver").get<std::string>());
  c.min_vectors_per_unit = j.at("min_vectors_per_unit").get<double>();
  return c;
}

namespace {

std::vector<int> assign_nearest(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers) {
  std::vector<int> out(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < centers.rows(); ++j) {
      const double d = (points.row(i) - centers.row(j)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(j);
      }
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

std::vector<Eigen::Index> random_distinct_indices(Eigen::Index n, int h, std::uint64_t seed) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first h slots are a uniform draw without replacement.
  for (int k = 0; k < h; ++k) {
    std::uniform_int_distribution<Eigen::Index> pick(k, n - 1);
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(h));
  return idx;
}

std::vector<Eigen::Index> farthest_first_indices(const Eigen::MatrixXd& points, int h) {
  const Eigen::RowVectorXd mean = points.colwise().mean();
  Eigen::Index first = 0;
  (points.rowwise() - mean).rowwise().squaredNorm().minCoeff(&first);
  std::vector<Eigen::Index> chosen{first};
  Eigen::VectorXd nearest = (points.rowwise() - points.row(first)).rowwise().squaredNorm();
  while (static_cast<int>(chosen.size()) < h) {
    Eigen::Index next = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      if (nearest(i) > best) {
        best = nearest(i);
        next = i;
      }
    }
    chosen.push_back(next);
    nearest = nearest.cwiseMin((points.rowwise() - points.row(next)).rowwise().squaredNorm());
  }
  return chosen;
}

bool has_duplicate_rows(const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.rows(); ++j) {
      if (m.row(i) == m.row(j)) return true;
    }
  }
  return false;
}

double sse(const Eigen::MatrixXd& design, const Eigen::VectorXd& w, const Eigen::VectorXd& t) {
  return (design * w - t).squaredNorm();
}

}  // namespace

Clustering place_centers(const Eigen::MatrixXd& points, int h, std::uint64_t seed, int max_epochs,
                         CenterInit init) {
  const auto n = points.rows();
  if (h < 1) throw InvalidArgument("k-means needs at least one cluster");
  if (h > n) {
    throw InvalidArgument("cannot place " + std::to_string(h) + " centers on " +
                          std::to_string(n) + " points");
  }
  if (max_epochs < 1) throw InvalidArgument("max_epochs must be at least 1");

  const auto start = init == CenterInit::farthest_first ? farthest_first_indices(points, h)
                                                        : random_distinct_indices(n, h, seed);
  Clustering out;
  out.centers.resize(h, points.cols());
  for (int j = 0; j < h; ++j) out.centers.row(j) = points.row(start[static_cast<std::size_t>(j)]);

  auto assignment = assign_nearest(points, out.centers);
  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(h, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(h), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = assignment[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int j = 0; j < h; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        out.centers.row(j) = sums.row(j) / counts[static_cast<std::size_t>(j)];
      }
    }
    auto next = assign_nearest(points, out.centers);
    out.epochs = epoch;
    const bool unchanged = next == assignment;
    assignment = std::move(next);
    if (unchanged) {
      out.converged = true;
      break;
    }
  }
  out.assignment = std::move(assignment);
  out.duplicate_centers = has_duplicate_rows(out.centers);
  return out;
}

Widths set_widths(const Eigen::MatrixXd& centers, WidthHeuristic heuristic,
                  const Eigen::MatrixXd* training) {
  const auto h = centers.rows();
  if (h < 1) throw InvalidArgument("set_widths needs at least one center");
  Widths out;
  out.sigma.resize(h);

  if (h == 1) {
    double mean = 0.0;
    if (training != nullptr && training->rows() > 0) {
      mean = (training->rowwise() - centers.row(0)).rowwise().norm().mean();
    }
    out.sigma(0) = mean;
  } else if (heuristic == WidthHeuristic::nearest_center) {
    for (Eigen::Index j = 0; j < h; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < h; ++k) {
        if (k != j) best = std::min(best, (centers.row(j) - centers.row(k)).norm());
      }
      out.sigma(j) = best;
    }
  } else {
    double d_max = 0.0;
    for (Eigen::Index j = 0; j < h; ++j) {
      for (Eigen::Index k = j + 1; k < h; ++k) {
        d_max = std::max(d_max, (centers.row(j) - centers.row(k)).norm());
      }
    }
    out.sigma.setConstant(d_max / std::sqrt(2.0 * static_cast<double>(h)));
  }

  for (Eigen::Index j = 0; j < h; ++j) {
    if (out.sigma(j) < kWidthFloor) {
      out.sigma(j) = kWidthFloor;
      out.warnings.push_back("width of unit " + std::to_string(j) + " floored at 1e-6");
    }
  }
  return out;
}

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                              const Eigen::VectorXd& sigma) {
  const auto n = points.rows();
  const auto h = centers.rows();
  Eigen::MatrixXd a(n, h + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < h; ++j) {
      const double d2 = (points.row(i) - centers.row(j)).squaredNorm();
      a(i, j) = std::exp(-d2 / (2.0 * sigma(j) * sigma(j)));
    }
    a(i, h) = 1.0;
  }
  return a;
}

Eigen::VectorXd solve_output_weights(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets) {
  if (design.rows() != targets.size()) throw InvalidArgument("design and target sizes differ");
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  return cod.solve(targets);
}

GradientSolve solve_output_weights_gradient(const Eigen::MatrixXd& design,
                                            const Eigen::VectorXd& targets, int max_epochs,
                                            double tol) {
  if (design.rows() != targets.size()) throw InvalidArgument("design and target sizes differ");
  GradientSolve out;
  out.weights = Eigen::VectorXd::Zero(design.cols());
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(design);
  const double top = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  if (top == 0.0) {
    out.converged = true;
    return out;
  }
  const double step = 1.0 / (top * top);
  double prev = sse(design, out.weights, targets);
  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    out.weights -= step * design.transpose() * (design * out.weights - targets);
    const double cur = sse(design, out.weights, targets);
    out.epochs = epoch;
    if (prev - cur <= tol * std::max(1.0, prev)) {
      out.converged = true;
      break;
    }
    prev = cur;
  }
  return out;
}

std::string refusal_reason(std::size_t n, const TrainConfig& config) {
  const int h = config.hidden_units;
  if (n < 2) return "training needs at least 2 vectors, got " + std::to_string(n);
  if (h < 2) return "at least 2 hidden units are required, got " + std::to_string(h);
  if (static_cast<std::size_t>(h) > n - 1) {
    return std::to_string(h) + " hidden units exceed N - 1 = " + std::to_string(n - 1);
  }
  if (static_cast<double>(n) < config.min_vectors_per_unit * h) {
    return std::to_string(h) + " hidden units on " + std::to_string(n) +
           " vectors is below the small-sample limit of " +
           format_double(config.min_vectors_per_unit) + " vectors per unit";
  }
  if (config.max_epochs < 1) return "max_epochs must be at least 1";
  return {};
}

Eigen::VectorXd to_eigen(const FeatureVector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.values.data(), static_cast<Eigen::Index>(kFeatureCount));
}

Eigen::MatrixXd to_matrix(std::span<const FeatureVector> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = to_eigen(rows[i]);
  return m;
}

RbfModel train(std::span<const FeatureVector> feats, std::span<const Label> labels,
               const TrainConfig& config) {
  if (feats.empty()) throw InvalidArgument("cannot train on an empty feature set");
  if (feats.size() != labels.size()) throw InvalidArgument("features and labels are not aligned");
  if (auto reason = refusal_reason(feats.size(), config); !reason.empty()) {
    throw TrainingRefused(reason);
  }

  RbfModel model;
  model.config = config;
  model.training_size = feats.size();
  model.normalizer = features::fit_normalizer(feats);

  std::vector<FeatureVector> normalized;
  normalized.reserve(feats.size());
  for (const auto& f : feats) normalized.push_back(features::apply_normalizer(model.normalizer, f));
  const Eigen::MatrixXd x = to_matrix(normalized);
  Eigen::VectorXd t(x.rows());
  for (std::size_t i = 0; i < labels.size(); ++i) t(static_cast<Eigen::Index>(i)) = target_of(labels[i]);

  auto& diag = model.diagnostics;
  auto clusters =
      place_centers(x, config.hidden_units, config.rng_seed, config.max_epochs, config.center_init);
  model.centers = std::move(clusters.centers);
  diag.clustering_epochs = clusters.epochs;
  diag.clustering_converged = clusters.converged;
  diag.duplicate_centers = clusters.duplicate_centers;
  if (clusters.duplicate_centers) diag.warnings.push_back("duplicate centers after clustering");
  if (!clusters.converged) {
    diag.warnings.push_back("k-means did not converge within " + std::to_string(config.max_epochs) +
                            " epochs");
  }

  auto widths = set_widths(model.centers, config.width_heuristic, &x);
  model.widths = std::move(widths.sigma);
  for (auto& w : widths.warnings) diag.warnings.push_back(std::move(w));

  const Eigen::MatrixXd design = design_matrix(x, model.centers, model.widths);
  const auto h = model.centers.rows();
  const bool has_bad = (t.array() == 1.0).any();
  const bool has_good = (t.array() == 0.0).any();
  Eigen::VectorXd w;
  if (!(has_bad && has_good)) {
    diag.single_class = true;
    diag.warnings.push_back(std::string("training set holds only '") +
                            std::string(to_string(labels.front())) + "' swings");
    w = Eigen::VectorXd::Zero(h + 1);
    w(h) = t(0);
  } else if (config.output_solver == OutputSolver::gradient) {
    auto g = solve_output_weights_gradient(design, t, config.max_epochs, config.convergence_tol);
    w = std::move(g.weights);
    diag.output_epochs = g.epochs;
    diag.output_converged = g.converged;
    if (!g.converged) diag.warnings.push_back("output-weight descent hit the epoch cap");
  } else {
    w = solve_output_weights(design, t);
  }
  model.weights = w.head(h);
  model.bias = w(h);
  diag.training_sse = sse(design, w, t);
  return model;
}

double score_normalized(const RbfModel& model, const Eigen::VectorXd& x) {
  if (!model.trained()) throw ModelError("model is not trained");
  if (x.size() != model.centers.cols()) throw InvalidArgument("feature dimension mismatch");
  double score = model.bias;
  for (Eigen::Index j = 0; j < model.centers.rows(); ++j) {
    const double d2 = (x.transpose() - model.centers.row(j)).squaredNorm();
    score += model.weights(j) * std::exp(-d2 / (2.0 * model.widths(j) * model.widths(j)));
  }
  return score;
}

double predict(const RbfModel& model, const FeatureVector& raw) {
  if (!model.trained()) throw ModelError("model is not trained");
  return score_normalized(model, to_eigen(features::apply_normalizer(model.normalizer, raw)));
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json to_json(const RbfModel& model) {
  const auto& d = model.diagnostics;
  return {{"format", "swingid-rbf-model"},
          {"version", kModelFormatVersion},
          {"hidden_units", model.hidden_units()},
          {"rng_seed", model.config.rng_seed},
          {"width_heuristic", to_string(model.config.width_heuristic)},
          {"config", to_json(model.config)},
          {"training_size", model.training_size},
          {"centers", matrix_json(model.centers)},
          {"widths", vector_json(model.widths)},
          {"weights", vector_json(model.weights)},
          {"bias", model.bias},
          {"normalizer", features::to_json(model.normalizer)},
          {"diagnostics",
           {{"clustering_epochs", d.clustering_epochs},
            {"clustering_converged", d.clustering_converged},
            {"output_epochs", d.output_epochs},
            {"output_converged", d.output_converged},
            {"duplicate_centers", d.duplicate_centers},
            {"single_class", d.single_class},
            {"training_sse", d.training_sse},
            {"warnings", d.warnings}}}};
}

RbfModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "swingid-rbf-model") {
      throw ModelError("not a swingid RBF model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelError("unsupported model version " + std::to_string(version));
    }
    RbfModel m;
    m.config = train_config_from_json(j.at("config"));
    m.training_size = j.at("training_size").get<std::size_t>();
    const auto rows = j.at("centers").get<std::vector<std::vector<double>>>();
    m.centers.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kFeatureCount));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != kFeatureCount) throw ModelError("center of wrong dimension");
      for (std::size_t k = 0; k < kFeatureCount; ++k) {
        m.centers(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
      }
    }
    m.widths = vector_from_json(j.at("widths"));
    m.weights = vector_from_json(j.at("weights"));
    if (m.widths.size() != m.centers.rows() || m.weights.size() != m.centers.rows()) {
      throw ModelError("widths/weights do not match the number of centers");
    }
    m.bias = j.at("bias").get<double>();
    m.normalizer = features::normalizer_from_json(j.at("normalizer"));
    const auto& d = j.at("diagnostics");
    m.diagnostics.clustering_epochs = d.at("clustering_epochs").get<int>();
    m.diagnostics.clustering_converged = d.at("clustering_converged").get<bool>();
    m.diagnostics.output_epochs = d.at("output_epochs").get<int>();
    m.diagnostics.output_converged = d.at("output_converged").get<bool>();
    m.diagnostics.duplicate_centers = d.at("duplicate_centers").get<bool>();
    m.diagnostics.single_class = d.at("single_class").get<bool>();
    m.diagnostics.training_sse = d.at("training_sse").get<double>();
    m.diagnostics.warnings = d.at("warnings").get<std::vector<std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace swingid::rbf
