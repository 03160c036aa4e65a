#pragma once

// Gaussian radial-basis-function binary classifier.
//
// Training is two-phase: k-means places the hidden-unit centers in the
// normalized feature space, then the linear output layer (weights + bias)
// is solved against targets bad = 1 / good = 0. A score >= 0.5 is "bad".

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "swingid/common.hpp"
#include "swingid/features.hpp"

namespace swingid::rbf {

enum class WidthHeuristic {
  nearest_center,  // sigma_j = distance to the nearest other center
  global,          // sigma = d_max / sqrt(2h) for every unit
};

enum class CenterInit {
  random_points,   // h distinct training points drawn with the seed
  farthest_first,  // seed-independent farthest-point traversal
};

enum class OutputSolver {
  pseudo_inverse,  // closed-form minimum-norm least squares
  gradient,        // batch gradient descent, capped at max_epochs
};

WidthHeuristic parse_width_heuristic(std::string_view name);
std::string_view to_string(WidthHeuristic h);
CenterInit parse_center_init(std::string_view name);
std::string_view to_string(CenterInit init);
OutputSolver parse_output_solver(std::string_view name);
std::string_view to_string(OutputSolver solver);

inline constexpr double kWidthFloor = 1e-6;
inline constexpr double kDecisionThreshold = 0.5;

struct TrainConfig {
  int hidden_units = 4;
  int max_epochs = 100;
  double convergence_tol = 1e-9;
  std::uint64_t rng_seed = 0;
  WidthHeuristic width_heuristic = WidthHeuristic::nearest_center;
  CenterInit center_init = CenterInit::random_points;
  OutputSolver output_solver = OutputSolver::pseudo_inverse;
  /// Small-sample limit: training needs at least this many vectors per
  /// hidden unit. 2.5 admits 5 units on 13 vectors and refuses 6 on 14.
  double min_vectors_per_unit = 2.5;
};

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct Clustering {
  Eigen::MatrixXd centers;  // h x d
  std::vector<int> assignment;
  int epochs = 0;
  bool converged = false;
  bool duplicate_centers = false;
};

/// k-means (Lloyd) with `h` clusters over the rows of `points`. Stops as soon
/// as an epoch leaves every assignment unchanged, or after `max_epochs`.
/// An emptied cluster keeps its previous center.
Clustering place_centers(const Eigen::MatrixXd& points, int h, std::uint64_t seed, int max_epochs,
                         CenterInit init = CenterInit::random_points);

struct Widths {
  Eigen::VectorXd sigma;
  std::vector<std::string> warnings;
};

/// `training` is only consulted for the single-center fallback (mean
/// training-point distance to that center).
Widths set_widths(const Eigen::MatrixXd& centers, WidthHeuristic heuristic,
                  const Eigen::MatrixXd* training = nullptr);

/// N x (h + 1) matrix of Gaussian activations with a trailing bias column.
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                              const Eigen::VectorXd& sigma);

/// Minimum-norm least-squares solution of design * w = targets.
Eigen::VectorXd solve_output_weights(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets);

struct GradientSolve {
  Eigen::VectorXd weights;
  int epochs = 0;
  bool converged = false;
};

/// Batch gradient descent on the sum of squared errors from w = 0 with step
/// 1 / ||design||_2^2; stops when the relative SSE decrease drops below `tol`.
GradientSolve solve_output_weights_gradient(const Eigen::MatrixXd& design,
                                            const Eigen::VectorXd& targets, int max_epochs,
                                            double tol);

struct TrainDiagnostics {
  int clustering_epochs = 0;
  bool clustering_converged = false;
  int output_epochs = 0;
  bool output_converged = true;
  bool duplicate_centers = false;
  bool single_class = false;
  double training_sse = 0.0;
  std::vector<std::string> warnings;

  bool converged() const { return clustering_converged && output_converged; }
};

struct RbfModel {
  Eigen::MatrixXd centers;  // h x 12, normalized feature space
  Eigen::VectorXd widths;
  Eigen::VectorXd weights;  // h output weights, bias kept separately
  double bias = 0.0;
  features::NormalizationParams normalizer;
  TrainConfig config;
  TrainDiagnostics diagnostics;
  std::size_t training_size = 0;

  int hidden_units() const { return static_cast<int>(centers.rows()); }
  bool trained() const { return centers.rows() > 0; }
};

/// Training was declined: too few vectors for the requested hidden units,
/// or inconsistent inputs.
class TrainingRefused : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

/// Returns "" when training is admissible, otherwise the refusal reason.
std::string refusal_reason(std::size_t training_size, const TrainConfig& config);

RbfModel train(std::span<const features::FeatureVector> features, std::span<const Label> labels,
               const TrainConfig& config);

/// Score of an already-normalized vector.
double score_normalized(const RbfModel& model, const Eigen::VectorXd& x);
/// Normalizes `raw` with the model's stored parameters, then scores it.
double predict(const RbfModel& model, const features::FeatureVector& raw);
inline Label decide(double score) { return score >= kDecisionThreshold ? Label::bad : Label::good; }
inline Label classify(const RbfModel& model, const features::FeatureVector& raw) {
  return decide(predict(model, raw));
}

Eigen::VectorXd to_eigen(const features::FeatureVector& v);
Eigen::MatrixXd to_matrix(std::span<const features::FeatureVector> rows);

inline constexpr int kModelFormatVersion = 1;
nlohmann::json to_json(const RbfModel& model);
RbfModel model_from_json(const nlohmann::json& j);

}  // namespace swingid::rbf
