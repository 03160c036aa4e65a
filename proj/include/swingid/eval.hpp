#pragma once

// Leave-one-out evaluation, repeated over derived seeds, and hidden-unit
// sweeps rendered in a criterion x hidden-units accuracy table.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "swingid/common.hpp"
#include "swingid/features.hpp"
#include "swingid/mocap_io.hpp"
#include "swingid/rbf.hpp"

namespace swingid::eval {

/// (1 - sum(errors) / N) * 100. Throws on an empty list.
double accuracy(std::span<const int> errors);
/// One decimal, no percent sign: 92.857... -> "92.9".
std::string format_percent(double percent);

struct Prediction {
  double score = 0.0;
  Label label = Label::good;
  int epochs = 0;
  bool converged = true;
};

using Predictor = std::function<Prediction(const features::FeatureVector&)>;
/// Fits on a training fold with the given seed. May throw rbf::TrainingRefused.
using Learner = std::function<Predictor(std::span<const features::FeatureVector>,
                                        std::span<const Label>, std::uint64_t seed)>;

/// RBF network; the fold seed replaces config.rng_seed.
Learner rbf_learner(rbf::TrainConfig config);
/// Predicts the training majority class (ties resolve to bad).
Learner majority_learner();

struct FoldResult {
  std::string held_out_id;
  std::optional<Label> predicted;  // empty when training was refused
  Label actual = Label::good;
  double score = 0.0;
  int epochs_to_convergence = 0;
  bool converged = false;
  bool refused = false;
  std::string note;
  std::uint64_t seed = 0;

  /// Refused folds count as misclassified.
  bool is_error() const { return refused || !predicted || *predicted != actual; }
};

struct LoocvResult {
  std::vector<FoldResult> folds;  // input order
  double accuracy = 0.0;
  std::size_t valid_folds = 0;
};

/// Feature vectors paired with labels of one criterion.
struct LabeledSet {
  std::vector<features::FeatureVector> features;
  std::vector<Label> labels;
};

/// Throws InvalidArgument if a feature vector has no label under `criterion`.
LabeledSet align(const std::vector<features::FeatureVector>& features,
                 const std::vector<mocap::LabelRecord>& records, std::string_view criterion);

/// Each fold trains on the other N - 1 vectors sorted by swing_id, with
/// seed derive_seed(master_seed, held_out_id), so outcomes do not depend on
/// input order.
LoocvResult loocv(std::span<const features::FeatureVector> features, std::span<const Label> labels,
                  const Learner& learner, std::uint64_t master_seed);
LoocvResult loocv(std::span<const features::FeatureVector> features, std::span<const Label> labels,
                  const rbf::TrainConfig& config);

struct LoocvReport {
  std::string criterion;
  int hidden_units = 0;
  int repeats = 0;
  std::size_t n = 0;
  double bad_fraction = 0.0;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> seeds;  // one per repeat
  std::vector<double> accuracies;    // one per repeat
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;
  double min_accuracy = 0.0;
  double max_accuracy = 0.0;
  std::size_t refused_folds = 0;
  std::size_t nonconverged_folds = 0;
  std::size_t total_folds = 0;
  std::string refusal;  // first refusal message, if any

  /// Every fold was refused: the configuration is not applicable.
  bool not_applicable() const { return total_folds > 0 && refused_folds == total_folds; }
};

LoocvReport repeat_loocv(const LabeledSet& data, const Learner& learner, int repeats,
                         std::uint64_t master_seed, std::string criterion = {},
                         int hidden_units = 0);
LoocvReport repeat_loocv(const LabeledSet& data, const rbf::TrainConfig& config, int repeats,
                         std::uint64_t master_seed, std::string criterion = {});

nlohmann::json to_json(const LoocvReport& report);

struct SweepTable {
  std::vector<std::string> criteria;
  std::vector<int> hidden_units;
  std::vector<LoocvReport> reports;  // criteria-major order

  const LoocvReport& at(std::string_view criterion, int h) const;
};

struct CriterionData {
  std::string criterion;
  LabeledSet data;
};

SweepTable sweep_hidden_units(std::span<const CriterionData> sets, std::span<const int> h_values,
                              int repeats, std::uint64_t master_seed,
                              const rbf::TrainConfig& base = {});

nlohmann::json to_json(const SweepTable& table);
/// Rows per hidden-unit count, one accuracy column per criterion, "N/A"
/// for refused configurations.
std::string render_table(const SweepTable& table);
std::string render_report(const LoocvReport& report);

}  // namespace swingid::eval
