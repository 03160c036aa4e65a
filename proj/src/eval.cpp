#include "swingid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

namespace swingid::eval {

using features::FeatureVector;

double accuracy(std::span<const int> errors) {
  if (errors.empty()) throw InvalidArgument("accuracy of an empty evaluation is undefined");
  const auto wrong = std::accumulate(errors.begin(), errors.end(), 0LL);
  return (1.0 - static_cast<double>(wrong) / static_cast<double>(errors.size())) * 100.0;
}

std::string format_percent(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", percent);
  return buf;
}

Learner rbf_learner(rbf::TrainConfig config) {
  return [config](std::span<const FeatureVector> x, std::span<const Label> y,
                  std::uint64_t seed) -> Predictor {
    auto cfg = config;
    cfg.rng_seed = seed;
    auto model = std::make_shared<const rbf::RbfModel>(rbf::train(x, y, cfg));
    return [model](const FeatureVector& v) {
      Prediction p;
      p.score = rbf::predict(*model, v);
      p.label = rbf::decide(p.score);
      p.epochs = model->diagnostics.clustering_epochs;
      p.converged = model->diagnostics.converged();
      return p;
    };
  };
}

Learner majority_learner() {
  return [](std::span<const FeatureVector>, std::span<const Label> y, std::uint64_t) -> Predictor {
    if (y.empty()) throw rbf::TrainingRefused("majority baseline needs training labels");
    const auto bad = std::count(y.begin(), y.end(), Label::bad);
    const double score = static_cast<double>(bad) / static_cast<double>(y.size());
    return [score](const FeatureVector&) {
      return Prediction{score, rbf::decide(score), 0, true};
    };
  };
}

LabeledSet align(const std::vector<FeatureVector>& feats,
                 const std::vector<mocap::LabelRecord>& records, std::string_view criterion) {
  const auto map = mocap::labels_for(records, criterion);
  LabeledSet out;
  for (const auto& f : feats) {
    const auto it = map.find(f.swing_id);
    if (it == map.end()) {
      throw InvalidArgument("swing '" + f.swing_id + "' has no label under criterion '" +
                            std::string(criterion) + "'");
    }
    out.features.push_back(f);
    out.labels.push_back(it->second);
  }
  return out;
}

LoocvResult loocv(std::span<const FeatureVector> feats, std::span<const Label> labels,
                  const Learner& learner, std::uint64_t master_seed) {
  const auto n = feats.size();
  if (n < 2) throw InvalidArgument("leave-one-out needs at least 2 vectors");
  if (labels.size() != n) throw InvalidArgument("features and labels are not aligned");
  {
    std::set<std::string> ids;
    for (const auto& f : feats) {
      if (!ids.insert(f.swing_id).second) throw InvalidArgument("duplicate swing_id '" + f.swing_id + "'");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return feats[a].swing_id < feats[b].swing_id; });

  LoocvResult result;
  std::vector<int> errors;
  for (std::size_t i = 0; i < n; ++i) {
    FoldResult fold;
    fold.held_out_id = feats[i].swing_id;
    fold.actual = labels[i];
    fold.seed = derive_seed(master_seed, fold.held_out_id);

    std::vector<FeatureVector> train_x;
    std::vector<Label> train_y;
    train_x.reserve(n - 1);
    train_y.reserve(n - 1);
    for (auto k : order) {
      if (k == i) continue;
      train_x.push_back(feats[k]);
      train_y.push_back(labels[k]);
    }
    try {
      const auto predictor = learner(train_x, train_y, fold.seed);
      const auto p = predictor(feats[i]);
      fold.predicted = p.label;
      fold.score = p.score;
      fold.epochs_to_convergence = p.epochs;
      fold.converged = p.converged;
      ++result.valid_folds;
    } catch (const rbf::TrainingRefused& e) {
      fold.refused = true;
      fold.score = std::nan("");
      fold.note = e.what();
    }
    errors.push_back(fold.is_error() ? 1 : 0);
    result.folds.push_back(std::move(fold));
  }
  result.accuracy = accuracy(errors);
  return result;
}

LoocvResult loocv(std::span<const FeatureVector> feats, std::span<const Label> labels,
                  const rbf::TrainConfig& config) {
  return loocv(feats, labels, rbf_learner(config), config.rng_seed);
}

LoocvReport repeat_loocv(const LabeledSet& data, const Learner& learner, int repeats,
                         std::uint64_t master_seed, std::string criterion, int hidden_units) {
  if (repeats < 1) throw InvalidArgument("repeats must be at least 1");
  LoocvReport r;
  r.criterion = std::move(criterion);
  r.hidden_units = hidden_units;
  r.repeats = repeats;
  r.n = data.features.size();
  r.master_seed = master_seed;
  const auto bad = std::count(data.labels.begin(), data.labels.end(), Label::bad);
  r.bad_fraction = r.n == 0 ? 0.0 : 100.0 * static_cast<double>(bad) / static_cast<double>(r.n);

  for (int k = 0; k < repeats; ++k) {
    const auto seed = derive_seed(master_seed, static_cast<std::uint64_t>(k));
    const auto res = loocv(data.features, data.labels, learner, seed);
    r.seeds.push_back(seed);
    r.accuracies.push_back(res.accuracy);
    for (const auto& f : res.folds) {
      ++r.total_folds;
      if (f.refused) {
        ++r.refused_folds;
        if (r.refusal.empty()) r.refusal = f.note;
      } else if (!f.converged) {
        ++r.nonconverged_folds;
      }
    }
  }
  const double count = static_cast<double>(repeats);
  r.mean_accuracy = std::accumulate(r.accuracies.begin(), r.accuracies.end(), 0.0) / count;
  double var = 0.0;
  for (double a : r.accuracies) var += (a - r.mean_accuracy) * (a - r.mean_accuracy);
  r.stddev_accuracy = std::sqrt(var / count);
  const auto [lo, hi] = std::minmax_element(r.accuracies.begin(), r.accuracies.end());
  r.min_accuracy = *lo;
  r.max_accuracy = *hi;
  return r;
}

LoocvReport repeat_loocv(const LabeledSet& data, const rbf::TrainConfig& config, int repeats,
                         std::uint64_t master_seed, std::string criterion) {
  return repeat_loocv(data, rbf_learner(config), repeats, master_seed, std::move(criterion),
                      config.hidden_units);
}

nlohmann::json to_json(const LoocvReport& r) {
  nlohmann::json j = {{"criterion", r.criterion},
                      {"hidden_units", r.hidden_units},
                      {"repeats", r.repeats},
                      {"n", r.n},
                      {"bad_fraction", r.bad_fraction},
                      {"master_seed", r.master_seed},
                      {"seeds", r.seeds},
                      {"accuracies", r.accuracies},
                      {"mean_accuracy", r.mean_accuracy},
                      {"stddev_accuracy", r.stddev_accuracy},
                      {"min_accuracy", r.min_accuracy},
                      {"max_accuracy", r.max_accuracy},
                      {"total_folds", r.total_folds},
                      {"refused_folds", r.refused_folds},
                      {"nonconverged_folds", r.nonconverged_folds},
                      {"not_applicable", r.not_applicable()}};
  if (!r.refusal.empty()) j["refusal"] = r.refusal;
  return j;
}

const LoocvReport& SweepTable::at(std::string_view criterion, int h) const {
  for (const auto& r : reports) {
    if (r.criterion == criterion && r.hidden_units == h) return r;
  }
  throw InvalidArgument("no sweep entry for (" + std::string(criterion) + ", " +
                        std::to_string(h) + ")");
}

SweepTable sweep_hidden_units(std::span<const CriterionData> sets, std::span<const int> h_values,
                              int repeats, std::uint64_t master_seed,
                              const rbf::TrainConfig& base) {
  SweepTable table;
  table.hidden_units.assign(h_values.begin(), h_values.end());
  for (const auto& set : sets) {
    table.criteria.push_back(set.criterion);
    for (int h : h_values) {
      auto cfg = base;
      cfg.hidden_units = h;
      table.reports.push_back(repeat_loocv(set.data, cfg, repeats, master_seed, set.criterion));
    }
  }
  return table;
}

nlohmann::json to_json(const SweepTable& t) {
  auto reports = nlohmann::json::array();
  for (const auto& r : t.reports) reports.push_back(to_json(r));
  return {{"criteria", t.criteria}, {"hidden_units", t.hidden_units}, {"reports", reports}};
}

std::string render_table(const SweepTable& t) {
  std::vector<std::string> heads;
  for (const auto& c : t.criteria) {
    const auto& first = t.reports.at(static_cast<std::size_t>(&c - t.criteria.data()) *
                                     t.hidden_units.size());
    heads.push_back(c + " (bad " + format_percent(first.bad_fraction) + "%)");
  }
  std::string out;
  if (!t.reports.empty()) {
    const auto& r0 = t.reports.front();
    out += "Repeated leave-one-out cross-validation: N = " + std::to_string(r0.n) + ", " +
           std::to_string(r0.repeats) + " repeats, master seed " + std::to_string(r0.master_seed) +
           "\n";
  }
  std::string line = "Hidden units";
  std::vector<std::size_t> widths;
  for (const auto& h : heads) {
    line += " | " + h;
    widths.push_back(h.size());
  }
  out += line + "\n";
  out += std::string(line.size(), '-') + "\n";
  char buf[64];
  bool any_na = false, any_partial = false;
  for (int h : t.hidden_units) {
    std::snprintf(buf, sizeof(buf), "%12d", h);
    std::string row = buf;
    for (std::size_t c = 0; c < t.criteria.size(); ++c) {
      const auto& r = t.at(t.criteria[c], h);
      std::string cell = r.not_applicable() ? "N/A" : format_percent(r.mean_accuracy) + "%";
      if (!r.not_applicable() && r.refused_folds > 0) cell += "*";
      any_na = any_na || r.not_applicable();
      any_partial = any_partial || (!r.not_applicable() && r.refused_folds > 0);
      row += " | " + std::string(widths[c] > cell.size() ? widths[c] - cell.size() : 0, ' ') + cell;
    }
    out += row + "\n";
  }
  if (any_na) out += "N/A: every fold refused (too few training vectors for the hidden units)\n";
  if (any_partial) out += "*: some folds refused and counted as errors\n";
  return out;
}

std::string render_report(const LoocvReport& r) {
  std::string out;
  out += "criterion: " + (r.criterion.empty() ? std::string("-") : r.criterion) + "\n";
  out += "N: " + std::to_string(r.n) + ", bad swings: " + format_percent(r.bad_fraction) + "%\n";
  out += "hidden units: " + std::to_string(r.hidden_units) + ", repeats: " +
         std::to_string(r.repeats) + ", master seed: " + std::to_string(r.master_seed) + "\n";
  if (r.not_applicable()) {
    out += "mean accuracy: N/A (" + r.refusal + ")\n";
    return out;
  }
  out += "mean accuracy: " + format_percent(r.mean_accuracy) + "% (sd " +
         format_percent(r.stddev_accuracy) + ", min " + format_percent(r.min_accuracy) + ", max " +
         format_percent(r.max_accuracy) + ")\n";
  out += "per repeat:";
  for (double a : r.accuracies) out += " " + format_percent(a);
  out += "\n";
  out += "refused folds: " + std::to_string(r.refused_folds) + "/" + std::to_string(r.total_folds) +
         ", non-converged folds: " + std::to_string(r.nonconverged_folds) + "\n";
  return out;
}

}  // namespace swingid::eval
