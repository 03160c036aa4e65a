// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "swingid/cli.hpp"
#include "swingid/eval.hpp"
#include "swingid/features.hpp"
#include "swingid/kinematics.hpp"
#include "swingid/pipeline.hpp"
#include "swingid/rbf.hpp"
#include "swingid/synthgen.hpp"

namespace fs = std::filesystem;
using namespace swingid;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    o.require(false, "runtime " + std::to_string(secs) + " s over budget");
  }
  if (!o.pass) ++failures;
  std::printf("%s [%d] %s (%.3f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, title, secs,
              o.detail.empty() ? "" : ": ", o.detail.c_str());
  std::fflush(stdout);
}

struct Dataset {
  std::vector<features::FeatureVector> features;
  std::vector<mocap::LabelRecord> labels;
};

Dataset extract_dataset(const std::vector<synth::DatasetEntry>& preset, std::uint64_t seed) {
  Dataset d;
  for (const auto& g : synth::generate_swings(preset, seed)) {
    d.features.push_back(pipeline::extract_swing(g.clip, g.roi));
    d.labels.insert(d.labels.end(), g.labels.begin(), g.labels.end());
  }
  return d;
}

std::string hash_tree(const fs::path& dir) {
  std::set<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.insert(e.path());
  }
  std::string all;
  for (const auto& f : files) all += fs::relative(f, dir).string() + "\n" + read_file(f.string());
  return all;
}

}  // namespace

int main() {
  criterion(1, "reduction table for durations {13,10,7} x 22 markers, exact", 1.0, [] {
    Outcome o;
    const int durations[3] = {13, 10, 7};
    const long long inputs[3] = {858, 660, 462};
    const char* percents[3] = {"98.6%", "98.2%", "97.4%"};
    for (int i = 0; i < 3; ++i) {
      const auto r = features::reduction_report(durations[i], 22);
      o.require(r.input_dim == inputs[i], "input dim " + std::to_string(r.input_dim));
      o.require(r.output_dim == 12, "output dim " + std::to_string(r.output_dim));
      o.require(r.reduction_text() == percents[i], "reduction " + r.reduction_text());
    }
    return o;
  });

  criterion(2, "12 features for every ROI duration 3..13 over 1000 random swings", 10.0, [] {
    Outcome o;
    std::mt19937_64 rng(2);
    for (int i = 0; i < 1000 && o.pass; ++i) {
      auto a = synth::random_archetype(rng());
      a.duration_frames = 3 + i % 11;
      a.noise_amplitude = 0.002;
      const auto g = synth::generate_swing(a, rng(), "r");
      const auto f = pipeline::extract_swing(g.clip, g.roi);
      o.require(g.roi.duration() == static_cast<std::size_t>(a.duration_frames), "ROI duration");
      o.require(f.values.size() == 12, "feature count");
      for (double v : f.values) o.require(std::isfinite(v), "non-finite feature");
    }
    return o;
  });

  criterion(3, "zero-noise closed loop: trajectory coefficients within 1e-6 (100 archetypes)", 0, [] {
    Outcome o;
    double worst = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto a = synth::random_archetype(1000 + s);
      const auto g = synth::generate_swing(a, s, "c");
      const auto f = pipeline::extract_swing(g.clip, g.roi).values;
      const double want[6] = {a.sagittal.p2, a.sagittal.p1, a.sagittal.p0,
                              a.transverse.p2, a.transverse.p1, a.transverse.p0};
      const double got[6] = {f[3], f[4], f[5], f[9], f[10], f[11]};
      for (int k = 0; k < 6; ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
    }
    o.require(worst <= 1e-6, "max deviation " + std::to_string(worst));
    o.detail = o.pass ? "max deviation " + format_double(worst) : o.detail;
    return o;
  });

  criterion(4, "gradient vs finite-difference oracle (1e-12), sweet-spot equidistance (1e-9)", 0, [] {
    Outcome o;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 100; ++i) {
      const std::size_t n = 2 + rng() % 14;
      kinematics::VirtualMarkerPath p;
      for (std::size_t t = 0; t < n; ++t) p.positions.emplace_back(u(rng), u(rng), u(rng));
      const auto g = kinematics::gradient_flow(p).vectors;
      const auto ref = oracle::finite_difference(p.positions);
      for (std::size_t t = 0; t < n; ++t) {
        for (int k = 0; k < 3; ++k) o.require(std::abs(g[t][k] - ref[t][k]) <= 1e-12, "gradient");
      }
    }
    for (int i = 0; i < 100; ++i) {
      Path3 r1, r2, h;
      for (int t = 0; t < 10; ++t) {
        Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng)), c(u(rng), u(rng), u(rng));
        while ((b - a).cross(c - a).norm() < 1e-3) c = Vec3(u(rng), u(rng), u(rng));
        r1.push_back(a);
        r2.push_back(b);
        h.push_back(c);
      }
      const auto s = kinematics::compute_sweet_spot(r1, r2, h);
      for (int t = 0; t < 10; ++t) {
        const double d1 = (s.positions[t] - r1[t]).norm();
        o.require(std::abs((s.positions[t] - r2[t]).norm() - d1) <= 1e-9, "R2 distance");
        o.require(std::abs((s.positions[t] - h[t]).norm() - d1) <= 1e-9, "H distance");
      }
    }
    Path3 r1 = {{0, 0, 0}}, r2 = {{1, 0, 0}}, h = {{2, 0, 0}};
    bool threw = false;
    try {
      kinematics::compute_sweet_spot(r1, r2, h);
    } catch (const kinematics::DegenerateGeometryError&) {
      threw = true;
    }
    o.require(threw, "collinear triad accepted");
    return o;
  });

  criterion(5, "accuracy arithmetic {0,1,4,14}/14 and the novice majority baseline 71.4%", 0, [] {
    Outcome o;
    const int wrong[4] = {0, 1, 4, 14};
    const char* want[4] = {"100.0", "92.9", "71.4", "0.0"};
    for (int i = 0; i < 4; ++i) {
      std::vector<int> e(14, 0);
      for (int k = 0; k < wrong[i]; ++k) e[static_cast<std::size_t>(k)] = 1;
      const auto got = eval::format_percent(eval::accuracy(e));
      o.require(got == want[i], "accuracy " + got + " for " + std::to_string(wrong[i]) + " errors");
    }
    const auto d = extract_dataset(synth::default_preset(), 5);
    const auto s = eval::align(d.features, d.labels, "novice");
    const auto r = eval::loocv(s.features, s.labels, eval::majority_learner(), 5);
    const auto got = eval::format_percent(r.accuracy);
    o.require(got == "71.4", "majority baseline " + got);
    return o;
  });

  criterion(6, "leave-one-out equals a brute-force retrain per fold, bitwise (N <= 8)", 0, [] {
    Outcome o;
    for (std::size_t n = 3; n <= 8; ++n) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::vector<features::FeatureVector> x;
        std::vector<Label> y;
        oracle::blobs(n / 2 + 1, 1.0, 0.7, 100 * n + seed, x, y);
        x.resize(n);
        y.resize(n);
        for (int h : {2, 3}) {
          const rbf::TrainConfig cfg{.hidden_units = h, .rng_seed = seed};
          const auto r = eval::loocv(x, y, cfg);
          const auto ref = oracle::brute_force_loocv(x, y, eval::rbf_learner(cfg), seed);
          for (std::size_t i = 0; i < n; ++i) {
            const auto& f = r.folds[i];
            o.require(f.refused == ref[i].refused, "refusal mismatch");
            if (!f.refused && !ref[i].refused) {
              o.require(f.score == ref[i].score, "score mismatch");
              o.require(*f.predicted == ref[i].predicted, "label mismatch");
            }
          }
        }
      }
    }
    return o;
  });

  criterion(7, "12-repeat sweep h=2..6: two criteria, h=6 N/A; h=4 >= h=2 on separable", 60.0, [] {
    Outcome o;
    const std::vector<int> hs = {2, 3, 4, 5, 6};
    const auto d = extract_dataset(synth::default_preset(), 7);
    std::vector<eval::CriterionData> sets;
    for (const auto& c : mocap::criteria(d.labels)) sets.push_back({c, eval::align(d.features, d.labels, c)});
    const auto table = eval::sweep_hidden_units(sets, hs, 12, 1);
    for (const auto& c : table.criteria) {
      for (int h : hs) {
        const auto& r = table.at(c, h);
        o.require(r.repeats == 12 && r.accuracies.size() == 12, "repeat count");
        o.require(r.not_applicable() == (h == 6), c + " h=" + std::to_string(h) + " applicability");
      }
    }
    const auto text = eval::render_table(table);
    o.require(text.find("N/A") != std::string::npos, "rendered table lacks N/A");
    o.require(text.find("28.6%") != std::string::npos && text.find("71.4%") != std::string::npos,
              "rendered table lacks the class balances");

    const auto sep = extract_dataset(synth::separable_preset(), 7);
    const std::vector<eval::CriterionData> sep_sets = {
        {"separable", eval::align(sep.features, sep.labels, "separable")}};
    const auto sep_table = eval::sweep_hidden_units(sep_sets, hs, 12, 1);
    const double h2 = sep_table.at("separable", 2).mean_accuracy;
    const double h4 = sep_table.at("separable", 4).mean_accuracy;
    o.require(sep_table.at("separable", 6).not_applicable(), "separable h=6 applicability");
    o.require(h4 >= h2, "h=4 " + eval::format_percent(h4) + "% < h=2 " + eval::format_percent(h2) + "%");
    if (o.pass) {
      o.detail = "separable h=2 " + eval::format_percent(h2) + "%, h=4 " + eval::format_percent(h4) +
                 "%; preset novice h=2 " + eval::format_percent(table.at("novice", 2).mean_accuracy) +
                 "%, h=4 " + eval::format_percent(table.at("novice", 4).mean_accuracy) +
                 "%; intermediate h=2 " +
                 eval::format_percent(table.at("intermediate", 2).mean_accuracy) + "%, h=4 " +
                 eval::format_percent(table.at("intermediate", 4).mean_accuracy) + "%";
    }
    return o;
  });

  criterion(8, "every command re-run with the same config and seed is byte-identical", 0, [] {
    Outcome o;
    const auto root = fs::temp_directory_path() / "swingid_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const auto p = [&](const char* rel) { return (root / rel).string(); };
    const std::vector<std::vector<std::string>> steps = {
        {"synth", "--out", p("data"), "--seed", "11"},
        {"extract", "--clips", p("data/clips"), "--rois", p("data/rois.json"), "--out", p("out/f.csv")},
        {"train", "--features", p("out/f.csv"), "--labels", p("data/labels.csv"), "--criterion",
         "novice", "--seed", "3", "--out", p("out/model.json")},
        {"evaluate", "--model", p("out/model.json"), "--features", p("out/f.csv"), "--out",
         p("out/scores.csv")},
        {"loocv", "--features", p("out/f.csv"), "--labels", p("data/labels.csv"), "--criterion",
         "intermediate", "--seed", "4", "--out", p("out/loocv")},
        {"sweep", "--features", p("out/f.csv"), "--labels", p("data/labels.csv"), "--seed", "5",
         "--repeats", "3", "--out", p("out/sweep")},
        {"report", "--input", p("out/sweep/sweep.json"), "--out", p("out/report.txt")},
        {"export-viewer", "--clips", p("data/clips"), "--rois", p("data/rois.json"), "--labels",
         p("data/labels.csv"), "--out", p("out/viewer")}};
    std::string snapshots[2];
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& args : steps) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        o.require(code == 0, args[0] + " exited " + std::to_string(code) + ": " + err.str());
      }
      snapshots[pass] = hash_tree(root);
    }
    o.require(snapshots[0] == snapshots[1], "artifacts differ between runs");
    fs::remove_all(root);
    return o;
  });

  criterion(9, "output weights: known w* recovered to 1e-8; 1000 perturbations never lower SSE (1e-12 roundoff)", 0, [] {
    Outcome o;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::MatrixXd a(14, 5);
      for (int i = 0; i < 14; ++i) {
        for (int j = 0; j < 5; ++j) a(i, j) = u(rng);
      }
      Eigen::VectorXd w(5);
      for (int j = 0; j < 5; ++j) w(j) = u(rng);
      const double err = (rbf::solve_output_weights(a, a * w) - w).cwiseAbs().maxCoeff();
      o.require(err <= 1e-8, "recovery error " + std::to_string(err));
    }
    const auto d = extract_dataset(synth::default_preset(), 9);
    const auto s = eval::align(d.features, d.labels, "intermediate");
    const auto model = rbf::train(s.features, s.labels, rbf::TrainConfig{.hidden_units = 4, .rng_seed = 9});
    Eigen::MatrixXd x(static_cast<Eigen::Index>(s.features.size()), 12);
    Eigen::VectorXd t(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const auto& f = s.features[static_cast<std::size_t>(i)];
      x.row(i) = rbf::to_eigen(features::apply_normalizer(model.normalizer, f));
      t(i) = target_of(s.labels[static_cast<std::size_t>(i)]);
    }
    const auto design = rbf::design_matrix(x, model.centers, model.widths);
    Eigen::VectorXd w(model.weights.size() + 1);
    w << model.weights, model.bias;
    const double best = (design * w - t).squaredNorm();
    std::uniform_real_distribution<double> step(-1e-4, 1e-4);
    int lowered = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd q = w;
      for (Eigen::Index k = 0; k < q.size(); ++k) q(k) += step(rng);
      if ((design * q - t).squaredNorm() < best - 1e-12) ++lowered;
    }
    o.require(lowered == 0, std::to_string(lowered) + " perturbations lowered the SSE");
    return o;
  });

  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
