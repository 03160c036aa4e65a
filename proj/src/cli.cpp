#include "swingid/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "swingid/eval.hpp"
#include "swingid/features.hpp"
#include "swingid/mocap_io.hpp"
#include "swingid/pipeline.hpp"
#include "swingid/rbf.hpp"
#include "swingid/synthgen.hpp"

namespace swingid::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Context {
  RunConfig& cfg;
  std::ostream& out;
  std::ostream& err;
};

nlohmann::json provenance(const RunConfig& cfg) {
  return {{"tool", "swingid"}, {"command", cfg.command}, {"seed", cfg.seed}, {"config", to_json(cfg)}};
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing required ") + what);
  if (!fs::is_regular_file(path)) throw IoError(std::string(what) + " '" + path + "' not found");
}

void require_dir(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing required ") + what);
  if (!fs::is_directory(path)) throw IoError(std::string(what) + " '" + path + "' not found");
}

void emit(const Context& ctx, const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    ctx.out << contents;
  } else {
    write_file_atomic(path, contents);
  }
}

std::string single_criterion(const RunConfig& cfg) {
  if (cfg.criteria.size() != 1) throw UsageError("exactly one --criterion is required");
  return cfg.criteria.front();
}

rbf::TrainConfig train_config(const RunConfig& cfg) try {
  rbf::TrainConfig tc;
  tc.hidden_units = cfg.hidden_units;
  tc.max_epochs = cfg.max_epochs;
  tc.rng_seed = cfg.seed;
  tc.width_heuristic = rbf::parse_width_heuristic(cfg.width_heuristic);
  tc.center_init = rbf::parse_center_init(cfg.center_init);
  tc.output_solver = rbf::parse_output_solver(cfg.output_solver);
  return tc;
} catch (const ParseError& e) {
  throw UsageError(e.what());
}

pipeline::ExtractOptions extract_options(const RunConfig& cfg) try {
  pipeline::ExtractOptions o;
  o.read.convention = mocap::parse_convention(cfg.source_convention);
  o.read.scale = cfg.scale;
  o.read.sample_rate_hz = cfg.sample_rate_hz;
  o.sweet_spot = kinematics::parse_sweet_spot_method(cfg.sweet_spot);
  return o;
} catch (const ParseError& e) {
  throw UsageError(e.what());
}

int cmd_synth(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.out.empty()) throw UsageError("synth needs --out <directory>");
  std::vector<synth::DatasetEntry> entries;
  if (cfg.preset == "default") {
    entries = synth::default_preset();
  } else if (cfg.preset == "separable") {
    entries = synth::separable_preset();
  } else {
    throw UsageError("unknown preset '" + cfg.preset + "' (expected default or separable)");
  }
  if (cfg.noise >= 0.0) {
    for (auto& e : entries) e.archetype.noise_amplitude = cfg.noise;
  }
  const auto files = synth::generate_dataset(entries, cfg.seed, cfg.out);
  auto manifest = nlohmann::json::parse(read_file(files.manifest.string()));
  manifest["provenance"] = provenance(cfg);
  write_file_atomic(files.manifest.string(), manifest.dump(2) + "\n");
  ctx.out << "wrote " << manifest["swings"].size() << " swings to " << cfg.out << "\n";
  return kOk;
}

int cmd_extract(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  require_dir(cfg.clips_dir, "clips directory");
  require_file(cfg.roi_file, "ROI file");
  const auto opts = extract_options(cfg);
  const auto rois = mocap::load_rois(cfg.roi_file);
  if (rois.empty()) throw UsageError("ROI file '" + cfg.roi_file + "' lists no swings");

  const auto result = pipeline::extract_all(cfg.clips_dir, rois, opts);
  for (const auto& w : result.warnings) ctx.err << "warning: " << w << "\n";
  for (const auto& f : result.failures) ctx.err << "error: " << f.clip_id << ": " << f.message << "\n";
  if (!result.failures.empty() && cfg.strict) {
    ctx.err << result.failures.size() << " swing(s) failed; aborting under --strict\n";
    return kSwingFailure;
  }
  emit(ctx, cfg.out, features::serialize_features(result.features));
  ctx.err << "extracted " << result.features.size() << " of " << rois.size() << " swings\n";
  return kOk;
}

int cmd_train(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  require_file(cfg.features_file, "feature file");
  require_file(cfg.labels_file, "labels file");
  if (cfg.out.empty()) throw UsageError("train needs --out <model.json>");
  const auto criterion = single_criterion(cfg);
  const auto tc = train_config(cfg);
  const auto data = eval::align(features::load_features(cfg.features_file),
                                mocap::load_labels(cfg.labels_file), criterion);
  const auto model = rbf::train(data.features, data.labels, tc);
  for (const auto& w : model.diagnostics.warnings) ctx.err << "warning: " << w << "\n";
  auto j = rbf::to_json(model);
  j["criterion"] = criterion;
  j["provenance"] = provenance(cfg);
  write_file_atomic(cfg.out, j.dump(2) + "\n");
  ctx.out << "trained " << model.hidden_units() << "-unit model on " << model.training_size
          << " swings (k-means epochs: " << model.diagnostics.clustering_epochs << ")\n";
  return kOk;
}

int cmd_evaluate(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  require_file(cfg.model_file, "model file");
  require_file(cfg.features_file, "feature file");
  const auto model = rbf::model_from_json(nlohmann::json::parse(read_file(cfg.model_file)));
  const auto feats = features::load_features(cfg.features_file);

  std::map<std::string, Label> actual;
  const bool with_labels = !cfg.labels_file.empty();
  if (with_labels) {
    require_file(cfg.labels_file, "labels file");
    actual = mocap::labels_for(mocap::load_labels(cfg.labels_file), single_criterion(cfg));
  }
  std::string csv = with_labels ? "swing_id,score,label,actual\n" : "swing_id,score,label\n";
  std::vector<int> errors;
  for (const auto& f : feats) {
    const double score = rbf::predict(model, f);
    const auto label = rbf::decide(score);
    csv += f.swing_id + "," + format_double(score) + "," + std::string(to_string(label));
    if (with_labels) {
      const auto it = actual.find(f.swing_id);
      if (it == actual.end()) throw InvalidArgument("no label for swing '" + f.swing_id + "'");
      csv += "," + std::string(to_string(it->second));
      errors.push_back(label == it->second ? 0 : 1);
    }
    csv += "\n";
  }
  emit(ctx, cfg.out, csv);
  if (!errors.empty()) ctx.err << "accuracy: " << eval::format_percent(eval::accuracy(errors)) << "%\n";
  return kOk;
}

int cmd_loocv(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  require_file(cfg.features_file, "feature file");
  require_file(cfg.labels_file, "labels file");
  if (cfg.out.empty()) throw UsageError("loocv needs --out <directory>");
  const auto criterion = single_criterion(cfg);
  const auto tc = train_config(cfg);
  const auto data = eval::align(features::load_features(cfg.features_file),
                                mocap::load_labels(cfg.labels_file), criterion);
  const auto report = eval::repeat_loocv(data, tc, cfg.repeats, cfg.seed, criterion);
  auto j = eval::to_json(report);
  j["provenance"] = provenance(cfg);
  const auto text = eval::render_report(report);
  write_file_atomic((fs::path(cfg.out) / "loocv.json").string(), j.dump(2) + "\n");
  write_file_atomic((fs::path(cfg.out) / "loocv.txt").string(), text);
  ctx.out << text;
  return kOk;
}

int cmd_sweep(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  require_file(cfg.features_file, "feature file");
  require_file(cfg.labels_file, "labels file");
  if (cfg.out.empty()) throw UsageError("sweep needs --out <directory>");
  if (cfg.h_min < 1 || cfg.h_max < cfg.h_min) throw UsageError("invalid hidden-unit range");
  const auto feats = features::load_features(cfg.features_file);
  const auto records = mocap::load_labels(cfg.labels_file);
  const auto names = cfg.criteria.empty() ? mocap::criteria(records) : cfg.criteria;
  std::vector<eval::CriterionData> sets;
  for (const auto& c : names) sets.push_back({c, eval::align(feats, records, c)});
  std::vector<int> hs;
  for (int h = cfg.h_min; h <= cfg.h_max; ++h) hs.push_back(h);

  const auto table = eval::sweep_hidden_units(sets, hs, cfg.repeats, cfg.seed, train_config(cfg));
  auto j = eval::to_json(table);
  j["provenance"] = provenance(cfg);
  const auto text = eval::render_table(table);
  write_file_atomic((fs::path(cfg.out) / "sweep.json").string(), j.dump(2) + "\n");
  write_file_atomic((fs::path(cfg.out) / "sweep.txt").string(), text);
  ctx.out << text;
  return kOk;
}

std::string summarize_artifact(const std::string& path) {
  const auto j = nlohmann::json::parse(read_file(path));
  std::ostringstream s;
  s << "\n== " << path << " ==\n";
  auto line = [&](const nlohmann::json& r) {
    s << "  " << r.value("criterion", std::string("-")) << ", h=" << r.value("hidden_units", 0)
      << ": ";
    if (r.value("not_applicable", false)) {
      s << "N/A";
    } else {
      s << eval::format_percent(r.at("mean_accuracy").get<double>()) << "% over "
        << r.value("repeats", 0) << " repeats";
    }
    s << " (master seed " << r.value("master_seed", std::uint64_t{0}) << ")\n";
  };
  if (j.contains("reports")) {
    for (const auto& r : j.at("reports")) line(r);
  } else if (j.contains("mean_accuracy")) {
    line(j);
  } else if (j.contains("format") && j.at("format") == "swingid-rbf-model") {
    s << "  model: " << j.value("hidden_units", 0) << " hidden units, seed "
      << j.value("rng_seed", std::uint64_t{0}) << "\n";
  }
  if (j.contains("provenance")) s << "  provenance: " << j.at("provenance").dump() << "\n";
  return s.str();
}

int cmd_report(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.durations.empty()) throw UsageError("report needs at least one --durations value");
  std::vector<features::ReductionRow> rows;
  for (int d : cfg.durations) rows.push_back(features::reduction_report(d, cfg.markers));
  std::string text = "Input space dimensionality reduction (" + std::to_string(cfg.markers) +
                     " markers)\n" + features::render_reduction_table(rows);
  for (const auto& in : cfg.inputs) {
    require_file(in, "report input");
    text += summarize_artifact(in);
  }
  text += "\nrun configuration: " + provenance(cfg).dump() + "\n";
  emit(ctx, cfg.out, text);
  return kOk;
}

int cmd_export_viewer(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  require_dir(cfg.clips_dir, "clips directory");
  require_file(cfg.roi_file, "ROI file");
  if (cfg.out.empty()) throw UsageError("export-viewer needs --out <directory>");
  const auto opts = extract_options(cfg);
  std::vector<mocap::LabelRecord> labels;
  if (!cfg.labels_file.empty()) {
    require_file(cfg.labels_file, "labels file");
    labels = mocap::load_labels(cfg.labels_file);
  }
  const auto rois = mocap::load_rois(cfg.roi_file);
  if (rois.empty()) throw UsageError("ROI file '" + cfg.roi_file + "' lists no swings");
  int failures = 0;
  for (const auto& roi : rois) {
    try {
      auto read = opts.read;
      read.clip_id = roi.clip_id;
      const auto clip = mocap::parse_clip(fs::path(cfg.clips_dir) / (roi.clip_id + ".csv"), read);
      auto bundle = pipeline::viewer_bundle(clip, roi, labels, opts.sweet_spot);
      if (bundle.contains("kinematics_error")) {
        ctx.err << "warning: " << roi.clip_id << ": " << bundle["kinematics_error"].get<std::string>()
                << "\n";
      }
      bundle["provenance"] = provenance(cfg);
      write_file_atomic((fs::path(cfg.out) / (roi.clip_id + ".viewer.json")).string(),
                        bundle.dump() + "\n");
    } catch (const Error& e) {
      ++failures;
      ctx.err << "error: " << roi.clip_id << ": " << e.what() << "\n";
    }
  }
  if (failures > 0 && cfg.strict) return kSwingFailure;
  ctx.err << "exported " << (rois.size() - static_cast<std::size_t>(failures)) << " bundle(s)\n";
  return kOk;
}

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
  return {{"command", c.command},
          {"clips_dir", c.clips_dir},
          {"roi_file", c.roi_file},
          {"labels_file", c.labels_file},
          {"features_file", c.features_file},
          {"model_file", c.model_file},
          {"out", c.out},
          {"inputs", c.inputs},
          {"source_convention", c.source_convention},
          {"scale", c.scale},
          {"sample_rate_hz", c.sample_rate_hz},
          {"sweet_spot", c.sweet_spot},
          {"width_heuristic", c.width_heuristic},
          {"center_init", c.center_init},
          {"output_solver", c.output_solver},
          {"hidden_units", c.hidden_units},
          {"max_epochs", c.max_epochs},
          {"repeats", c.repeats},
          {"seed", c.seed},
          {"criteria", c.criteria},
          {"h_min", c.h_min},
          {"h_max", c.h_max},
          {"strict", c.strict},
          {"durations", c.durations},
          {"markers", c.markers},
          {"noise", c.noise},
          {"preset", c.preset}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"swingid: tennis swing technique assessment toolkit"};
  app.set_config("--config", "", "TOML file with option defaults; flags override it");
  app.fallthrough();
  app.require_subcommand(1, 1);

  auto seed = [&](CLI::App* s) { s->add_option("--seed", cfg.seed, "Master random seed"); };
  auto reading = [&](CLI::App* s) {
    s->add_option("--source-convention", cfg.source_convention,
                  "canonical | rh-xyz-zup | lh-xzy");
    s->add_option("--scale", cfg.scale, "Coordinate scale factor applied on ingestion");
    s->add_option("--sample-rate", cfg.sample_rate_hz, "Sample rate when the clip has none");
    s->add_option("--sweet-spot", cfg.sweet_spot, "circumcenter | centroid");
  };
  auto model = [&](CLI::App* s) {
    s->add_option("--hidden-units", cfg.hidden_units, "RBF hidden units");
    s->add_option("--width-heuristic", cfg.width_heuristic, "nearest-center | global");
    s->add_option("--center-init", cfg.center_init, "random-points | farthest-first");
    s->add_option("--output-solver", cfg.output_solver, "pseudo-inverse | gradient");
    s->add_option("--max-epochs", cfg.max_epochs, "Epoch cap for clustering and descent");
  };

  auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic 14-swing dataset");
  synth_cmd->add_option("--out", cfg.out, "Output directory");
  synth_cmd->add_option("--preset", cfg.preset, "default | separable");
  synth_cmd->add_option("--noise", cfg.noise, "Override marker noise amplitude (metres)");
  seed(synth_cmd);

  auto* extract_cmd = app.add_subcommand("extract", "Clips + ROIs -> 12-value feature CSV");
  extract_cmd->add_option("--clips", cfg.clips_dir, "Directory of <clip_id>.csv files");
  extract_cmd->add_option("--rois", cfg.roi_file, "ROI JSON file");
  extract_cmd->add_option("--out", cfg.out, "Feature CSV (stdout when omitted)");
  extract_cmd->add_flag("--strict", cfg.strict, "Abort without output if any swing fails");
  reading(extract_cmd);

  auto* train_cmd = app.add_subcommand("train", "Train an RBF model");
  train_cmd->add_option("--features", cfg.features_file, "Feature CSV");
  train_cmd->add_option("--labels", cfg.labels_file, "Labels CSV");
  train_cmd->add_option("--criterion", cfg.criteria, "Labelling criterion");
  train_cmd->add_option("--out", cfg.out, "Model JSON");
  model(train_cmd);
  seed(train_cmd);

  auto* eval_cmd = app.add_subcommand("evaluate", "Score feature vectors with a trained model");
  eval_cmd->add_option("--model", cfg.model_file, "Model JSON");
  eval_cmd->add_option("--features", cfg.features_file, "Feature CSV");
  eval_cmd->add_option("--labels", cfg.labels_file, "Optional labels CSV for accuracy");
  eval_cmd->add_option("--criterion", cfg.criteria, "Criterion used with --labels");
  eval_cmd->add_option("--out", cfg.out, "Prediction CSV (stdout when omitted)");

  auto* loocv_cmd = app.add_subcommand("loocv", "Repeated leave-one-out cross-validation");
  loocv_cmd->add_option("--features", cfg.features_file, "Feature CSV");
  loocv_cmd->add_option("--labels", cfg.labels_file, "Labels CSV");
  loocv_cmd->add_option("--criterion", cfg.criteria, "Labelling criterion");
  loocv_cmd->add_option("--repeats", cfg.repeats, "Number of repeated runs");
  loocv_cmd->add_option("--out", cfg.out, "Report directory");
  model(loocv_cmd);
  seed(loocv_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "Hidden-unit sweep across criteria");
  sweep_cmd->add_option("--features", cfg.features_file, "Feature CSV");
  sweep_cmd->add_option("--labels", cfg.labels_file, "Labels CSV");
  sweep_cmd->add_option("--criterion", cfg.criteria, "Criteria (default: all in labels file)");
  sweep_cmd->add_option("--repeats", cfg.repeats, "Number of repeated runs");
  sweep_cmd->add_option("--h-min", cfg.h_min, "Smallest hidden-unit count");
  sweep_cmd->add_option("--h-max", cfg.h_max, "Largest hidden-unit count");
  sweep_cmd->add_option("--out", cfg.out, "Report directory");
  model(sweep_cmd);
  seed(sweep_cmd);

  auto* report_cmd = app.add_subcommand("report", "Dimensionality-reduction table and run summary");
  report_cmd->add_option("--durations", cfg.durations, "ROI durations in frames")->delimiter(',');
  report_cmd->add_option("--markers", cfg.markers, "Marker count");
  report_cmd->add_option("--input", cfg.inputs, "JSON artifacts to summarize");
  report_cmd->add_option("--out", cfg.out, "Report text file (stdout when omitted)");
  seed(report_cmd);

  auto* viewer_cmd = app.add_subcommand("export-viewer", "Write stick-figure replay bundles");
  viewer_cmd->add_option("--clips", cfg.clips_dir, "Directory of <clip_id>.csv files");
  viewer_cmd->add_option("--rois", cfg.roi_file, "ROI JSON file");
  viewer_cmd->add_option("--labels", cfg.labels_file, "Optional labels CSV");
  viewer_cmd->add_option("--out", cfg.out, "Bundle directory");
  viewer_cmd->add_flag("--strict", cfg.strict, "Nonzero exit if any clip fails");
  reading(viewer_cmd);

  std::vector<const char*> argv;
  argv.push_back("swingid");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  const Context ctx{cfg, out, err};
  try {
    if (cfg.command == "synth") return cmd_synth(ctx);
    if (cfg.command == "extract") return cmd_extract(ctx);
    if (cfg.command == "train") return cmd_train(ctx);
    if (cfg.command == "evaluate") return cmd_evaluate(ctx);
    if (cfg.command == "loocv") return cmd_loocv(ctx);
    if (cfg.command == "sweep") return cmd_sweep(ctx);
    if (cfg.command == "report") return cmd_report(ctx);
    if (cfg.command == "export-viewer") return cmd_export_viewer(ctx);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const rbf::TrainingRefused& e) {
    err << "training refused: " << e.what() << "\n";
    return kRefused;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << "\n";
    return kData;
  }
  err << "unknown command\n";
  return kUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace swingid::cli
