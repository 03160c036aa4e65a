#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace swingid::cli {

enum ExitCode : int {
  kOk = 0,
  kSwingFailure = 1,  // per-swing failures under --strict
  kUsage = 2,
  kIo = 3,
  kData = 4,        // malformed inputs
  kRefused = 5,     // training refused
};

/// Resolved options of one command run. Every JSON artifact embeds it.
struct RunConfig {
  std::string command;
  // paths
  std::string clips_dir;
  std::string roi_file;
  std::string labels_file;
  std::string features_file;
  std::string model_file;
  std::string out;  // output file or directory, per command
  std::vector<std::string> inputs;  // report: JSON artifacts to summarize
  // pipeline options
  std::string source_convention = "canonical";
  double scale = 1.0;
  double sample_rate_hz = 50.0;
  std::string sweet_spot = "circumcenter";
  std::string width_heuristic = "nearest-center";
  std::string center_init = "random-points";
  std::string output_solver = "pseudo-inverse";
  int hidden_units = 4;
  int max_epochs = 100;
  int repeats = 12;
  std::uint64_t seed = 0;
  std::vector<std::string> criteria;
  int h_min = 2;
  int h_max = 6;
  bool strict = false;
  std::vector<int> durations = {13, 10, 7};
  int markers = 22;
  double noise = -1.0;  // synth: < 0 keeps the preset's noise
  std::string preset = "default";
};

nlohmann::json to_json(const RunConfig& config);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace swingid::cli
