#pragma once

// Parametric generator of labelled synthetic forehand swings.
//
// The sweet spot follows x(t) = speed * (t - t_mid) through the ROI, with
// z(x) and y(x) given by the archetype's sagittal and transverse quadratics.
// R1, R2 and H sit on a circle around the sweet spot in the string-bed
// plane, so their circumcenter is the generating point. The 19 body markers
// are cosmetic and only serve the stick-figure replay.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "swingid/common.hpp"
#include "swingid/mocap_io.hpp"

namespace swingid::synth {

struct Quadratic {
  double p2 = 0.0;
  double p1 = 0.0;
  double p0 = 0.0;

  double operator()(double x) const { return (p2 * x + p1) * x + p0; }
};

struct SwingArchetype {
  std::string name;
  int duration_frames = 10;
  Quadratic sagittal;    // height z as a function of forward x
  Quadratic transverse;  // lateral y as a function of forward x
  double speed_scale = 0.12;      // forward advance per frame, metres
  double noise_amplitude = 0.0;   // uniform per-coordinate marker noise, metres
  std::vector<std::pair<std::string, Label>> labels;  // criterion -> label, in file order
  /// Which feature dimensions the archetype's fault perturbs (documentation).
  std::string perturbs;
};

/// Throws InvalidArgument for durations outside [3, 13], negative noise,
/// non-positive speed, or noise too large to keep the racquet triad valid.
void validate(const SwingArchetype& archetype);

inline constexpr int kPaddingFrames = 4;
inline constexpr double kRacquetRadius = 0.14;
inline constexpr double kMaxNoise = 0.01;

struct GeneratedSwing {
  mocap::SwingClip clip;
  mocap::RoiSpec roi;
  std::vector<mocap::LabelRecord> labels;
  Path3 sweet_spot;  // noise-free generating path over the whole clip
  SwingArchetype archetype;  // the parameters actually used
};

/// Marker names in clip column order: 19 body markers, then R1, R2, H.
const std::vector<std::string>& marker_names();
/// Stick-figure segments as pairs of marker names.
const std::vector<std::pair<std::string, std::string>>& stick_figure_segments();

GeneratedSwing generate_swing(const SwingArchetype& archetype, std::uint64_t seed,
                              std::string clip_id = "swing");

/// Random archetype with zero noise and coefficients in a plausible range.
SwingArchetype random_archetype(std::uint64_t seed);

struct DatasetEntry {
  SwingArchetype archetype;
  int count = 1;
  /// Each coefficient of both quadratics is shifted by U(-jitter, jitter).
  double coefficient_jitter = 0.0;
  /// Draw each swing's ROI duration uniformly from 7..13 frames.
  bool vary_duration = false;
};

/// 14 swings: 4 "bad" under novice (28.6%), 10 under intermediate (71.4%).
std::vector<DatasetEntry> default_preset();

/// 14 swings in four groups placed at c0 + v, c0 - v ("good") and c0 + w,
/// c0 - w ("bad") in coefficient space, under the single criterion
/// "separable". Two centers cannot split the classes; four can.
std::vector<DatasetEntry> separable_preset();

std::vector<GeneratedSwing> generate_swings(std::span<const DatasetEntry> entries,
                                            std::uint64_t seed);

nlohmann::json to_json(const SwingArchetype& archetype);
nlohmann::json manifest(std::span<const DatasetEntry> entries, std::span<const GeneratedSwing> swings,
                        std::uint64_t seed);

struct DatasetFiles {
  std::filesystem::path clips_dir;
  std::filesystem::path rois;
  std::filesystem::path labels;
  std::filesystem::path manifest;
};

/// Writes clips/<id>.csv, rois.json, labels.csv and manifest.json under `out_dir`.
DatasetFiles generate_dataset(std::span<const DatasetEntry> entries, std::uint64_t seed,
                              const std::filesystem::path& out_dir);

}  // namespace swingid::synth
