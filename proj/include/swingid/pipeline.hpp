#pragma once

// End-to-end glue shared by the CLI and the Python bindings: clip + ROI in,
// feature vector or viewer bundle out.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "swingid/features.hpp"
#include "swingid/kinematics.hpp"
#include "swingid/mocap_io.hpp"

namespace swingid::pipeline {

struct ExtractOptions {
  mocap::ClipReadOptions read;
  kinematics::SweetSpotMethod sweet_spot = kinematics::SweetSpotMethod::circumcenter;
};

/// slice_roi -> kinematics -> assemble_features for one swing.
features::FeatureVector extract_swing(const mocap::SwingClip& clip, const mocap::RoiSpec& roi,
                                      kinematics::SweetSpotMethod method =
                                          kinematics::SweetSpotMethod::circumcenter);

struct SwingFailure {
  std::string clip_id;
  std::string message;
};

struct ExtractResult {
  std::vector<features::FeatureVector> features;  // ROI order, failures skipped
  std::vector<SwingFailure> failures;
  std::vector<std::string> warnings;
};

/// Reads `<clips_dir>/<clip_id>.csv` for every ROI. Per-swing errors are
/// collected rather than thrown.
ExtractResult extract_all(const std::filesystem::path& clips_dir,
                          const std::vector<mocap::RoiSpec>& rois, const ExtractOptions& options);

inline constexpr int kViewerBundleVersion = 1;

/// Stick-figure replay bundle: clip geometry (NaN as null), connectivity
/// restricted to existing markers, ROI, labels, and the sweet-spot
/// positions / flow / tips over the ROI when they can be computed.
nlohmann::json viewer_bundle(const mocap::SwingClip& clip, const mocap::RoiSpec& roi,
                             const std::vector<mocap::LabelRecord>& labels,
                             kinematics::SweetSpotMethod method =
                                 kinematics::SweetSpotMethod::circumcenter);

}  // namespace swingid::pipeline
