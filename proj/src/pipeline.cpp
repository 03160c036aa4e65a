#include "swingid/pipeline.hpp"

#include <cmath>

#include "swingid/synthgen.hpp"

namespace swingid::pipeline {

features::FeatureVector extract_swing(const mocap::SwingClip& clip, const mocap::RoiSpec& roi,
                                      kinematics::SweetSpotMethod method) {
  const auto window = mocap::slice_roi(clip, roi);
  const auto k = kinematics::analyze(window, method);
  return features::assemble_features(k.path, k.tips, clip.clip_id);
}

ExtractResult extract_all(const std::filesystem::path& clips_dir,
                          const std::vector<mocap::RoiSpec>& rois, const ExtractOptions& options) {
  ExtractResult result;
  for (const auto& roi : rois) {
    if (auto w = mocap::roi_duration_warning(roi)) result.warnings.push_back(*w);
    try {
      auto read = options.read;
      read.clip_id = roi.clip_id;
      const auto clip = mocap::parse_clip(clips_dir / (roi.clip_id + ".csv"), read);
      result.features.push_back(extract_swing(clip, roi, options.sweet_spot));
    } catch (const Error& e) {
      result.failures.push_back({roi.clip_id, e.what()});
    }
  }
  return result;
}

namespace {

nlohmann::json point_json(const Vec3& p) {
  auto coord = [](double v) -> nlohmann::json {
    if (std::isnan(v)) return nullptr;
    return v;
  };
  return {coord(p.x()), coord(p.y()), coord(p.z())};
}

nlohmann::json path_json(const Path3& path) {
  auto arr = nlohmann::json::array();
  for (const auto& p : path) arr.push_back(point_json(p));
  return arr;
}

}  // namespace

nlohmann::json viewer_bundle(const mocap::SwingClip& clip, const mocap::RoiSpec& roi,
                             const std::vector<mocap::LabelRecord>& labels,
                             kinematics::SweetSpotMethod method) {
  auto frames = nlohmann::json::array();
  for (const auto& frame : clip.frames) {
    auto row = nlohmann::json::array();
    for (const auto& p : frame) row.push_back(point_json(p));
    frames.push_back(std::move(row));
  }

  auto connectivity = nlohmann::json::array();
  for (const auto& [a, b] : synth::stick_figure_segments()) {
    if (clip.marker_index(a) && clip.marker_index(b)) connectivity.push_back({a, b});
  }

  auto label_json = nlohmann::json::array();
  for (const auto& r : labels) {
    if (r.clip_id == clip.clip_id) {
      label_json.push_back({{"criterion", r.criterion}, {"label", to_string(r.label)}});
    }
  }

  nlohmann::json bundle = {{"format", "swingid-viewer-bundle"},
                           {"version", kViewerBundleVersion},
                           {"clip",
                            {{"clip_id", clip.clip_id},
                             {"sample_rate_hz", clip.sample_rate_hz},
                             {"markers", clip.markers},
                             {"frames", frames}}},
                           {"connectivity", connectivity},
                           {"roi", mocap::roi_to_json(roi)},
                           {"labels", label_json}};
  try {
    const auto k = kinematics::analyze(mocap::slice_roi(clip, roi), method);
    bundle["kinematics"] = {{"frame_offset", roi.start_frame},
                            {"sweet_spot_method", kinematics::to_string(method)},
                            {"positions", path_json(k.path.positions)},
                            {"flow", path_json(k.flow.vectors)},
                            {"tips", path_json(k.tips.tips)}};
    try {
      const auto fv = features::assemble_features(k.path, k.tips, clip.clip_id);
      bundle["features"] = {{"names", features::feature_names()}, {"values", fv.values}};
    } catch (const Error& e) {
      bundle["features_error"] = e.what();
    }
  } catch (const Error& e) {
    bundle["kinematics"] = nullptr;
    bundle["kinematics_error"] = e.what();
  }
  return bundle;
}

}  // namespace swingid::pipeline
