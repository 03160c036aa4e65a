#pragma once

// Marker clip ingestion: CSV clips, ROI selections and per-criterion labels.
//
// Clip CSV layout (UTF-8):
//   # sample_rate_hz=50            optional metadata lines, '#' prefixed
//   frame,R1_x,R1_y,R1_z,...       header, one x/y/z triple per marker
//   0,0.1,0.2,1.3,...              one row per sample, "NaN" when missing
//
// Every clip is held in the canonical frame: X forward toward the net,
// Y lateral, Z vertical up (right-handed).

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "swingid/common.hpp"

namespace swingid::mocap {

inline constexpr std::string_view kRacquetTip1 = "R1";
inline constexpr std::string_view kRacquetTip2 = "R2";
inline constexpr std::string_view kRacquetHandle = "H";
inline constexpr std::size_t kFullBodyMarkers = 22;

enum class SourceConvention {
  canonical,   // identity
  rh_xyz_zup,  // right-handed lab export, Z up; identity onto canonical
  lh_xzy,      // left-handed XZY internal layout: (x, y, z) -> (x, z, -y)
};

SourceConvention parse_convention(std::string_view name);
std::string_view to_string(SourceConvention convention);

/// Maps a point expressed in `convention` onto the canonical frame.
Vec3 convert_handedness(const Vec3& p, SourceConvention convention);
/// Inverse of convert_handedness.
Vec3 revert_handedness(const Vec3& p, SourceConvention convention);

struct SwingClip {
  std::string clip_id;
  double sample_rate_hz = 50.0;
  std::vector<std::string> markers;
  /// frames[t][m] is marker m at sample t.
  std::vector<std::vector<Vec3>> frames;

  std::size_t frame_count() const { return frames.size(); }
  std::size_t marker_count() const { return markers.size(); }
  std::optional<std::size_t> marker_index(std::string_view name) const;
  /// Throws InvalidArgument if the marker is absent.
  std::size_t require_marker(std::string_view name) const;
  Path3 marker_path(std::string_view name) const;
};

/// Throws InvalidArgument when a structural invariant is broken.
void validate(const SwingClip& clip);

struct ClipReadOptions {
  SourceConvention convention = SourceConvention::canonical;
  /// Multiplies every coordinate on ingestion (e.g. 0.001 for millimetres).
  double scale = 1.0;
  /// Used when the file carries no sample_rate_hz metadata line.
  double sample_rate_hz = 50.0;
  /// Defaults to the file stem when reading from disk.
  std::string clip_id;
};

/// Thrown for malformed clip text; `row` is the 1-based data row, 0 for the header.
class ClipFormatError : public ParseError {
 public:
  ClipFormatError(std::size_t row, const std::string& what);
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

SwingClip parse_clip_text(std::string_view text, const ClipReadOptions& options);
SwingClip parse_clip(const std::filesystem::path& path, const ClipReadOptions& options = {});
/// Canonical-frame CSV; numbers are written in shortest round-trip form.
std::string serialize_clip(const SwingClip& clip);
void write_clip(const std::filesystem::path& path, const SwingClip& clip);

struct RoiSpec {
  std::string clip_id;
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;  // inclusive

  std::size_t duration() const { return end_frame - start_frame + 1; }
  bool operator==(const RoiSpec&) const = default;
};

inline constexpr std::size_t kMinRoiFrames = 7;
inline constexpr std::size_t kMaxRoiFrames = 13;

/// Non-empty when the ROI duration lies outside the usual 7..13 frame window.
std::optional<std::string> roi_duration_warning(const RoiSpec& roi);

/// Racquet markers with missing samples inside a ROI.
class MissingSampleError : public Error {
 public:
  MissingSampleError(std::string clip_id, std::vector<std::size_t> frames);
  const std::vector<std::size_t>& frames() const { return frames_; }

 private:
  std::vector<std::size_t> frames_;
};

/// Sub-clip of frames [start, end]. The three racquet markers must be free
/// of NaN samples over that window.
SwingClip slice_roi(const SwingClip& clip, const RoiSpec& roi);

nlohmann::json roi_to_json(const RoiSpec& roi);
RoiSpec roi_from_json(const nlohmann::json& j);
/// Accepts a single ROI object or an array of them.
std::vector<RoiSpec> parse_rois(std::string_view text);
std::vector<RoiSpec> load_rois(const std::filesystem::path& path);
std::string serialize_rois(const std::vector<RoiSpec>& rois);

struct LabelRecord {
  std::string clip_id;
  std::string criterion;
  Label label = Label::good;
  bool operator==(const LabelRecord&) const = default;
};

std::vector<LabelRecord> parse_labels(std::string_view text);
std::vector<LabelRecord> load_labels(const std::filesystem::path& path);
std::string serialize_labels(const std::vector<LabelRecord>& records);

/// Percentage of `bad` records under `criterion`; throws if there are none.
double bad_fraction(const std::vector<LabelRecord>& records, std::string_view criterion);
/// clip_id -> label for one criterion.
std::map<std::string, Label> labels_for(const std::vector<LabelRecord>& records,
                                        std::string_view criterion);
std::vector<std::string> criteria(const std::vector<LabelRecord>& records);

}  // namespace swingid::mocap
