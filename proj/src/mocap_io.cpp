#include "swingid/mocap_io.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace swingid::mocap {

namespace {

constexpr std::array<std::string_view, 3> kAxisSuffix = {"_x", "_y", "_z"};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Splits text into lines, dropping a trailing '\r' and a final empty line.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace

SourceConvention parse_convention(std::string_view name) {
  if (name == "canonical") return SourceConvention::canonical;
  if (name == "rh-xyz-zup") return SourceConvention::rh_xyz_zup;
  if (name == "lh-xzy") return SourceConvention::lh_xzy;
  throw ParseError("unknown source convention '" + std::string(name) +
                   "' (expected canonical, rh-xyz-zup or lh-xzy)");
}

std::string_view to_string(SourceConvention convention) {
  switch (convention) {
    case SourceConvention::canonical: return "canonical";
    case SourceConvention::rh_xyz_zup: return "rh-xyz-zup";
    case SourceConvention::lh_xzy: return "lh-xzy";
  }
  return "canonical";
}

Vec3 convert_handedness(const Vec3& p, SourceConvention convention) {
  switch (convention) {
    case SourceConvention::canonical:
    case SourceConvention::rh_xyz_zup:
      return p;
    case SourceConvention::lh_xzy:
      return {p.x(), p.z(), -p.y()};
  }
  throw ParseError("unknown source convention");
}

Vec3 revert_handedness(const Vec3& p, SourceConvention convention) {
  switch (convention) {
    case SourceConvention::canonical:
    case SourceConvention::rh_xyz_zup:
      return p;
    case SourceConvention::lh_xzy:
      return {p.x(), -p.z(), p.y()};
  }
  throw ParseError("unknown source convention");
}

std::optional<std::size_t> SwingClip::marker_index(std::string_view name) const {
  const auto it = std::find(markers.begin(), markers.end(), name);
  if (it == markers.end()) return std::nullopt;
  return static_cast<std::size_t>(it - markers.begin());
}

std::size_t SwingClip::require_marker(std::string_view name) const {
  if (auto idx = marker_index(name)) return *idx;
  throw InvalidArgument("clip '" + clip_id + "' has no marker '" + std::string(name) + "'");
}

Path3 SwingClip::marker_path(std::string_view name) const {
  const auto idx = require_marker(name);
  Path3 path;
  path.reserve(frames.size());
  for (const auto& frame : frames) path.push_back(frame[idx]);
  return path;
}

void validate(const SwingClip& clip) {
  if (!(clip.sample_rate_hz > 0.0)) throw InvalidArgument("sample_rate_hz must be positive");
  if (clip.frames.empty()) throw InvalidArgument("clip '" + clip.clip_id + "' has no frames");
  if (clip.markers.empty()) throw InvalidArgument("clip '" + clip.clip_id + "' has no markers");
  std::set<std::string> seen;
  for (const auto& name : clip.markers) {
    if (!seen.insert(name).second) throw InvalidArgument("duplicate marker name '" + name + "'");
  }
  for (std::size_t t = 0; t < clip.frames.size(); ++t) {
    if (clip.frames[t].size() != clip.markers.size()) {
      throw InvalidArgument("frame " + std::to_string(t) + " has " +
                            std::to_string(clip.frames[t].size()) + " markers, expected " +
                            std::to_string(clip.markers.size()));
    }
  }
}

ClipFormatError::ClipFormatError(std::size_t row, const std::string& what)
    : ParseError(row == 0 ? "header: " + what : "row " + std::to_string(row) + ": " + what),
      row_(row) {}

SwingClip parse_clip_text(std::string_view text, const ClipReadOptions& options) {
  SwingClip clip;
  clip.clip_id = options.clip_id;
  clip.sample_rate_hz = options.sample_rate_hz;

  const auto lines = lines_of(text);
  std::size_t i = 0;
  for (; i < lines.size() && !lines[i].empty() && lines[i].front() == '#'; ++i) {
    auto meta = trim(lines[i].substr(1));
    const auto eq = meta.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = trim(meta.substr(0, eq));
    const auto value = trim(meta.substr(eq + 1));
    if (key == "sample_rate_hz") {
      try {
        clip.sample_rate_hz = parse_double(value);
      } catch (const ParseError& e) {
        throw ClipFormatError(0, std::string("bad sample_rate_hz: ") + e.what());
      }
    }
  }
  if (i == lines.size()) throw ClipFormatError(0, "missing header row");

  const auto header = split(lines[i], ',');
  if (header.empty() || trim(header[0]) != "frame") {
    throw ClipFormatError(0, "first column must be 'frame'");
  }
  if ((header.size() - 1) % 3 != 0 || header.size() == 1) {
    throw ClipFormatError(0, "expected frame followed by x/y/z triples, got " +
                                 std::to_string(header.size()) + " columns");
  }
  const std::size_t n = (header.size() - 1) / 3;
  for (std::size_t m = 0; m < n; ++m) {
    std::string name;
    for (std::size_t a = 0; a < 3; ++a) {
      const auto col = trim(header[1 + 3 * m + a]);
      if (!ends_with(col, kAxisSuffix[a])) {
        throw ClipFormatError(0, "column '" + std::string(col) + "' should end in " +
                                     std::string(kAxisSuffix[a]));
      }
      const auto base = std::string(col.substr(0, col.size() - 2));
      if (base.empty()) throw ClipFormatError(0, "empty marker name");
      if (a == 0) {
        name = base;
      } else if (base != name) {
        throw ClipFormatError(0, "columns for marker '" + name + "' are not contiguous");
      }
    }
    clip.markers.push_back(name);
  }
  {
    std::set<std::string> seen(clip.markers.begin(), clip.markers.end());
    if (seen.size() != clip.markers.size()) throw ClipFormatError(0, "duplicate marker names");
  }

  std::size_t row = 0;
  for (++i; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    ++row;
    const auto fields = split(lines[i], ',');
    if (fields.size() != header.size()) {
      throw ClipFormatError(row, "expected " + std::to_string(3 * n) + " values, got " +
                                     std::to_string(fields.size() - 1));
    }
    std::vector<Vec3> frame(n);
    try {
      parse_double(fields[0]);
      for (std::size_t m = 0; m < n; ++m) {
        const Vec3 raw(parse_double(fields[1 + 3 * m]), parse_double(fields[2 + 3 * m]),
                       parse_double(fields[3 + 3 * m]));
        frame[m] = convert_handedness(raw * options.scale, options.convention);
      }
    } catch (const ClipFormatError&) {
      throw;
    } catch (const ParseError& e) {
      throw ClipFormatError(row, e.what());
    }
    clip.frames.push_back(std::move(frame));
  }
  if (clip.frames.empty()) throw ClipFormatError(0, "no data rows");
  if (!(clip.sample_rate_hz > 0.0)) throw ClipFormatError(0, "sample_rate_hz must be positive");
  return clip;
}

SwingClip parse_clip(const std::filesystem::path& path, const ClipReadOptions& options) {
  ClipReadOptions opts = options;
  if (opts.clip_id.empty()) opts.clip_id = path.stem().string();
  return parse_clip_text(read_file(path.string()), opts);
}

std::string serialize_clip(const SwingClip& clip) {
  std::string out;
  out += "# sample_rate_hz=" + format_double(clip.sample_rate_hz) + "\n";
  out += "frame";
  for (const auto& name : clip.markers) {
    for (auto suffix : kAxisSuffix) {
      out += ',';
      out += name;
      out += suffix;
    }
  }
  out += '\n';
  for (std::size_t t = 0; t < clip.frames.size(); ++t) {
    out += std::to_string(t);
    for (const auto& p : clip.frames[t]) {
      for (int a = 0; a < 3; ++a) {
        out += ',';
        out += format_double(p[a]);
      }
    }
    out += '\n';
  }
  return out;
}

void write_clip(const std::filesystem::path& path, const SwingClip& clip) {
  write_file_atomic(path.string(), serialize_clip(clip));
}

std::optional<std::string> roi_duration_warning(const RoiSpec& roi) {
  const auto d = roi.duration();
  if (d >= kMinRoiFrames && d <= kMaxRoiFrames) return std::nullopt;
  return "ROI of '" + roi.clip_id + "' spans " + std::to_string(d) +
         " frames, outside the usual 7..13 frame action zone";
}

MissingSampleError::MissingSampleError(std::string clip_id, std::vector<std::size_t> frames)
    : Error([&] {
        std::string msg = "clip '" + clip_id + "': missing racquet samples at frame(s)";
        for (auto f : frames) msg += " " + std::to_string(f);
        return msg;
      }()),
      frames_(std::move(frames)) {}

SwingClip slice_roi(const SwingClip& clip, const RoiSpec& roi) {
  if (roi.start_frame > roi.end_frame || roi.end_frame >= clip.frame_count()) {
    throw InvalidArgument("ROI [" + std::to_string(roi.start_frame) + ", " +
                          std::to_string(roi.end_frame) + "] outside clip '" + clip.clip_id +
                          "' of " + std::to_string(clip.frame_count()) + " frames");
  }
  const std::array<std::size_t, 3> racquet = {clip.require_marker(kRacquetTip1),
                                              clip.require_marker(kRacquetTip2),
                                              clip.require_marker(kRacquetHandle)};
  std::vector<std::size_t> missing;
  for (auto t = roi.start_frame; t <= roi.end_frame; ++t) {
    for (auto m : racquet) {
      if (clip.frames[t][m].hasNaN()) {
        missing.push_back(t);
        break;
      }
    }
  }
  if (!missing.empty()) throw MissingSampleError(clip.clip_id, std::move(missing));

  SwingClip out;
  out.clip_id = clip.clip_id;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.markers = clip.markers;
  out.frames.assign(clip.frames.begin() + static_cast<std::ptrdiff_t>(roi.start_frame),
                    clip.frames.begin() + static_cast<std::ptrdiff_t>(roi.end_frame) + 1);
  return out;
}

nlohmann::json roi_to_json(const RoiSpec& roi) {
  return {{"clip_id", roi.clip_id}, {"start_frame", roi.start_frame}, {"end_frame", roi.end_frame}};
}

RoiSpec roi_from_json(const nlohmann::json& j) {
  try {
    RoiSpec roi;
    roi.clip_id = j.at("clip_id").get<std::string>();
    const auto start = j.at("start_frame").get<long long>();
    const auto end = j.at("end_frame").get<long long>();
    if (start < 0 || end < start) {
      throw ParseError("ROI for '" + roi.clip_id + "' must satisfy 0 <= start_frame <= end_frame");
    }
    roi.start_frame = static_cast<std::size_t>(start);
    roi.end_frame = static_cast<std::size_t>(end);
    return roi;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed ROI: ") + e.what());
  }
}

std::vector<RoiSpec> parse_rois(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("ROI file is not valid JSON: ") + e.what());
  }
  std::vector<RoiSpec> rois;
  if (j.is_array()) {
    for (const auto& item : j) rois.push_back(roi_from_json(item));
  } else {
    rois.push_back(roi_from_json(j));
  }
  std::set<std::string> ids;
  for (const auto& r : rois) {
    if (!ids.insert(r.clip_id).second) throw ParseError("duplicate ROI for clip '" + r.clip_id + "'");
  }
  return rois;
}

std::vector<RoiSpec> load_rois(const std::filesystem::path& path) {
  return parse_rois(read_file(path.string()));
}

std::string serialize_rois(const std::vector<RoiSpec>& rois) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rois) arr.push_back(roi_to_json(r));
  return arr.dump(2) + "\n";
}

std::vector<LabelRecord> parse_labels(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || trim(lines[0]) != "clip_id,criterion,label") {
    throw ParseError("labels file must start with header 'clip_id,criterion,label'");
  }
  std::vector<LabelRecord> records;
  std::set<std::pair<std::string, std::string>> keys;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto fields = split(lines[i], ',');
    if (fields.size() != 3) {
      throw ParseError("labels line " + std::to_string(i + 1) + ": expected 3 fields");
    }
    LabelRecord rec{std::string(trim(fields[0])), std::string(trim(fields[1])),
                    parse_label(trim(fields[2]))};
    if (rec.clip_id.empty() || rec.criterion.empty()) {
      throw ParseError("labels line " + std::to_string(i + 1) + ": empty clip_id or criterion");
    }
    if (!keys.emplace(rec.clip_id, rec.criterion).second) {
      throw ParseError("duplicate label for (" + rec.clip_id + ", " + rec.criterion + ")");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<LabelRecord> load_labels(const std::filesystem::path& path) {
  return parse_labels(read_file(path.string()));
}

std::string serialize_labels(const std::vector<LabelRecord>& records) {
  std::string out = "clip_id,criterion,label\n";
  for (const auto& r : records) {
    out += r.clip_id + "," + r.criterion + "," + std::string(to_string(r.label)) + "\n";
  }
  return out;
}

double bad_fraction(const std::vector<LabelRecord>& records, std::string_view criterion) {
  std::size_t total = 0;
  std::size_t bad = 0;
  for (const auto& r : records) {
    if (r.criterion != criterion) continue;
    ++total;
    if (r.label == Label::bad) ++bad;
  }
  if (total == 0) throw InvalidArgument("no labels for criterion '" + std::string(criterion) + "'");
  return 100.0 * static_cast<double>(bad) / static_cast<double>(total);
}

std::map<std::string, Label> labels_for(const std::vector<LabelRecord>& records,
                                        std::string_view criterion) {
  std::map<std::string, Label> out;
  for (const auto& r : records) {
    if (r.criterion == criterion) out[r.clip_id] = r.label;
  }
  return out;
}

std::vector<std::string> criteria(const std::vector<LabelRecord>& records) {
  std::vector<std::string> out;
  for (const auto& r : records) {
    if (std::find(out.begin(), out.end(), r.criterion) == out.end()) out.push_back(r.criterion);
  }
  return out;
}

}  // namespace swingid::mocap
