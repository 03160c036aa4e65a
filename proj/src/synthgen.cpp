#include "swingid/synthgen.hpp"

#include <cmath>
#include <random>

namespace swingid::synth {

namespace {

const Vec3 kUp(0.0, 0.0, 1.0);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

struct RacquetPose {
  Vec3 r1, r2, handle, axis;
};

// Long axis u points from the throat toward the tip; the string bed spans
// (u, v). The three markers lie on a circle of kRacquetRadius around `ss`.
RacquetPose racquet_pose(const Vec3& ss, double progress) {
  const double sweep = -0.8 + 1.6 * progress;
  const Vec3 u = Vec3(std::sin(sweep), -std::cos(sweep), 0.15).normalized();
  const Vec3 v = (kUp - kUp.dot(u) * u).normalized();
  const double c = std::cos(50.0 * M_PI / 180.0);
  const double s = std::sin(50.0 * M_PI / 180.0);
  return {ss + kRacquetRadius * (c * u + s * v), ss + kRacquetRadius * (c * u - s * v),
          ss - kRacquetRadius * u, u};
}

// Cosmetic body, in marker_names() order (first 19 entries).
std::vector<Vec3> body_pose(double progress, const RacquetPose& racquet) {
  const double yaw = -0.6 + 1.2 * progress;
  const Vec3 facing(std::cos(yaw), std::sin(yaw), 0.0);
  const Vec3 right(std::sin(yaw), -std::cos(yaw), 0.0);
  const Vec3 sacrum(-0.3 + 0.3 * progress, 0.75, 0.95);
  const Vec3 neck = sacrum + Vec3(0.0, 0.0, 0.55);
  const Vec3 head = neck + Vec3(0.0, 0.0, 0.2);
  const Vec3 l_sho = neck - 0.2 * right;
  const Vec3 r_sho = neck + 0.2 * right;
  const Vec3 r_wri = racquet.handle - 0.08 * racquet.axis;
  const Vec3 r_elb = 0.5 * (r_sho + r_wri) + Vec3(0.0, 0.0, -0.12);
  const Vec3 l_elb = l_sho + 0.15 * facing + Vec3(0.0, 0.0, -0.2);
  const Vec3 l_wri = l_elb + 0.2 * facing;
  const Vec3 stance_right(0.0, -1.0, 0.0);
  const Vec3 foot_fwd(1.0, 0.0, 0.0);
  const Vec3 l_hip = sacrum - 0.12 * right;
  const Vec3 r_hip = sacrum + 0.12 * right;
  const Vec3 l_ank = Vec3(-0.15, 0.75, 0.08) - 0.18 * stance_right;
  const Vec3 r_ank = Vec3(-0.15, 0.75, 0.08) + 0.18 * stance_right;
  const Vec3 l_kne = 0.5 * (l_hip + l_ank) + 0.08 * foot_fwd;
  const Vec3 r_kne = 0.5 * (r_hip + r_ank) + 0.08 * foot_fwd;
  const Vec3 l_toe = l_ank + 0.15 * foot_fwd + Vec3(0.0, 0.0, -0.05);
  const Vec3 r_toe = r_ank + 0.15 * foot_fwd + Vec3(0.0, 0.0, -0.05);
  const Vec3 l_hee = l_ank - 0.06 * foot_fwd + Vec3(0.0, 0.0, -0.03);
  const Vec3 r_hee = r_ank - 0.06 * foot_fwd + Vec3(0.0, 0.0, -0.03);
  return {head,  neck,  l_sho, r_sho, l_elb, r_elb, l_wri, r_wri, sacrum, l_hip,
          r_hip, l_kne, r_kne, l_ank, r_ank, l_toe, r_toe, l_hee, r_hee};
}

nlohmann::json quad_json(const Quadratic& q) { return {q.p2, q.p1, q.p0}; }

}  // namespace

const std::vector<std::string>& marker_names() {
  static const std::vector<std::string> names = {
      "HEAD",  "NECK",  "L_SHO", "R_SHO", "L_ELB", "R_ELB", "L_WRI", "R_WRI",
      "SACR",  "L_HIP", "R_HIP", "L_KNE", "R_KNE", "L_ANK", "R_ANK", "L_TOE",
      "R_TOE", "L_HEE", "R_HEE", "R1",    "R2",    "H"};
  return names;
}

const std::vector<std::pair<std::string, std::string>>& stick_figure_segments() {
  static const std::vector<std::pair<std::string, std::string>> segments = {
      {"HEAD", "NECK"},   {"NECK", "L_SHO"},  {"NECK", "R_SHO"},  {"L_SHO", "L_ELB"},
      {"L_ELB", "L_WRI"}, {"R_SHO", "R_ELB"}, {"R_ELB", "R_WRI"}, {"NECK", "SACR"},
      {"SACR", "L_HIP"},  {"SACR", "R_HIP"},  {"L_HIP", "L_KNE"}, {"L_KNE", "L_ANK"},
      {"L_ANK", "L_HEE"}, {"L_ANK", "L_TOE"}, {"L_HEE", "L_TOE"}, {"R_HIP", "R_KNE"},
      {"R_KNE", "R_ANK"}, {"R_ANK", "R_HEE"}, {"R_ANK", "R_TOE"}, {"R_HEE", "R_TOE"},
      {"R_WRI", "H"},     {"H", "R1"},        {"H", "R2"},        {"R1", "R2"}};
  return segments;
}

void validate(const SwingArchetype& a) {
  if (a.duration_frames < 3 || a.duration_frames > 13) {
    throw InvalidArgument("archetype '" + a.name + "': duration must be within 3..13 frames");
  }
  if (!(a.noise_amplitude >= 0.0) || a.noise_amplitude > kMaxNoise) {
    throw InvalidArgument("archetype '" + a.name + "': noise amplitude must be in [0, 0.01] m");
  }
  if (!(a.speed_scale > 0.0)) {
    throw InvalidArgument("archetype '" + a.name + "': speed_scale must be positive");
  }
}

GeneratedSwing generate_swing(const SwingArchetype& archetype, std::uint64_t seed,
                              std::string clip_id) {
  validate(archetype);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-archetype.noise_amplitude, archetype.noise_amplitude);
  const auto jitter = [&] {
    return archetype.noise_amplitude > 0.0 ? Vec3(noise(rng), noise(rng), noise(rng))
                                           : Vec3::Zero().eval();
  };

  const int d = archetype.duration_frames;
  const int total = d + 2 * kPaddingFrames;
  const double t_mid = kPaddingFrames + 0.5 * (d - 1);

  GeneratedSwing out;
  out.archetype = archetype;
  out.clip.clip_id = clip_id;
  out.clip.sample_rate_hz = 50.0;
  out.clip.markers = marker_names();
  out.roi = {clip_id, static_cast<std::size_t>(kPaddingFrames),
             static_cast<std::size_t>(kPaddingFrames + d - 1)};
  for (const auto& [criterion, label] : archetype.labels) {
    out.labels.push_back({clip_id, criterion, label});
  }

  for (int t = 0; t < total; ++t) {
    const double x = archetype.speed_scale * (t - t_mid);
    const Vec3 ss(x, archetype.transverse(x), archetype.sagittal(x));
    out.sweet_spot.push_back(ss);
    const double progress = static_cast<double>(t) / (total - 1);
    const auto pose = racquet_pose(ss, progress);

    auto frame = body_pose(progress, pose);
    for (auto& p : frame) p += jitter();

    const double nominal = triangle_area(pose.r1, pose.r2, pose.handle);
    Vec3 r1, r2, h;
    do {
      r1 = pose.r1 + jitter();
      r2 = pose.r2 + jitter();
      h = pose.handle + jitter();
    } while (triangle_area(r1, r2, h) < 0.5 * nominal);
    frame.push_back(r1);
    frame.push_back(r2);
    frame.push_back(h);
    out.clip.frames.push_back(std::move(frame));
  }
  return out;
}

SwingArchetype random_archetype(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  SwingArchetype a;
  a.name = "random";
  a.duration_frames = std::uniform_int_distribution<int>(3, 13)(rng);
  a.sagittal = {u(-1.0, 1.5), u(-0.5, 0.8), u(0.7, 1.3)};
  a.transverse = {u(-0.8, 0.8), u(-0.5, 0.5), u(-0.1, 0.1)};
  a.speed_scale = u(0.05, 0.15);
  return a;
}

std::vector<DatasetEntry> default_preset() {
  SwingArchetype full;
  full.name = "topspin-full";
  full.duration_frames = 10;
  full.sagittal = {0.9, 0.5, 1.0};
  full.transverse = {-0.4, 0.15, 0.0};
  full.speed_scale = 0.12;
  full.noise_amplitude = 0.001;
  full.labels = {{"novice", Label::good}, {"intermediate", Label::good}};
  full.perturbs = "none (reference low-to-high topspin swing)";

  SwingArchetype shortened = full;
  shortened.name = "topspin-short";
  shortened.transverse = {0.5, 0.35, 0.05};
  shortened.speed_scale = 0.07;
  shortened.labels = {{"novice", Label::good}, {"intermediate", Label::bad}};
  shortened.perturbs = "truncated swing width: tip-curve offsets and transverse curvature (f6-f11)";

  SwingArchetype flat = full;
  flat.name = "flat-descending";
  flat.sagittal = {-0.35, -0.15, 1.0};
  flat.labels = {{"novice", Label::bad}, {"intermediate", Label::bad}};
  flat.perturbs = "flat/descending string-bed path: sagittal curvature and slope (f0, f1, f3, f4)";

  return {{full, 4, 0.04, true}, {shortened, 6, 0.04, true}, {flat, 4, 0.04, true}};
}

std::vector<DatasetEntry> separable_preset() {
  constexpr double kOffset = 0.4;
  auto group = [](const char* name, double s, double t, Label label) {
    SwingArchetype a;
    a.name = name;
    a.duration_frames = 10;
    a.sagittal = {0.5 + s * kOffset, 0.3 + s * kOffset * 0.5, 1.0 + s * kOffset * 0.4};
    a.transverse = {t * kOffset, 0.15 + t * kOffset * 0.5, t * kOffset * 0.4};
    a.speed_scale = 0.12;
    a.noise_amplitude = 0.001;
    a.labels = {{"separable", label}};
    a.perturbs = "all twelve dimensions, XOR arrangement of the two classes";
    return a;
  };
  return {{group("plus-v", 1, 1, Label::good), 4, 0.04, true},
          {group("plus-w", 1, -1, Label::bad), 3, 0.04, true},
          {group("minus-w", -1, 1, Label::bad), 4, 0.04, true},
          {group("minus-v", -1, -1, Label::good), 3, 0.04, true}};
}

std::vector<GeneratedSwing> generate_swings(std::span<const DatasetEntry> entries,
                                            std::uint64_t seed) {
  std::vector<GeneratedSwing> out;
  int index = 0;
  for (const auto& entry : entries) {
    if (entry.count < 1) {
      throw InvalidArgument("archetype '" + entry.archetype.name + "': count must be at least 1");
    }
    validate(entry.archetype);
    if (entry.coefficient_jitter < 0.0) throw InvalidArgument("coefficient_jitter must be >= 0");
  }
  for (const auto& entry : entries) {
    for (int k = 0; k < entry.count; ++k) {
      ++index;
      const auto swing_seed = derive_seed(seed, static_cast<std::uint64_t>(index));
      std::mt19937_64 rng(derive_seed(swing_seed, "params"));
      auto a = entry.archetype;
      if (entry.coefficient_jitter > 0.0) {
        std::uniform_real_distribution<double> j(-entry.coefficient_jitter, entry.coefficient_jitter);
        for (auto* q : {&a.sagittal, &a.transverse}) {
          q->p2 += j(rng);
          q->p1 += j(rng);
          q->p0 += j(rng);
        }
      }
      if (entry.vary_duration) {
        a.duration_frames = std::uniform_int_distribution<int>(7, 13)(rng);
      }
      char id[16];
      std::snprintf(id, sizeof(id), "s%02d", index);
      out.push_back(generate_swing(a, swing_seed, id));
    }
  }
  return out;
}

nlohmann::json to_json(const SwingArchetype& a) {
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [c, l] : a.labels) labels[c] = to_string(l);
  return {{"name", a.name},
          {"duration_frames", a.duration_frames},
          {"sagittal", quad_json(a.sagittal)},
          {"transverse", quad_json(a.transverse)},
          {"speed_scale", a.speed_scale},
          {"noise_amplitude", a.noise_amplitude},
          {"labels", labels},
          {"perturbs", a.perturbs}};
}

nlohmann::json manifest(std::span<const DatasetEntry> entries, std::span<const GeneratedSwing> swings,
                        std::uint64_t seed) {
  auto e = nlohmann::json::array();
  for (const auto& entry : entries) {
    e.push_back({{"archetype", to_json(entry.archetype)},
                 {"count", entry.count},
                 {"coefficient_jitter", entry.coefficient_jitter},
                 {"vary_duration", entry.vary_duration}});
  }
  auto s = nlohmann::json::array();
  int index = 0;
  for (const auto& swing : swings) {
    ++index;
    s.push_back({{"clip_id", swing.clip.clip_id},
                 {"file", "clips/" + swing.clip.clip_id + ".csv"},
                 {"seed", derive_seed(seed, static_cast<std::uint64_t>(index))},
                 {"roi", mocap::roi_to_json(swing.roi)},
                 {"parameters", to_json(swing.archetype)}});
  }
  return {{"generator", "swingid-synth"},
          {"version", 1},
          {"seed", seed},
          {"entries", e},
          {"swings", s},
          {"files", {{"clips", "clips"}, {"rois", "rois.json"}, {"labels", "labels.csv"}}}};
}

DatasetFiles generate_dataset(std::span<const DatasetEntry> entries, std::uint64_t seed,
                              const std::filesystem::path& out_dir) {
  const auto swings = generate_swings(entries, seed);
  DatasetFiles files{out_dir / "clips", out_dir / "rois.json", out_dir / "labels.csv",
                     out_dir / "manifest.json"};
  std::filesystem::create_directories(files.clips_dir);
  std::vector<mocap::RoiSpec> rois;
  std::vector<mocap::LabelRecord> labels;
  for (const auto& swing : swings) {
    mocap::write_clip(files.clips_dir / (swing.clip.clip_id + ".csv"), swing.clip);
    rois.push_back(swing.roi);
    labels.insert(labels.end(), swing.labels.begin(), swing.labels.end());
  }
  write_file_atomic(files.rois.string(), mocap::serialize_rois(rois));
  write_file_atomic(files.labels.string(), mocap::serialize_labels(labels));
  write_file_atomic(files.manifest.string(), manifest(entries, swings, seed).dump(2) + "\n");
  return files;
}

}  // namespace swingid::synth
