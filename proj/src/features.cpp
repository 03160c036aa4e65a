#include "swingid/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <Eigen/QR>

namespace swingid::features {

std::string_view to_string(Plane plane) {
  return plane == Plane::sagittal ? "sagittal" : "transverse";
}

std::vector<PlanePoint> project_plane(std::span<const Vec3> points, Plane plane) {
  std::vector<PlanePoint> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    out.push_back({p.x(), plane == Plane::sagittal ? p.z() : p.y()});
  }
  return out;
}

PolyFit3 poly_fit2(std::span<const PlanePoint> points) {
  const auto n = points.size();
  if (n < 3) {
    throw DegenerateFitError("quadratic fit needs at least 3 points, got " + std::to_string(n));
  }
  std::set<double> distinct;
  for (const auto& p : points) {
    if (!std::isfinite(p.a) || !std::isfinite(p.b)) {
      throw DegenerateFitError("non-finite point in quadratic fit");
    }
    distinct.insert(p.a);
  }
  if (distinct.size() < 3) {
    throw DegenerateFitError("quadratic fit is rank deficient: only " +
                             std::to_string(distinct.size()) + " distinct abscissae");
  }

  const double lo = *distinct.begin();
  const double hi = *distinct.rbegin();
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = (points[i].a - center) / half;
    design(static_cast<Eigen::Index>(i), 0) = s * s;
    design(static_cast<Eigen::Index>(i), 1) = s;
    design(static_cast<Eigen::Index>(i), 2) = 1.0;
    rhs(static_cast<Eigen::Index>(i)) = points[i].b;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-12);
  if (qr.rank() < 3) throw DegenerateFitError("quadratic fit is rank deficient");
  const Eigen::Vector3d q = qr.solve(rhs);

  // b = q2 s^2 + q1 s + q0 with s = (a - c) / h.
  const double h2 = half * half;
  PolyFit3 fit;
  fit.p2 = q(0) / h2;
  fit.p1 = q(1) / half - 2.0 * q(0) * center / h2;
  fit.p0 = q(0) * center * center / h2 - q(1) * center / half + q(2);

  double ss = 0.0;
  for (const auto& p : points) {
    const double r = p.b - fit(p.a);
    ss += r * r;
    fit.max_residual = std::max(fit.max_residual, std::abs(r));
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "sag_tip_p2",   "sag_tip_p1",   "sag_tip_p0",   "sag_traj_p2",
      "sag_traj_p1",  "sag_traj_p0",  "trans_tip_p2", "trans_tip_p1",
      "trans_tip_p0", "trans_traj_p2", "trans_traj_p1", "trans_traj_p0"};
  return names;
}

FeatureVector assemble_features(const kinematics::VirtualMarkerPath& trajectory,
                                const kinematics::TipPath& tips, std::string swing_id) {
  const auto& pos = trajectory.positions;
  if (pos.size() != tips.tips.size()) throw InvalidArgument("trajectory and tip path lengths differ");
  if (pos.size() < 3) {
    throw InvalidArgument("feature extraction needs at least 3 frames, got " +
                          std::to_string(pos.size()));
  }

  struct Curve {
    const char* name;
    const Path3* points;
    Plane plane;
  };
  const std::array<Curve, 4> curves = {{{"sagittal tip-curve", &tips.tips, Plane::sagittal},
                                        {"sagittal trajectory", &pos, Plane::sagittal},
                                        {"transverse tip-curve", &tips.tips, Plane::transverse},
                                        {"transverse trajectory", &pos, Plane::transverse}}};

  FeatureVector out;
  out.swing_id = std::move(swing_id);
  std::string failures;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    try {
      const auto fit = poly_fit2(project_plane(*curves[c].points, curves[c].plane));
      out.values[3 * c + 0] = fit.p2;
      out.values[3 * c + 1] = fit.p1;
      out.values[3 * c + 2] = fit.p0;
    } catch (const DegenerateFitError& e) {
      if (!failures.empty()) failures += "; ";
      failures += std::string(curves[c].name) + ": " + e.what();
    }
  }
  if (!failures.empty()) {
    throw DegenerateFitError((out.swing_id.empty() ? "" : out.swing_id + ": ") + failures);
  }
  return out;
}

std::string ReductionRow::reduction_text() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", reduction_percent);
  return buf;
}

ReductionRow reduction_report(int roi_duration, int marker_count) {
  if (roi_duration < 1 || marker_count < 1) {
    throw InvalidArgument("duration and marker count must be positive");
  }
  ReductionRow row;
  row.roi_duration = roi_duration;
  row.marker_count = marker_count;
  row.input_dim = static_cast<long long>(roi_duration) * 3 * marker_count;
  row.reduction_percent =
      (1.0 - static_cast<double>(row.output_dim) / static_cast<double>(row.input_dim)) * 100.0;
  return row;
}

std::string render_reduction_table(std::span<const ReductionRow> rows) {
  std::string out = "ROI duration  Input dimensionality  Output dimensionality  Space reduction\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%12d  %20lld  %21d  %15s\n", r.roi_duration, r.input_dim,
                  r.output_dim, r.reduction_text().c_str());
    out += buf;
  }
  return out;
}

NormalizationParams fit_normalizer(std::span<const FeatureVector> training) {
  if (training.empty()) throw InvalidArgument("cannot fit a normalizer on an empty set");
  NormalizationParams params;
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    double lo = training.front().values[k];
    double hi = lo;
    for (const auto& v : training) {
      lo = std::min(lo, v.values[k]);
      hi = std::max(hi, v.values[k]);
    }
    params.lower[k] = lo;
    params.span[k] = hi - lo;
  }
  return params;
}

FeatureVector apply_normalizer(const NormalizationParams& params, const FeatureVector& v) {
  FeatureVector out;
  out.swing_id = v.swing_id;
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    if (params.span[k] == 0.0) {
      out.values[k] = 0.0;
    } else {
      // Written so that lower -> -0.8 and lower + span -> +0.8 exactly.
      out.values[k] = (v.values[k] - params.lower[k]) / params.span[k] * (2.0 * kNormalizedLimit) -
                      kNormalizedLimit;
    }
  }
  return out;
}

nlohmann::json to_json(const NormalizationParams& params) {
  return {{"lower", params.lower}, {"span", params.span}, {"limit", kNormalizedLimit}};
}

NormalizationParams normalizer_from_json(const nlohmann::json& j) {
  NormalizationParams p;
  p.lower = j.at("lower").get<std::array<double, kFeatureCount>>();
  p.span = j.at("span").get<std::array<double, kFeatureCount>>();
  return p;
}

std::string serialize_features(std::span<const FeatureVector> rows) {
  std::string out = "swing_id";
  for (std::size_t k = 0; k < kFeatureCount; ++k) out += ",f" + std::to_string(k);
  out += '\n';
  for (const auto& r : rows) {
    out += r.swing_id;
    for (double v : r.values) out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

std::vector<FeatureVector> parse_features(std::string_view text) {
  std::vector<FeatureVector> rows;
  bool header = true;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (header) {
      if (fields.size() != kFeatureCount + 1 || trim(fields[0]) != "swing_id") {
        throw ParseError("feature CSV must start with header swing_id,f0..f11");
      }
      header = false;
      continue;
    }
    if (fields.size() != kFeatureCount + 1) {
      throw ParseError("feature CSV line " + std::to_string(line_no) + ": expected 13 fields");
    }
    FeatureVector fv;
    fv.swing_id = std::string(trim(fields[0]));
    for (std::size_t k = 0; k < kFeatureCount; ++k) fv.values[k] = parse_double(fields[k + 1]);
    rows.push_back(std::move(fv));
  }
  if (header) throw ParseError("feature CSV is empty");
  return rows;
}

std::vector<FeatureVector> load_features(const std::filesystem::path& path) {
  return parse_features(read_file(path.string()));
}

}  // namespace swingid::features
