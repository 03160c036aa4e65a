#include "swingid/kinematics.hpp"

#include <cmath>

namespace swingid::kinematics {

SweetSpotMethod parse_sweet_spot_method(std::string_view name) {
  if (name == "circumcenter") return SweetSpotMethod::circumcenter;
  if (name == "centroid") return SweetSpotMethod::centroid;
  throw ParseError("unknown sweet-spot method '" + std::string(name) + "'");
}

std::string_view to_string(SweetSpotMethod method) {
  return method == SweetSpotMethod::centroid ? "centroid" : "circumcenter";
}

DegenerateGeometryError::DegenerateGeometryError(std::size_t frame, const std::string& what)
    : Error("frame " + std::to_string(frame) + ": " + what), frame_(frame) {}

Vec3 circumcenter(const Vec3& a, const Vec3& b, const Vec3& c, std::size_t frame) {
  const Vec3 u = a - c;
  const Vec3 v = b - c;
  const Vec3 n = u.cross(v);
  const double n2 = n.squaredNorm();
  // Relative collinearity test: |u x v|^2 = |u|^2 |v|^2 sin^2(angle).
  const double scale = u.squaredNorm() * v.squaredNorm();
  if (!(n2 > 1e-20 * scale) || scale == 0.0) {
    throw DegenerateGeometryError(frame, "racquet markers are collinear or coincident");
  }
  const Vec3 numer = (u.squaredNorm() * v - v.squaredNorm() * u).cross(n);
  return c + numer / (2.0 * n2);
}

Path3 GradientFlow::velocity(double sample_rate_hz) const {
  Path3 out;
  out.reserve(vectors.size());
  for (const auto& g : vectors) out.push_back(g * sample_rate_hz);
  return out;
}

VirtualMarkerPath compute_sweet_spot(std::span<const Vec3> r1, std::span<const Vec3> r2,
                                     std::span<const Vec3> handle, SweetSpotMethod method) {
  if (r1.size() != r2.size() || r1.size() != handle.size()) {
    throw InvalidArgument("racquet marker paths differ in length");
  }
  VirtualMarkerPath out;
  out.positions.reserve(r1.size());
  for (std::size_t t = 0; t < r1.size(); ++t) {
    if (r1[t].hasNaN() || r2[t].hasNaN() || handle[t].hasNaN()) {
      throw InvalidArgument("frame " + std::to_string(t) + ": racquet marker sample missing");
    }
    if (method == SweetSpotMethod::centroid) {
      // Still reject degenerate triads so both methods accept the same input.
      circumcenter(r1[t], r2[t], handle[t], t);
      out.positions.push_back((r1[t] + r2[t] + handle[t]) / 3.0);
    } else {
      out.positions.push_back(circumcenter(r1[t], r2[t], handle[t], t));
    }
  }
  return out;
}

Path3 finite_gradient(std::span<const Vec3> x) {
  const auto n = x.size();
  if (n < 2) throw InvalidArgument("gradient needs at least 2 frames, got " + std::to_string(n));
  Path3 g(n);
  g[0] = x[1] - x[0];
  g[n - 1] = x[n - 1] - x[n - 2];
  for (std::size_t t = 1; t + 1 < n; ++t) g[t] = (x[t + 1] - x[t - 1]) / 2.0;
  return g;
}

GradientFlow gradient_flow(const VirtualMarkerPath& path) {
  return GradientFlow{finite_gradient(path.positions)};
}

Path3 acceleration(const GradientFlow& flow) { return finite_gradient(flow.vectors); }

TipPath compute_vector_tips(const VirtualMarkerPath& path, const GradientFlow& flow) {
  if (path.positions.size() != flow.vectors.size()) {
    throw InvalidArgument("path and flow lengths differ");
  }
  TipPath out;
  out.tips.reserve(path.positions.size());
  for (std::size_t t = 0; t < path.positions.size(); ++t) {
    out.tips.push_back(path.positions[t] + flow.vectors[t]);
  }
  return out;
}

SwingKinematics analyze(const mocap::SwingClip& roi_clip, SweetSpotMethod method) {
  const auto r1 = roi_clip.marker_path(mocap::kRacquetTip1);
  const auto r2 = roi_clip.marker_path(mocap::kRacquetTip2);
  const auto h = roi_clip.marker_path(mocap::kRacquetHandle);
  SwingKinematics k;
  k.path = compute_sweet_spot(r1, r2, h, method);
  k.flow = gradient_flow(k.path);
  k.tips = compute_vector_tips(k.path, k.flow);
  return k;
}

}  // namespace swingid::kinematics
