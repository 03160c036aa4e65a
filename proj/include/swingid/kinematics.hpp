#pragma once

// Racquet sweet-spot marker, its motion gradient vector flow and the
// gradient-vector tip path.

#include <cstddef>
#include <span>
#include <string_view>

#include "swingid/common.hpp"
#include "swingid/mocap_io.hpp"

namespace swingid::kinematics {

enum class SweetSpotMethod {
  circumcenter,  // in-plane point equidistant from R1, R2 and H
  centroid,      // triangle centroid; kept for sensitivity studies
};

SweetSpotMethod parse_sweet_spot_method(std::string_view name);
std::string_view to_string(SweetSpotMethod method);

/// Three racquet markers that are collinear or coincident at `frame`.
class DegenerateGeometryError : public Error {
 public:
  DegenerateGeometryError(std::size_t frame, const std::string& what);
  std::size_t frame() const { return frame_; }

 private:
  std::size_t frame_;
};

/// Circumcenter of triangle (a, b, c) in 3D. `frame` is only used for the
/// error message.
Vec3 circumcenter(const Vec3& a, const Vec3& b, const Vec3& c, std::size_t frame = 0);

struct VirtualMarkerPath {
  Path3 positions;
};

/// Per-frame displacement of the sweet spot, in metres per frame.
struct GradientFlow {
  Path3 vectors;

  /// Metres per second.
  Path3 velocity(double sample_rate_hz) const;
};

struct TipPath {
  Path3 tips;
};

VirtualMarkerPath compute_sweet_spot(std::span<const Vec3> r1, std::span<const Vec3> r2,
                                     std::span<const Vec3> handle,
                                     SweetSpotMethod method = SweetSpotMethod::circumcenter);

/// Numeric gradient with unit sample spacing: central differences inside,
/// one-sided differences at both ends. Needs at least 2 samples.
Path3 finite_gradient(std::span<const Vec3> samples);

GradientFlow gradient_flow(const VirtualMarkerPath& path);

/// Second finite gradient (metres per frame squared). Not used by features.
Path3 acceleration(const GradientFlow& flow);

/// tips[t] = positions[t] + vectors[t].
TipPath compute_vector_tips(const VirtualMarkerPath& path, const GradientFlow& flow);

struct SwingKinematics {
  VirtualMarkerPath path;
  GradientFlow flow;
  TipPath tips;
};

/// Runs the three steps on a ROI-sliced clip.
SwingKinematics analyze(const mocap::SwingClip& roi_clip,
                        SweetSpotMethod method = SweetSpotMethod::circumcenter);

}  // namespace swingid::kinematics
