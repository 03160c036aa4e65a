#pragma once

// Spatial feature extraction: plane projections of the sweet-spot
// trajectory and tip path, quadratic fits, the 12-value feature vector
// and its [-0.8, 0.8] normalization.

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "swingid/common.hpp"
#include "swingid/kinematics.hpp"

namespace swingid::features {

enum class Plane {
  sagittal,    // side view: (X, Z)
  transverse,  // top view: (X, Y)
};

std::string_view to_string(Plane plane);

struct PlanePoint {
  double a = 0.0;  // forward coordinate X
  double b = 0.0;  // Z (sagittal) or Y (transverse)
};

std::vector<PlanePoint> project_plane(std::span<const Vec3> points, Plane plane);

/// b(a) = p2 a^2 + p1 a + p0, with residual statistics of the fit.
struct PolyFit3 {
  double p2 = 0.0;
  double p1 = 0.0;
  double p0 = 0.0;
  double rms_residual = 0.0;
  double max_residual = 0.0;

  double operator()(double a) const { return (p2 * a + p1) * a + p0; }
};

class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

/// Least-squares quadratic. Abscissae are centred and scaled to [-1, 1]
/// before a QR solve; coefficients are mapped back to the input scale.
/// Needs at least 3 points with 3 distinct a-values.
PolyFit3 poly_fit2(std::span<const PlanePoint> points);

inline constexpr std::size_t kFeatureCount = 12;

/// Names of f0..f11 in their fixed order.
const std::array<std::string, kFeatureCount>& feature_names();

struct FeatureVector {
  std::string swing_id;
  std::array<double, kFeatureCount> values{};
};

/// Four quadratic fits concatenated as
/// [sagittal tips, sagittal trajectory, transverse tips, transverse trajectory],
/// each as (p2, p1, p0). Every failing curve is named in the error.
FeatureVector assemble_features(const kinematics::VirtualMarkerPath& trajectory,
                                const kinematics::TipPath& tips, std::string swing_id = {});

struct ReductionRow {
  int roi_duration = 0;
  int marker_count = 0;
  long long input_dim = 0;
  int output_dim = static_cast<int>(kFeatureCount);
  double reduction_percent = 0.0;

  /// reduction_percent rounded to one decimal, e.g. "98.2%".
  std::string reduction_text() const;
};

ReductionRow reduction_report(int roi_duration, int marker_count);
std::string render_reduction_table(std::span<const ReductionRow> rows);

/// Per-feature affine map sending the training [lower, lower + span] onto
/// [-0.8, 0.8]. Features with zero span map to 0.
struct NormalizationParams {
  std::array<double, kFeatureCount> lower{};
  std::array<double, kFeatureCount> span{};
};

inline constexpr double kNormalizedLimit = 0.8;

NormalizationParams fit_normalizer(std::span<const FeatureVector> training);
/// Out-of-range values are passed through, not clipped.
FeatureVector apply_normalizer(const NormalizationParams& params, const FeatureVector& v);

nlohmann::json to_json(const NormalizationParams& params);
NormalizationParams normalizer_from_json(const nlohmann::json& j);

/// CSV with header swing_id,f0,...,f11.
std::string serialize_features(std::span<const FeatureVector> rows);
std::vector<FeatureVector> parse_features(std::string_view text);
std::vector<FeatureVector> load_features(const std::filesystem::path& path);

}  // namespace swingid::features
