#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bilat/bounds.hpp"
#include "bilat/spectral.hpp"
#include "bilat/system.hpp"

namespace bilat {

/// Finite-time stability constants: ||phi|| < eta1 implies |x| < eta2 on
/// [t0, t0 + T]; eta3 (if set) is the contraction level.
struct FtsSpec {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double T = 0.0;
  std::optional<double> eta3;

  /// Throws InvalidParam unless 0 < eta1 < eta2, T > 0 and eta1 < eta3.
  void validate() const;
};

/// True iff every sample on [t0, t0 + T] is below eta2.
/// Throws HorizonUncovered if the series does not span [t0, t0 + T].
[[nodiscard]] bool check_fts(std::span<const double> times, std::span<const double> values,
                             const FtsSpec& spec, double t0);

struct FtcsResult {
  bool holds = false;
  std::optional<double> t1;  // earliest node after which every sample stays below eta3
};

[[nodiscard]] FtcsResult check_ftcs(std::span<const double> times, std::span<const double> values,
                                    const FtsSpec& spec, double t0);

enum class Verdict { UpperBoundedOnHorizon, UpperBlowup, LowerUnbounded, Inconclusive };

[[nodiscard]] std::string_view to_string(Verdict v) noexcept;

struct ClassificationReport {
  Verdict verdict = Verdict::Inconclusive;
  std::string statement;
  double horizon = 0.0;
  double peak_Z = 0.0;
  double peak_z = 0.0;
  double peak_upper = 0.0;
  double peak_lower = 0.0;
  std::optional<double> upper_blowup_time;
  std::optional<double> lower_blowup_time;
};

/// Reads the bound pair on [t0, t0 + horizon]:
///   z escapes                      -> lower-unbounded
///   Z finite through the horizon   -> upper-bounded-on-horizon
///   Z escapes, z finite throughout -> inconclusive
///   Z escapes, z stops short       -> upper-blowup
[[nodiscard]] ClassificationReport classify(const BoundPair& pair, double horizon);
[[nodiscard]] std::string classification_to_json(const ClassificationReport& report);

struct RadiusSearch {
  double c_max = 1e3;
  double tol = 1e-2;
  std::size_t max_iter = 40;
};

struct RadiusEstimate {
  double radius = 0.0;
  bool all_good = false;  // c_max never escaped; radius == c_max
  std::size_t evaluations = 0;
};

/// Largest c in [0, c_max] such that `escapes(c)` is false, within tol.
/// `escapes` must be monotone (false below some radius, true above). The
/// bracket grows or shrinks geometrically from min(1, c_max) before
/// bisecting. Throws AllBad if escapes(tol) is true.
[[nodiscard]] RadiusEstimate bisect_radius(const std::function<bool(double)>& escapes,
                                           const RadiusSearch& search);

using ScalarProblemBuilder = std::function<ScalarBoundProblem(double)>;

/// Radius of constant scalar histories whose upper solution stays below
/// `threshold` on [t0, t0 + horizon].
[[nodiscard]] RadiusEstimate estimate_scalar_radius(const ScalarProblemBuilder& build, double horizon,
                                                    double threshold, const RadiusSearch& search = {},
                                                    const StepConfig& step = {});

struct RegionScanConfig {
  std::pair<std::size_t, std::size_t> plane{0, 1};
  double theta_step = 3.14159265358979323846 / 60.0;
  double horizon = 50.0;
  double threshold = 1e5;
  RadiusSearch search;
  StepConfig step;
};

struct RayEstimate {
  double theta = 0.0;
  double outer_r = 0.0;
  double inner_r = 0.0;
  bool outer_all_good = false;
  bool outer_all_bad = false;
  bool inner_all_good = false;
  bool contained = true;
};

struct RegionEstimate {
  std::pair<std::size_t, std::size_t> plane{0, 1};
  std::vector<RayEstimate> rays;
  double threshold = 0.0;
  double horizon = 0.0;
  double tol = 0.0;
  double scalar_radius = 0.0;
  bool scalar_all_good = false;
  bool containment_holds = true;
};

/// Ray angles covering [0, 2 pi); a degenerate plane (i == j) gives {0, pi}.
[[nodiscard]] std::vector<double> ray_angles(std::pair<std::size_t, std::size_t> plane, double step);

/// Unit vector with cos(theta) in plane.first and sin(theta) in plane.second.
[[nodiscard]] RVector ray_direction(std::size_t n, std::pair<std::size_t, std::size_t> plane, double theta);

/// Per ray, the escape radius of the vector system with constant history
/// r u(theta) (outer) and the scalar-bound radius mapped through
/// |V^-1 x0| = r_min (inner). Rays run in parallel.
[[nodiscard]] RegionEstimate estimate_region_projection(const VectorDelaySystem& sys,
                                                        const RegionScanConfig& config);

/// Points rho(theta) (cos theta, sin theta) with rho |V^-1 u(theta)| = r_min.
[[nodiscard]] std::vector<std::pair<double, double>> scalar_region_boundary(
    double r_min, const EigenDecomposition& decomp, std::pair<std::size_t, std::size_t> plane,
    std::span<const double> thetas);

/// CSV theta,outer_r,inner_r,flags.
void write_region_csv(const RegionEstimate& region, std::ostream& os);

}  // namespace bilat
