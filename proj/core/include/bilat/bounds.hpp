#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bilat/dde.hpp"
#include "bilat/majorant.hpp"
#include "bilat/system.hpp"

namespace bilat {

enum class BoundKind { Upper, Lower, RobustUpper };

/// Scalar comparison equation for |y(t)|.
///
///   upper:  Z' = (rate + |g(t)|) Z + L(t, Z, Z(t - h_1), ...) + |F(t)|
///   lower:  z' = (rate - |g(t)|) z - L(t, z, z(t - h_1), ...) - |F(t)|, z >= 0
///   robust: upper plus L_R over its own delays, whose slots follow those of L.
struct ScalarBoundProblem {
  BoundKind kind = BoundKind::Upper;
  double rate = 0.0;
  TimeFunction g_norm;
  Majorant L;
  std::optional<RobustMajorant> robust;
  TimeFunction forcing_norm;
  DelaySet delays;
  TimeFunction history;  // |V^-1 phi(t)| on [t0 - h_hi, t0]
  double t0 = 0.0;
  double norm_V = 1.0;
  double norm_V_inv = 1.0;

  [[nodiscard]] ScalarBoundProblem with_history(TimeFunction h) const;
  [[nodiscard]] ScalarBoundProblem with_constant_history(double c) const;
  /// Caches |g|, |F| and the majorant magnitudes on the half-step grid that
  /// integrate() visits for this horizon and step. Reuse across histories.
  [[nodiscard]] ScalarBoundProblem tabulated(double t_end, const StepConfig& config) const;

  /// Right-hand side at state u with delayed values u_j.
  [[nodiscard]] double rhs(double t, double u, std::span<const double> delayed) const;
};

[[nodiscard]] ScalarBoundProblem build_upper(const EigenbasisSystem& esys, const Majorant& L);
[[nodiscard]] ScalarBoundProblem build_lower(const EigenbasisSystem& esys, const Majorant& L);
/// Throws DelayBoundViolation if delays_R has a non-positive lower bound.
[[nodiscard]] ScalarBoundProblem build_robust(const EigenbasisSystem& esys, const Majorant& L,
                                              const RobustMajorant& L_R, const DelaySet& delays_R);

/// Integrates one scalar problem; lower problems are clamped at zero.
[[nodiscard]] Trajectory solve_scalar(const ScalarBoundProblem& p, double t_end, const StepConfig& config);

/// Solutions of the upper and lower problems and the envelope
/// z(t) / |V^-1| <= |x(t)| <= |V| Z(t).
struct BoundPair {
  Trajectory Z;
  Trajectory z;
  double scale_up = 1.0;    // |V|
  double scale_down = 1.0;  // 1 / |V^-1|

  [[nodiscard]] double upper(double t) const;
  [[nodiscard]] double lower(double t) const;
  /// Last time at which both solutions exist.
  [[nodiscard]] double common_end() const;
};

[[nodiscard]] BoundPair solve_bounds(const ScalarBoundProblem& up, const ScalarBoundProblem& low,
                                     double t_end, const StepConfig& config);

struct Tolerance {
  double abs = 1e-6;
  double rel = 1e-6;  // relative to the bound being tested
};

struct EnclosureReport {
  bool pass = false;
  double worst_margin = 0.0;  // min over samples of min(upper - |x|, |x| - lower)
  double worst_time = 0.0;
  bool worst_is_upper = true;
  std::size_t samples = 0;
};

/// Checks lower - tol <= |x| <= upper + tol at every sample. Throws
/// RangeMismatch if the series is ragged, empty, or leaves [t0, common_end].
[[nodiscard]] EnclosureReport check_enclosure(std::span<const double> times,
                                              std::span<const double> norms, const BoundPair& pair,
                                              const Tolerance& tol = {});

/// CSV t,Z,z,upper,lower at the upper-solution nodes up to common_end().
void write_bounds_csv(const BoundPair& pair, std::ostream& os);

}  // namespace bilat
