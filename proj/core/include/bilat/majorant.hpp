#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bilat/spectral.hpp"
#include "bilat/system.hpp"
#include "bilat/time_function.hpp"

namespace bilat {

/// xi_slot^power inside a majorant term.
struct SlotPower {
  std::size_t slot = 0;
  int power = 1;
};

/// magnitude(t) * prod xi_slot^power, magnitude >= 0.
struct MajorantTerm {
  TimeFunction magnitude;
  std::vector<SlotPower> factors;
};

/// Scalar majorant L(t, xi_0, ..., xi_m) with |f(t, y, y_1, ...)| <= L(t, |y|, |y_1|, ...).
/// Slot 0 bounds the undelayed state, slot j the state delayed by h_j.
class Majorant {
 public:
  Majorant() = default;
  Majorant(std::size_t slots, std::vector<MajorantTerm> terms);

  [[nodiscard]] std::size_t slots() const { return slots_; }
  [[nodiscard]] const std::vector<MajorantTerm>& terms() const { return terms_; }
  [[nodiscard]] bool empty() const { return terms_.empty(); }

  /// Throws NegativeArgument if some xi is negative or NaN.
  [[nodiscard]] double eval(double t, std::span<const double> xi) const;
  /// Same without argument checks, for integrator inner loops.
  [[nodiscard]] double eval_unchecked(double t, const double* xi) const;
  [[nodiscard]] Majorant scaled(double factor) const;
  /// Moves slot j to mapping[j] in a majorant with `slots` slots.
  [[nodiscard]] Majorant remapped(const std::vector<std::size_t>& mapping, std::size_t slots) const;
  /// Caches every magnitude on a grid (see tabulate).
  [[nodiscard]] Majorant tabulated(double t0, double t1, double step) const;

 private:
  std::size_t slots_ = 1;
  std::vector<MajorantTerm> terms_;
};

[[nodiscard]] double eval_majorant(const Majorant& L, double t, std::span<const double> xi);

/// Majorant plus a constant offset delta >= 0, so L_R(t, 0) may be positive.
struct RobustMajorant {
  Majorant base;
  double offset = 0.0;

  [[nodiscard]] double eval(double t, std::span<const double> xi) const;
};

/// Majorant of f(t, y, ...) = V^-1 f*(t, V y, ...).
///
/// Monomials with a single first-power factor are collected per slot into a
/// matrix M_j(t) and bounded by |V^-1 M_j(t) V|. Every other monomial
/// c(t) prod x_k^p is bounded by |V^-1| |c(t)| prod (sum_l |v_kl|)^p, and
/// monomials with the same slot/power signature are merged.
/// Throws UnsupportedForm for a monomial without factors.
[[nodiscard]] Majorant build_majorant(const PolynomialNonlinearity& nl,
                                      const EigenDecomposition& decomp, std::size_t slots);

struct DominationReport {
  bool holds = false;
  double worst_margin = 0.0;  // min over samples of L - |f|
};

/// Eigenbasis nonlinearity: one complex vector per slot.
using NonlinearityFn = std::function<CVector(double, std::span<const CVector>)>;

struct DominationSampling {
  std::size_t samples = 10000;
  double radius = 1.0;
  std::uint64_t seed = 1;
  double t0 = 0.0;
  double t_window = 100.0;
  double slack = 1e-12;
};

/// Monte Carlo check of |f(t, y...)| <= L(t, |y|...) with |y_j| <= radius.
[[nodiscard]] DominationReport verify_domination(const Majorant& L, const NonlinearityFn& f,
                                                 std::size_t dim, const DominationSampling& s);
[[nodiscard]] DominationReport verify_domination(const Majorant& L, const EigenbasisSystem& esys,
                                                 const DominationSampling& s);

/// Linear majorant valid on the box xi_j <= xi_bar: each term mu prod xi^p of
/// total degree P becomes mu xi_bar^(P-1) xi_s, s the first slot of the term.
/// The result has one power-1 term per slot that receives a contribution.
[[nodiscard]] Majorant linearize_majorant(const Majorant& L, double xi_bar);

struct AutonomousBounds {
  Majorant L_s;
  double g_s = 0.0;
  double F_s = 0.0;
};

/// Replaces every magnitude, |g| and |F| by its sampled supremum on [t0, t1].
/// Throws NonFinite if a sample is not finite.
[[nodiscard]] AutonomousBounds autonomize(const Majorant& L, const TimeFunction& g_norm,
                                          const TimeFunction& F_norm, double t0, double t1,
                                          std::size_t samples = 10000);

}  // namespace bilat
