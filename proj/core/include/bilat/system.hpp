#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "bilat/dde.hpp"
#include "bilat/spectral.hpp"
#include "bilat/time_function.hpp"

namespace bilat {

/// One factor x_component(t - h_slot(t))^power of a monomial. Slot 0 is the
/// undelayed state.
struct Factor {
  std::size_t slot = 0;
  std::size_t component = 0;
  int power = 1;
};

/// coefficient(t) * prod factors, added to component `target` of f*.
struct Monomial {
  std::size_t target = 0;
  Sinusoids coefficient;
  std::vector<Factor> factors;
};

/// Polynomial f*(t, x, x(t - h_1), ...). Every monomial carries at least one
/// factor, so f*(t, 0, ..., 0) = 0.
struct PolynomialNonlinearity {
  std::vector<Monomial> terms;

  /// Throws InvalidParam on empty factor lists, powers < 1 or indices out of range.
  void validate(std::size_t n, std::size_t delay_count) const;

  /// Adds f*(t, args...) to `out`. `args(slot)` returns the state for that slot.
  template <class Scalar, class Args>
  void accumulate(double t, const Args& args, Scalar* out) const {
    for (const auto& term : terms) {
      Scalar value = Scalar(term.coefficient(t));
      for (const auto& f : term.factors) {
        const Scalar base = args(f.slot)[f.component];
        Scalar p = base;
        for (int k = 1; k < f.power; ++k) p *= base;
        value *= p;
      }
      out[term.target] += value;
    }
  }
};

/// Sparse real matrix with sinusoidal entries.
struct TimeMatrix {
  struct Entry {
    std::size_t row = 0;
    std::size_t col = 0;
    Sinusoids value;
  };
  std::size_t n = 0;
  std::vector<Entry> entries;

  [[nodiscard]] RMatrix operator()(double t) const;
  [[nodiscard]] bool is_zero() const;
  /// Evaluator for OffsetSplit; empty when the matrix is identically zero.
  [[nodiscard]] MatrixFunction as_function() const;
};

/// F*(t) = F0 e(t). The direction is stored per component.
struct Forcing {
  double F0 = 0.0;
  std::vector<Sinusoids> direction;

  [[nodiscard]] bool active() const;
  void eval(double t, std::span<double> out) const;
  /// Largest sampled |e(t)| on [t0, t1].
  [[nodiscard]] double max_direction_norm(double t0, double t1, std::size_t samples = 10000) const;
};

struct DelaySpec {
  double h_lo = 0.0;
  double h_hi = 0.0;
  std::vector<Sinusoids> functions;

  [[nodiscard]] DelaySet to_delay_set() const;
};

enum class HistoryKind { Constant, Cosine };

/// phi(t) = x0 (Constant) or x0 * cos(t) (Cosine).
struct HistorySpec {
  HistoryKind kind = HistoryKind::Constant;
  std::vector<double> x0;

  void eval(double t, std::span<double> out) const;
  [[nodiscard]] HistoryFunction to_function() const;
};

/// x' = A* x + G*(t) x + f*(t, x, x(t - h_1(t)), ...) + F*(t), x = phi on [t0 - h_hi, t0].
struct VectorDelaySystem {
  std::size_t n = 0;
  RMatrix A_star;
  TimeMatrix G_star;
  PolynomialNonlinearity nonlinearity;
  Forcing forcing;
  DelaySpec delays;
  HistorySpec history;
  double t0 = 0.0;

  [[nodiscard]] std::size_t delay_count() const { return delays.functions.size(); }
  /// Dimensional consistency and declared delay bounds.
  void validate() const;
};

/// Right-hand side of the vector system; `xd` holds m delayed states back to back.
void eval_rhs(const VectorDelaySystem& sys, double t, std::span<const double> x,
              std::span<const double> xd, std::span<double> out);
[[nodiscard]] std::vector<double> eval_rhs(const VectorDelaySystem& sys, double t,
                                           std::span<const double> x, std::span<const double> xd);

/// The system in coordinates y = V^-1 x.
class EigenbasisSystem {
 public:
  EigenbasisSystem(VectorDelaySystem sys, EigenDecomposition decomp);

  [[nodiscard]] const VectorDelaySystem& system() const { return sys_; }
  [[nodiscard]] const EigenDecomposition& decomposition() const { return decomp_; }
  [[nodiscard]] const OffsetSplit& offset() const { return offset_; }
  [[nodiscard]] std::size_t dim() const { return sys_.n; }
  [[nodiscard]] std::size_t slots() const { return sys_.delay_count() + 1; }

  /// f(t, y, y_1, ...) = V^-1 f*(t, V y, V y_1, ...); `args` has one vector per slot.
  [[nodiscard]] CVector nonlinearity(double t, std::span<const CVector> args) const;
  [[nodiscard]] CVector forcing(double t) const;
  [[nodiscard]] double forcing_norm(double t) const;
  [[nodiscard]] CVector history(double t) const;
  /// |V^-1 phi(t)|, the history of both scalar bound equations.
  [[nodiscard]] double history_norm(double t) const;

 private:
  VectorDelaySystem sys_;
  EigenDecomposition decomp_;
  OffsetSplit offset_;
};

[[nodiscard]] EigenbasisSystem to_eigenbasis(const VectorDelaySystem& sys,
                                             const EigenDecomposition& decomp);

struct Simulation {
  Trajectory trajectory;
  std::vector<double> times;
  std::vector<double> norms;
};

[[nodiscard]] Simulation simulate(const VectorDelaySystem& sys, double t_end,
                                  const StepConfig& config);
/// Same system integrated in y coordinates; the state is stored as
/// (Re y_1, Im y_1, Re y_2, ...).
[[nodiscard]] Trajectory simulate_eigenbasis(const EigenbasisSystem& esys, double t_end,
                                             const StepConfig& config);

enum class OscillatorKind { VanDerPol, Duffing };

/// Two coupled delayed oscillators. Fixed constants default to the published
/// values; the remaining fields select a figure.
struct OscillatorParams {
  double mu1 = 0.0, mu2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
  double b1 = 0.0, b2 = 0.0;
  double chi1 = 0.0, chi2 = 0.0;
  double h1 = 0.0, h2 = 0.0;
  double F01 = 0.0, F02 = 0.0;
  double x01 = 0.1;

  double omega1_sq = 1.0, omega2_sq = 4.0, d = 4.0;
  double q1 = 5.43, q2 = 10.0;
  double r1 = 3.14, r2 = 6.15;
  double s1 = 3.1, s2 = 6.28;
};

[[nodiscard]] VectorDelaySystem make_oscillators(OscillatorKind kind, const OscillatorParams& p);
[[nodiscard]] VectorDelaySystem make_vdp(const OscillatorParams& p);
[[nodiscard]] VectorDelaySystem make_duf(const OscillatorParams& p);

}  // namespace bilat
