#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bilat/time_function.hpp"

namespace bilat {

/// Bounded time-varying delays h_1(t) ... h_m(t) with h_lo <= h_i(t) <= h_hi.
/// Slot j >= 1 of a right-hand side refers to delays[j - 1].
struct DelaySet {
  std::vector<TimeFunction> delays;
  double h_lo = 0.0;
  double h_hi = 0.0;

  [[nodiscard]] std::size_t size() const { return delays.size(); }
  [[nodiscard]] static DelaySet none() { return {}; }
  [[nodiscard]] static DelaySet constant(const std::vector<double>& values);
  /// Concatenation; bounds are the hull of both sets.
  [[nodiscard]] DelaySet joined(const DelaySet& other) const;
};

struct DelayBounds {
  double h_lo_observed = 0.0;
  double h_hi_observed = 0.0;
};

/// Samples every delay on [t0, t_end] and checks the declared bounds.
/// Throws DelayBoundViolation when the sampled range leaves [h_lo, h_hi] or h_lo <= 0.
DelayBounds validate_delays(const DelaySet& delays, double t0, double t_end,
                            std::size_t samples = 10000);

/// Initial function on [t0 - h_hi, t0].
struct HistoryFunction {
  std::size_t dim = 0;
  std::function<void(double, std::span<double>)> eval;

  [[nodiscard]] static HistoryFunction constant(std::vector<double> value);
  [[nodiscard]] static HistoryFunction scalar(TimeFunction f);
  /// Sup of the Euclidean norm over [t0 - h_hi, t0], sampled at `samples` points.
  [[nodiscard]] double sup_norm(double t0, double h_hi, std::size_t samples = 200) const;
};

struct StepConfig {
  double dt = 0.0;  // <= 0 selects default_step()
  double blowup_threshold = 1e5;
  bool clamp_nonnegative = false;
};

/// min(h_lo / 2, 1e-2), or 1e-2 without delays.
[[nodiscard]] double default_step(const DelaySet& delays);

struct BlowupRecord {
  double time = 0.0;
  double norm = 0.0;
  /// False when the escaping step overflowed; the trajectory then ends at the
  /// last finite node, one step before `time`.
  bool node_stored = true;
};

/// right-hand side f(t, x, delayed, dxdt). `delayed` holds m consecutive
/// states, slot j at [(j - 1) * n, j * n).
using DdeRhs = std::function<void(double, std::span<const double>, std::span<const double>,
                                  std::span<double>)>;

/// The step integrate() will use on [t0, t_end]: the requested (or default)
/// step shrunk so that it divides the interval.
[[nodiscard]] double effective_step(const DelaySet& delays, double t0, double t_end,
                                    const StepConfig& config);

/// Fixed-step solution with cubic Hermite dense output.
class Trajectory {
 public:
  [[nodiscard]] double t0() const { return t0_; }
  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t node_count() const { return dim_ == 0 ? 0 : nodes_.size() / dim_; }
  [[nodiscard]] double node_time(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }
  [[nodiscard]] double t_end() const { return node_time(node_count() - 1); }
  [[nodiscard]] double history_start() const { return t0_ - h_hi_; }
  [[nodiscard]] std::span<const double> node(std::size_t k) const;
  [[nodiscard]] std::span<const double> node_derivative(std::size_t k) const;
  [[nodiscard]] double node_norm(std::size_t k) const;
  [[nodiscard]] const std::vector<double>& node_data() const { return nodes_; }
  [[nodiscard]] const std::optional<BlowupRecord>& blowup() const { return blowup_; }
  [[nodiscard]] bool clamped() const { return clamp_; }

  /// History for t <= t0, Hermite interpolant between nodes otherwise.
  void eval(double t, std::span<double> out) const;
  [[nodiscard]] std::vector<double> eval(double t) const;

 private:
  friend Trajectory integrate(const DdeRhs&, const DelaySet&, const HistoryFunction&, double,
                              double, const StepConfig&);

  double t0_ = 0.0;
  double dt_ = 0.0;
  double h_hi_ = 0.0;
  std::size_t dim_ = 0;
  bool clamp_ = false;
  std::vector<double> nodes_;
  std::vector<double> derivs_;
  HistoryFunction history_;
  std::optional<BlowupRecord> blowup_;
};

/// Classical RK4 method of steps. Delayed states are read from the dense
/// output, which the step restriction dt <= h_lo / 2 keeps inside completed
/// data. The step is shrunk so that (t_end - t0) / dt is an integer.
[[nodiscard]] Trajectory integrate(const DdeRhs& rhs, const DelaySet& delays,
                                   const HistoryFunction& history, double t0, double t_end,
                                   const StepConfig& config);

/// CSV with header t,x1,...,xn,norm, one row per node, 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);

}  // namespace bilat
