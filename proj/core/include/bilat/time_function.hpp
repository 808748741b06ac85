#pragma once

#include <functional>
#include <vector>

namespace bilat {

/// Scalar function of time. An empty TimeFunction is read as identically zero
/// by every consumer in this library.
using TimeFunction = std::function<double(double)>;

/// amplitude * sin(frequency * t + phase)
struct Wave {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
};

/// offset + sum of sine waves. The closed-form coefficient family used by the
/// oscillator presets and by the JSON system schema.
struct Sinusoids {
  double offset = 0.0;
  std::vector<Wave> waves;

  static Sinusoids constant(double value) { return Sinusoids{value, {}}; }

  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] bool is_constant() const;
  /// |offset| + sum |amplitude|, an upper bound of |s(t)| for all t.
  [[nodiscard]] double envelope() const;
  [[nodiscard]] Sinusoids scaled(double factor) const;
};

/// Caches f on the grid t0 + k * step, k = 0 .. ceil((t1 - t0) / step).
/// Queries within 1e-9 * step of a grid point return the cached value, all
/// others fall through to f. Meant for coefficients that are expensive to
/// evaluate and are queried on a known Runge-Kutta grid.
[[nodiscard]] TimeFunction tabulate(TimeFunction f, double t0, double t1, double step);

[[nodiscard]] inline double eval_or_zero(const TimeFunction& f, double t) { return f ? f(t) : 0.0; }

}  // namespace bilat
