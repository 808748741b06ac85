#include "bilat/time_function.hpp"

#include <cmath>
#include <memory>
#include <vector>

namespace bilat {

double Sinusoids::operator()(double t) const {
  double value = offset;
  for (const auto& w : waves) {
    value += w.amplitude * std::sin(w.frequency * t + w.phase);
  }
  return value;
}

bool Sinusoids::is_zero() const {
  if (offset != 0.0) return false;
  for (const auto& w : waves) {
    if (w.amplitude != 0.0) return false;
  }
  return true;
}

bool Sinusoids::is_constant() const {
  for (const auto& w : waves) {
    if (w.amplitude != 0.0 && w.frequency != 0.0) return false;
  }
  return true;
}

double Sinusoids::envelope() const {
  double e = std::abs(offset);
  for (const auto& w : waves) e += std::abs(w.amplitude);
  return e;
}

Sinusoids Sinusoids::scaled(double factor) const {
  Sinusoids out{offset * factor, waves};
  for (auto& w : out.waves) w.amplitude *= factor;
  return out;
}

TimeFunction tabulate(TimeFunction f, double t0, double t1, double step) {
  if (!f || !(step > 0.0) || !(t1 > t0)) return f;
  const auto count = static_cast<std::size_t>(std::ceil((t1 - t0) / step)) + 1;
  auto table = std::make_shared<std::vector<double>>(count);
  for (std::size_t k = 0; k < count; ++k) (*table)[k] = f(t0 + static_cast<double>(k) * step);
  return [f = std::move(f), table, t0, step](double t) {
    const double u = (t - t0) / step;
    const double k = std::nearbyint(u);
    if (k >= 0.0 && k < static_cast<double>(table->size()) && std::abs(u - k) <= 1e-9) {
      return (*table)[static_cast<std::size_t>(k)];
    }
    return f(t);
  };
}

}  // namespace bilat
