#include "bilat/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>

#include "bilat/error.hpp"

namespace bilat {
namespace {

ScalarBoundProblem build_common(const EigenbasisSystem& esys, const Majorant& L, BoundKind kind) {
  if (L.slots() != esys.slots()) {
    throw Error(ErrorKind::DimensionMismatch, "majorant slot count differs from the system's delay count + 1");
  }
  auto shared = std::make_shared<const EigenbasisSystem>(esys);
  const auto& d = esys.decomposition();
  ScalarBoundProblem p;
  p.kind = kind;
  p.rate = kind == BoundKind::Lower ? d.alpha_min() : d.alpha_max();
  if (!esys.offset().is_zero()) {
    p.g_norm = [shared](double t) { return shared->offset().g_norm(t); };
  }
  p.L = L;
  if (esys.system().forcing.active()) {
    p.forcing_norm = [shared](double t) { return shared->forcing_norm(t); };
  }
  p.delays = esys.system().delays.to_delay_set();
  p.history = [shared](double t) { return shared->history_norm(t); };
  p.t0 = esys.system().t0;
  p.norm_V = d.norm_V;
  p.norm_V_inv = d.norm_V_inv;
  return p;
}

}  // namespace

ScalarBoundProblem ScalarBoundProblem::with_history(TimeFunction h) const {
  ScalarBoundProblem p = *this;
  p.history = std::move(h);
  return p;
}

ScalarBoundProblem ScalarBoundProblem::with_constant_history(double c) const {
  if (!(c >= 0.0)) throw Error(ErrorKind::NegativeArgument, "scalar history must be >= 0");
  return with_history([c](double) { return c; });
}

ScalarBoundProblem ScalarBoundProblem::tabulated(double t_end, const StepConfig& config) const {
  const double half = 0.5 * effective_step(delays, t0, t_end, config);
  ScalarBoundProblem p = *this;
  p.g_norm = tabulate(g_norm, t0, t_end, half);
  p.forcing_norm = tabulate(forcing_norm, t0, t_end, half);
  p.L = L.tabulated(t0, t_end, half);
  if (robust) p.robust->base = robust->base.tabulated(t0, t_end, half);
  return p;
}

double ScalarBoundProblem::rhs(double t, double u, std::span<const double> delayed) const {
  const std::size_t slots = delays.size() + 1;
  double xi_stack[8];
  std::vector<double> xi_heap;
  double* xi = xi_stack;
  if (slots > 8) {
    xi_heap.resize(slots);
    xi = xi_heap.data();
  }
  xi[0] = u;
  for (std::size_t j = 1; j < slots; ++j) xi[j] = delayed[j - 1];
  const double g = eval_or_zero(g_norm, t);
  const double F = eval_or_zero(forcing_norm, t);
  if (kind == BoundKind::Lower) {
    for (std::size_t j = 0; j < slots; ++j) xi[j] = std::max(xi[j], 0.0);
    return (rate - g) * u - L.eval_unchecked(t, xi) - F;
  }
  double value = (rate + g) * u + L.eval_unchecked(t, xi) + F;
  if (robust) value += robust->offset + robust->base.eval_unchecked(t, xi);
  return value;
}

ScalarBoundProblem build_upper(const EigenbasisSystem& esys, const Majorant& L) {
  return build_common(esys, L, BoundKind::Upper);
}

ScalarBoundProblem build_lower(const EigenbasisSystem& esys, const Majorant& L) {
  return build_common(esys, L, BoundKind::Lower);
}

ScalarBoundProblem build_robust(const EigenbasisSystem& esys, const Majorant& L,
                                const RobustMajorant& L_R, const DelaySet& delays_R) {
  if (delays_R.size() > 0 && !(delays_R.h_lo > 0.0 && delays_R.h_hi >= delays_R.h_lo)) {
    throw Error(ErrorKind::DelayBoundViolation, "robust delays must satisfy 0 < h_lo <= h_hi");
  }
  if (L_R.base.slots() != delays_R.size() + 1) {
    throw Error(ErrorKind::DimensionMismatch, "robust majorant slot count differs from its delay count + 1");
  }
  if (!(L_R.offset >= 0.0)) throw Error(ErrorKind::InvalidParam, "robust offset must be >= 0");
  ScalarBoundProblem p = build_common(esys, L, BoundKind::RobustUpper);
  const std::size_t m = p.delays.size();
  const std::size_t slots = m + delays_R.size() + 1;
  std::vector<std::size_t> base_map(m + 1), robust_map(delays_R.size() + 1);
  for (std::size_t j = 0; j <= m; ++j) base_map[j] = j;
  robust_map[0] = 0;
  for (std::size_t j = 1; j < robust_map.size(); ++j) robust_map[j] = m + j;
  p.delays = m == 0 ? delays_R : p.delays.joined(delays_R);
  p.L = p.L.remapped(base_map, slots);
  p.robust = RobustMajorant{L_R.base.remapped(robust_map, slots), L_R.offset};
  return p;
}

Trajectory solve_scalar(const ScalarBoundProblem& p, double t_end, const StepConfig& config) {
  if (!p.history) throw Error(ErrorKind::InvalidParam, "scalar problem has no history");
  StepConfig cfg = config;
  cfg.clamp_nonnegative = p.kind == BoundKind::Lower;
  DdeRhs rhs = [&p](double t, std::span<const double> x, std::span<const double> xd, std::span<double> out) {
    out[0] = p.rhs(t, x[0], xd);
  };
  HistoryFunction h;
  h.dim = 1;
  h.eval = [hist = p.history](double t, std::span<double> out) { out[0] = hist(t); };
  return integrate(rhs, p.delays, h, p.t0, t_end, cfg);
}

double BoundPair::upper(double t) const { return scale_up * Z.eval(t)[0]; }

double BoundPair::lower(double t) const { return scale_down * z.eval(t)[0]; }

double BoundPair::common_end() const { return std::min(Z.t_end(), z.t_end()); }

BoundPair solve_bounds(const ScalarBoundProblem& up, const ScalarBoundProblem& low, double t_end,
                       const StepConfig& config) {
  if (up.kind == BoundKind::Lower || low.kind != BoundKind::Lower) {
    throw Error(ErrorKind::InvalidParam, "solve_bounds expects an upper and a lower problem");
  }
  if (up.t0 != low.t0) throw Error(ErrorKind::RangeMismatch, "upper and lower problems start at different t0");
  BoundPair pair{solve_scalar(up, t_end, config), solve_scalar(low, t_end, config), up.norm_V,
                 1.0 / low.norm_V_inv};
  return pair;
}

EnclosureReport check_enclosure(std::span<const double> times, std::span<const double> norms,
                                const BoundPair& pair, const Tolerance& tol) {
  if (times.size() != norms.size() || times.empty()) {
    throw Error(ErrorKind::RangeMismatch, "check_enclosure: times and norms must be non-empty and equally long");
  }
  const double t0 = pair.Z.t0();
  const double end = pair.common_end();
  const double slack = 1e-9 * std::max(1.0, std::abs(end));
  EnclosureReport r;
  r.pass = true;
  r.worst_margin = std::numeric_limits<double>::infinity();
  std::vector<double> buf(1);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t < t0 - slack || t > end + slack) {
      throw Error(ErrorKind::RangeMismatch, "check_enclosure: sample outside the bounds' time range");
    }
    const double tc = std::clamp(t, t0, end);
    const double up = pair.upper(tc);
    const double lo = pair.lower(tc);
    const double x = norms[k];
    const double m_up = up - x;
    const double m_lo = x - lo;
    if (m_up < -(tol.abs + tol.rel * up) || m_lo < -(tol.abs + tol.rel * lo)) r.pass = false;
    const double m = std::min(m_up, m_lo);
    if (m < r.worst_margin) {
      r.worst_margin = m;
      r.worst_time = t;
      r.worst_is_upper = m_up <= m_lo;
    }
    ++r.samples;
  }
  return r;
}

void write_bounds_csv(const BoundPair& pair, std::ostream& os) {
  os << "t,Z,z,upper,lower\n";
  const double end = pair.common_end();
  char line[160];
  for (std::size_t k = 0; k < pair.Z.node_count(); ++k) {
    const double t = pair.Z.node_time(k);
    if (t > end + 1e-12) break;
    const double Z = pair.Z.node(k)[0];
    const double z = pair.z.eval(t)[0];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", t, Z, z, pair.scale_up * Z,
                  pair.scale_down * z);
    os << line;
  }
}

}  // namespace bilat
