#include "bilat/dde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "bilat/error.hpp"

namespace bilat {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

DelaySet DelaySet::constant(const std::vector<double>& values) {
  DelaySet set;
  if (values.empty()) return set;
  set.h_lo = *std::min_element(values.begin(), values.end());
  set.h_hi = *std::max_element(values.begin(), values.end());
  for (double v : values) set.delays.emplace_back([v](double) { return v; });
  return set;
}

DelaySet DelaySet::joined(const DelaySet& other) const {
  if (delays.empty()) return other;
  if (other.delays.empty()) return *this;
  DelaySet out = *this;
  out.delays.insert(out.delays.end(), other.delays.begin(), other.delays.end());
  out.h_lo = std::min(h_lo, other.h_lo);
  out.h_hi = std::max(h_hi, other.h_hi);
  return out;
}

DelayBounds validate_delays(const DelaySet& delays, double t0, double t_end, std::size_t samples) {
  DelayBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  if (delays.size() == 0) return {0.0, 0.0};
  if (!(delays.h_lo > 0.0) || !(delays.h_hi >= delays.h_lo) || !std::isfinite(delays.h_hi)) {
    throw Error(ErrorKind::DelayBoundViolation, "declared delay bounds must satisfy 0 < h_lo <= h_hi < inf");
  }
  samples = std::max<std::size_t>(samples, 2);
  for (std::size_t i = 0; i < delays.size(); ++i) {
    for (std::size_t k = 0; k < samples; ++k) {
      const double t = t0 + (t_end - t0) * static_cast<double>(k) / static_cast<double>(samples - 1);
      const double h = delays.delays[i](t);
      if (!std::isfinite(h)) throw Error(ErrorKind::NonFinite, "delay function returned non-finite value");
      b.h_lo_observed = std::min(b.h_lo_observed, h);
      b.h_hi_observed = std::max(b.h_hi_observed, h);
    }
  }
  const double slack = 1e-12 * (1.0 + delays.h_hi);
  if (b.h_lo_observed < delays.h_lo - slack || b.h_hi_observed > delays.h_hi + slack) {
    std::ostringstream os;
    os << "observed delay range [" << b.h_lo_observed << ", " << b.h_hi_observed
       << "] leaves declared [" << delays.h_lo << ", " << delays.h_hi << "]";
    throw Error(ErrorKind::DelayBoundViolation, os.str());
  }
  return b;
}

HistoryFunction HistoryFunction::constant(std::vector<double> value) {
  HistoryFunction h;
  h.dim = value.size();
  h.eval = [v = std::move(value)](double, std::span<double> out) {
    std::copy(v.begin(), v.end(), out.begin());
  };
  return h;
}

HistoryFunction HistoryFunction::scalar(TimeFunction f) {
  HistoryFunction h;
  h.dim = 1;
  h.eval = [f = std::move(f)](double t, std::span<double> out) { out[0] = f(t); };
  return h;
}

double HistoryFunction::sup_norm(double t0, double h_hi, std::size_t samples) const {
  std::vector<double> buf(dim);
  double sup = 0.0;
  samples = std::max<std::size_t>(samples, 2);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = t0 - h_hi + h_hi * static_cast<double>(k) / static_cast<double>(samples - 1);
    eval(t, buf);
    sup = std::max(sup, norm2(buf));
  }
  return sup;
}

double default_step(const DelaySet& delays) {
  if (delays.size() == 0) return 1e-2;
  return std::min(delays.h_lo / 2.0, 1e-2);
}

std::span<const double> Trajectory::node(std::size_t k) const {
  return {nodes_.data() + k * dim_, dim_};
}

std::span<const double> Trajectory::node_derivative(std::size_t k) const {
  return {derivs_.data() + k * dim_, dim_};
}

double Trajectory::node_norm(std::size_t k) const { return norm2(node(k)); }

void Trajectory::eval(double t, std::span<double> out) const {
  if (t <= t0_) {
    if (t < t0_ - h_hi_ - 1e-12 * (1.0 + std::abs(t0_) + h_hi_)) {
      throw Error(ErrorKind::OutOfRange, "trajectory evaluated before the history interval");
    }
    history_.eval(t, out);
    if (clamp_) {
      for (auto& v : out) v = std::max(v, 0.0);
    }
    return;
  }
  const std::size_t count = node_count();
  const double last = node_time(count - 1);
  if (count < 2 || t > last + 1e-12 * (1.0 + std::abs(last))) {
    throw Error(ErrorKind::OutOfRange, "trajectory evaluated past its last node");
  }
  const double u = (t - t0_) / dt_;
  auto k = static_cast<std::size_t>(std::floor(u));
  if (k >= count - 1) k = count - 2;
  const double tk = node_time(k);
  if (t == tk) {
    std::copy_n(nodes_.data() + k * dim_, dim_, out.begin());
    return;
  }
  if (t == node_time(k + 1)) {
    std::copy_n(nodes_.data() + (k + 1) * dim_, dim_, out.begin());
    return;
  }
  const double s = (t - tk) / dt_;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  const double* y0 = nodes_.data() + k * dim_;
  const double* y1 = y0 + dim_;
  const double* d0 = derivs_.data() + k * dim_;
  const double* d1 = d0 + dim_;
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i] = h00 * y0[i] + h10 * dt_ * d0[i] + h01 * y1[i] + h11 * dt_ * d1[i];
    if (clamp_) out[i] = std::max(out[i], 0.0);
  }
}

std::vector<double> Trajectory::eval(double t) const {
  std::vector<double> out(dim_);
  eval(t, out);
  return out;
}

namespace {

std::size_t step_count(double requested, double t0, double t_end) {
  return std::max<std::size_t>(
      static_cast<std::size_t>(std::ceil((t_end - t0) / requested - 1e-9)), 1);
}

}  // namespace

double effective_step(const DelaySet& delays, double t0, double t_end, const StepConfig& config) {
  const double requested = config.dt > 0.0 ? config.dt : default_step(delays);
  return (t_end - t0) / static_cast<double>(step_count(requested, t0, t_end));
}

Trajectory integrate(const DdeRhs& rhs, const DelaySet& delays, const HistoryFunction& history,
                     double t0, double t_end, const StepConfig& config) {
  if (!(t_end > t0)) throw Error(ErrorKind::EmptyInterval, "integrate: t_end must exceed t0");
  if (!history.eval || history.dim == 0) {
    throw Error(ErrorKind::DimensionMismatch, "integrate: history function is empty");
  }
  const std::size_t m = delays.size();
  const double requested = config.dt > 0.0 ? config.dt : default_step(delays);
  if (m > 0) {
    if (!(delays.h_lo > 0.0)) {
      throw Error(ErrorKind::DelayBoundViolation, "integrate: h_lo must be positive");
    }
    if (requested > delays.h_lo / 2.0) {
      std::ostringstream os;
      os << "step " << requested << " exceeds h_lo / 2 = " << delays.h_lo / 2.0;
      throw Error(ErrorKind::StepTooLarge, os.str());
    }
  }
  const std::size_t steps = step_count(requested, t0, t_end);
  const std::size_t n = history.dim;

  Trajectory traj;
  traj.t0_ = t0;
  traj.dt_ = (t_end - t0) / static_cast<double>(steps);
  traj.h_hi_ = m > 0 ? delays.h_hi : 0.0;
  traj.dim_ = n;
  traj.clamp_ = config.clamp_nonnegative;
  traj.history_ = history;
  traj.nodes_.reserve((steps + 1) * n);
  traj.derivs_.reserve((steps + 1) * n);

  const double dt = traj.dt_;
  std::vector<double> x(n), stage(n), delayed(m * n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), next(n);

  history.eval(t0, x);
  if (config.clamp_nonnegative) {
    for (auto& v : x) v = std::max(v, 0.0);
  }
  if (!finite(x)) throw Error(ErrorKind::NonFinite, "integrate: history is not finite at t0");
  traj.nodes_.insert(traj.nodes_.end(), x.begin(), x.end());
  const bool starts_escaped = norm2(x) > config.blowup_threshold;

  auto gather = [&](double t) {
    for (std::size_t j = 0; j < m; ++j) {
      const double tau = t - delays.delays[j](t);
      traj.eval(tau, std::span<double>(delayed.data() + j * n, n));
    }
  };
  // Returns false when the rhs overflowed on an already escaping state.
  auto call = [&](double t, std::span<const double> state, std::vector<double>& out) {
    gather(t);
    rhs(t, state, delayed, out);
    if (!finite(out)) {
      if (norm2(state) > config.blowup_threshold || !finite(state)) return false;
      std::ostringstream os;
      os << "right-hand side returned a non-finite value at t = " << t;
      throw Error(ErrorKind::NonFinite, os.str());
    }
    return true;
  };

  // Derivative at the final node; falls back to the secant when it overflows.
  auto finish_derivative = [&](std::size_t idx) {
    const double t = traj.node_time(idx);
    gather(t);
    rhs(t, x, delayed, k1);
    if (!finite(k1) && idx > 0) {
      for (std::size_t i = 0; i < n; ++i) {
        k1[i] = (x[i] - traj.nodes_[(idx - 1) * n + i]) / dt;
      }
    }
    traj.derivs_.insert(traj.derivs_.end(), k1.begin(), k1.end());
  };

  if (starts_escaped) {
    traj.blowup_ = BlowupRecord{t0, norm2(x), true};
    finish_derivative(0);
    return traj;
  }

  for (std::size_t i = 0; i < steps; ++i) {
    const double t = traj.node_time(i);
    const double t_next = traj.node_time(i + 1);
    const double t_half = t + 0.5 * dt;

    if (!call(t, x, k1)) {
      traj.blowup_ = BlowupRecord{t, norm2(x), true};
      break;
    }
    traj.derivs_.insert(traj.derivs_.end(), k1.begin(), k1.end());

    bool ok = true;
    for (std::size_t c = 0; c < n; ++c) stage[c] = x[c] + 0.5 * dt * k1[c];
    ok = ok && call(t_half, stage, k2);
    if (ok) {
      for (std::size_t c = 0; c < n; ++c) stage[c] = x[c] + 0.5 * dt * k2[c];
      ok = call(t_half, stage, k3);
    }
    if (ok) {
      for (std::size_t c = 0; c < n; ++c) stage[c] = x[c] + dt * k3[c];
      ok = call(t_next, stage, k4);
    }
    if (ok) {
      for (std::size_t c = 0; c < n; ++c) {
        next[c] = x[c] + dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
      }
    }
    if (!ok || !finite(next)) {
      // Overflow inside an escaping step: keep the finite prefix.
      traj.blowup_ = BlowupRecord{t_next, std::numeric_limits<double>::infinity(), false};
      return traj;
    }
    if (config.clamp_nonnegative) {
      for (auto& v : next) v = std::max(v, 0.0);
    }
    std::swap(x, next);
    traj.nodes_.insert(traj.nodes_.end(), x.begin(), x.end());
    const double nrm = norm2(x);
    if (nrm > config.blowup_threshold) {
      traj.blowup_ = BlowupRecord{t_next, nrm, true};
      finish_derivative(i + 1);
      return traj;
    }
  }
  if (traj.derivs_.size() < traj.nodes_.size()) finish_derivative(traj.node_count() - 1);
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t";
  for (std::size_t i = 0; i < traj.dim(); ++i) os << ",x" << (i + 1);
  os << ",norm\n";
  char buf[64];
  for (std::size_t k = 0; k < traj.node_count(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.node_time(k));
    os << buf;
    for (double v : traj.node(k)) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", traj.node_norm(k));
    os << buf;
  }
}

}  // namespace bilat
