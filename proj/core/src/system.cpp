#include "bilat/system.hpp"

#include <cmath>
#include <sstream>

#include "bilat/error.hpp"

namespace bilat {

void PolynomialNonlinearity::validate(std::size_t n, std::size_t delay_count) const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& term = terms[i];
    std::ostringstream where;
    where << "monomial " << i << ": ";
    if (term.target >= n) throw Error(ErrorKind::InvalidParam, where.str() + "target index out of range");
    if (term.factors.empty()) {
      throw Error(ErrorKind::InvalidParam, where.str() + "needs at least one factor so that f*(t, 0) = 0");
    }
    for (const auto& f : term.factors) {
      if (f.power < 1) throw Error(ErrorKind::InvalidParam, where.str() + "powers must be >= 1");
      if (f.component >= n) throw Error(ErrorKind::InvalidParam, where.str() + "component index out of range");
      if (f.slot > delay_count) throw Error(ErrorKind::InvalidParam, where.str() + "delay slot out of range");
    }
  }
}

RMatrix TimeMatrix::operator()(double t) const {
  RMatrix m = RMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& e : entries) {
    m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += e.value(t);
  }
  return m;
}

bool TimeMatrix::is_zero() const {
  for (const auto& e : entries) {
    if (!e.value.is_zero()) return false;
  }
  return true;
}

MatrixFunction TimeMatrix::as_function() const {
  if (is_zero()) return {};
  return [m = *this](double t) { return m(t); };
}

bool Forcing::active() const {
  if (F0 == 0.0) return false;
  for (const auto& c : direction) {
    if (!c.is_zero()) return true;
  }
  return false;
}

void Forcing::eval(double t, std::span<double> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (F0 != 0.0 && i < direction.size()) ? F0 * direction[i](t) : 0.0;
  }
}

double Forcing::max_direction_norm(double t0, double t1, std::size_t samples) const {
  double sup = 0.0;
  samples = std::max<std::size_t>(samples, 2);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(samples - 1);
    double s = 0.0;
    for (const auto& c : direction) {
      const double v = c(t);
      s += v * v;
    }
    sup = std::max(sup, std::sqrt(s));
  }
  return sup;
}

DelaySet DelaySpec::to_delay_set() const {
  DelaySet set;
  set.h_lo = h_lo;
  set.h_hi = h_hi;
  for (const auto& f : functions) {
    if (f.is_constant()) {
      const double v = f(0.0);
      set.delays.emplace_back([v](double) { return v; });
    } else {
      set.delays.emplace_back(f);
    }
  }
  return set;
}

void HistorySpec::eval(double t, std::span<double> out) const {
  const double scale = kind == HistoryKind::Cosine ? std::cos(t) : 1.0;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x0[i] * scale;
}

HistoryFunction HistorySpec::to_function() const {
  HistoryFunction h;
  h.dim = x0.size();
  h.eval = [spec = *this](double t, std::span<double> out) { spec.eval(t, out); };
  return h;
}

void VectorDelaySystem::validate() const {
  if (n == 0) throw Error(ErrorKind::DimensionMismatch, "system dimension must be positive");
  if (static_cast<std::size_t>(A_star.rows()) != n || static_cast<std::size_t>(A_star.cols()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "A_star must be n x n");
  }
  if (!A_star.allFinite()) throw Error(ErrorKind::NonFinite, "A_star has non-finite entries");
  if (G_star.n != 0 && G_star.n != n) throw Error(ErrorKind::DimensionMismatch, "G_star must be n x n");
  for (const auto& e : G_star.entries) {
    if (e.row >= n || e.col >= n) throw Error(ErrorKind::DimensionMismatch, "G_star entry out of range");
  }
  nonlinearity.validate(n, delay_count());
  if (forcing.F0 < 0.0 || !std::isfinite(forcing.F0)) {
    throw Error(ErrorKind::InvalidParam, "forcing amplitude F0 must be finite and >= 0");
  }
  if (forcing.F0 > 0.0 && forcing.direction.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "forcing direction must have n components");
  }
  if (delay_count() > 0) {
    if (!(delays.h_lo > 0.0) || !(delays.h_hi >= delays.h_lo) || !std::isfinite(delays.h_hi)) {
      throw Error(ErrorKind::DelayBoundViolation, "delays must satisfy 0 < h_lo <= h_hi < inf");
    }
  }
  if (history.x0.size() != n) throw Error(ErrorKind::DimensionMismatch, "history must have n components");
}

void eval_rhs(const VectorDelaySystem& sys, double t, std::span<const double> x,
              std::span<const double> xd, std::span<double> out) {
  const std::size_t n = sys.n;
  if (x.size() != n || xd.size() != n * sys.delay_count() || out.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "eval_rhs: argument sizes do not match the system");
  }
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += sys.A_star(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j];
    }
    out[i] = acc;
  }
  for (const auto& e : sys.G_star.entries) out[e.row] += e.value(t) * x[e.col];
  auto args = [&](std::size_t slot) -> const double* {
    return slot == 0 ? x.data() : xd.data() + (slot - 1) * n;
  };
  sys.nonlinearity.accumulate<double>(t, args, out.data());
  if (sys.forcing.F0 != 0.0) {
    for (std::size_t i = 0; i < n && i < sys.forcing.direction.size(); ++i) {
      out[i] += sys.forcing.F0 * sys.forcing.direction[i](t);
    }
  }
}

std::vector<double> eval_rhs(const VectorDelaySystem& sys, double t, std::span<const double> x,
                             std::span<const double> xd) {
  std::vector<double> out(sys.n);
  eval_rhs(sys, t, x, xd, out);
  return out;
}

EigenbasisSystem::EigenbasisSystem(VectorDelaySystem sys, EigenDecomposition decomp)
    : sys_(std::move(sys)), decomp_(std::move(decomp)) {
  offset_ = OffsetSplit(sys_.G_star.as_function(), decomp_);
}

CVector EigenbasisSystem::nonlinearity(double t, std::span<const CVector> args) const {
  const auto n = static_cast<Eigen::Index>(sys_.n);
  if (args.size() != slots()) throw Error(ErrorKind::DimensionMismatch, "nonlinearity: wrong slot count");
  std::vector<CVector> xs;
  xs.reserve(args.size());
  for (const auto& y : args) {
    if (y.size() != n) throw Error(ErrorKind::DimensionMismatch, "nonlinearity: wrong vector size");
    xs.push_back(decomp_.V * y);
  }
  CVector fx = CVector::Zero(n);
  auto access = [&](std::size_t slot) -> const std::complex<double>* { return xs[slot].data(); };
  sys_.nonlinearity.accumulate<std::complex<double>>(t, access, fx.data());
  return decomp_.V_inv * fx;
}

CVector EigenbasisSystem::forcing(double t) const {
  RVector f(static_cast<Eigen::Index>(sys_.n));
  sys_.forcing.eval(t, std::span<double>(f.data(), sys_.n));
  return decomp_.V_inv * f.cast<std::complex<double>>();
}

double EigenbasisSystem::forcing_norm(double t) const {
  if (!sys_.forcing.active()) return 0.0;
  return forcing(t).norm();
}

CVector EigenbasisSystem::history(double t) const {
  RVector phi(static_cast<Eigen::Index>(sys_.n));
  sys_.history.eval(t, std::span<double>(phi.data(), sys_.n));
  return decomp_.V_inv * phi.cast<std::complex<double>>();
}

double EigenbasisSystem::history_norm(double t) const { return history(t).norm(); }

EigenbasisSystem to_eigenbasis(const VectorDelaySystem& sys, const EigenDecomposition& decomp) {
  if (decomp.n != sys.n) {
    throw Error(ErrorKind::DimensionMismatch, "to_eigenbasis: decomposition order differs from system dimension");
  }
  return EigenbasisSystem(sys, decomp);
}

Simulation simulate(const VectorDelaySystem& sys, double t_end, const StepConfig& config) {
  sys.validate();
  const DelaySet delays = sys.delays.to_delay_set();
  if (delays.size() > 0) validate_delays(delays, sys.t0, t_end);
  DdeRhs rhs = [&sys](double t, std::span<const double> x, std::span<const double> xd,
                      std::span<double> out) { eval_rhs(sys, t, x, xd, out); };
  Simulation sim{integrate(rhs, delays, sys.history.to_function(), sys.t0, t_end, config), {}, {}};
  const std::size_t count = sim.trajectory.node_count();
  sim.times.reserve(count);
  sim.norms.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    sim.times.push_back(sim.trajectory.node_time(k));
    sim.norms.push_back(sim.trajectory.node_norm(k));
  }
  return sim;
}

Trajectory simulate_eigenbasis(const EigenbasisSystem& esys, double t_end, const StepConfig& config) {
  const auto& sys = esys.system();
  sys.validate();
  const std::size_t n = sys.n;
  const std::size_t m = sys.delay_count();
  const CVector lambda = esys.decomposition().eigenvalues();
  const DelaySet delays = sys.delays.to_delay_set();

  auto unpack = [n](const double* data) {
    CVector y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = {data[2 * i], data[2 * i + 1]};
    return y;
  };
  DdeRhs rhs = [&, lambda](double t, std::span<const double> x, std::span<const double> xd,
                           std::span<double> out) {
    std::vector<CVector> args;
    args.reserve(m + 1);
    args.push_back(unpack(x.data()));
    for (std::size_t j = 0; j < m; ++j) args.push_back(unpack(xd.data() + 2 * n * j));
    CVector dy = lambda.cwiseProduct(args[0]);
    if (!esys.offset().is_zero()) dy += esys.offset().G(t) * args[0];
    dy += esys.nonlinearity(t, args);
    if (sys.forcing.active()) dy += esys.forcing(t);
    for (std::size_t i = 0; i < n; ++i) {
      out[2 * i] = dy(static_cast<Eigen::Index>(i)).real();
      out[2 * i + 1] = dy(static_cast<Eigen::Index>(i)).imag();
    }
  };
  HistoryFunction history;
  history.dim = 2 * n;
  history.eval = [&esys, n](double t, std::span<double> out) {
    const CVector y = esys.history(t);
    for (std::size_t i = 0; i < n; ++i) {
      out[2 * i] = y(static_cast<Eigen::Index>(i)).real();
      out[2 * i + 1] = y(static_cast<Eigen::Index>(i)).imag();
    }
  };
  return integrate(rhs, delays, history, sys.t0, t_end, config);
}

}  // namespace bilat
