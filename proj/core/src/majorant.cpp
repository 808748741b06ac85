#include "bilat/majorant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <random>

#include "bilat/error.hpp"

namespace bilat {
namespace {

TimeFunction constant_function(double value) {
  return [value](double) { return value; };
}

double magnitude_at(const MajorantTerm& term, double t) { return eval_or_zero(term.magnitude, t); }

double product(const MajorantTerm& term, const double* xi) {
  double p = 1.0;
  for (const auto& f : term.factors) {
    const double x = xi[f.slot];
    for (int k = 0; k < f.power; ++k) p *= x;
  }
  return p;
}

}  // namespace

Majorant::Majorant(std::size_t slots, std::vector<MajorantTerm> terms)
    : slots_(slots), terms_(std::move(terms)) {
  if (slots_ == 0) throw Error(ErrorKind::InvalidParam, "majorant needs at least one slot");
  for (const auto& term : terms_) {
    for (const auto& f : term.factors) {
      if (f.slot >= slots_) throw Error(ErrorKind::InvalidParam, "majorant term refers to a missing slot");
      if (f.power < 1) throw Error(ErrorKind::InvalidParam, "majorant powers must be >= 1");
    }
  }
}

double Majorant::eval(double t, std::span<const double> xi) const {
  if (xi.size() != slots_) throw Error(ErrorKind::DimensionMismatch, "majorant: wrong number of arguments");
  for (double x : xi) {
    if (!(x >= 0.0)) throw Error(ErrorKind::NegativeArgument, "majorant arguments must be >= 0");
  }
  return eval_unchecked(t, xi.data());
}

double Majorant::eval_unchecked(double t, const double* xi) const {
  double sum = 0.0;
  for (const auto& term : terms_) {
    const double p = product(term, xi);
    if (p != 0.0) sum += magnitude_at(term, t) * p;
  }
  return sum;
}

Majorant Majorant::scaled(double factor) const {
  std::vector<MajorantTerm> out;
  out.reserve(terms_.size());
  for (const auto& term : terms_) {
    out.push_back({[m = term.magnitude, factor](double t) { return factor * eval_or_zero(m, t); },
                   term.factors});
  }
  return Majorant(slots_, std::move(out));
}

Majorant Majorant::remapped(const std::vector<std::size_t>& mapping, std::size_t slots) const {
  if (mapping.size() != slots_) throw Error(ErrorKind::DimensionMismatch, "majorant remap: wrong mapping size");
  std::vector<MajorantTerm> out = terms_;
  for (auto& term : out) {
    for (auto& f : term.factors) f.slot = mapping[f.slot];
  }
  return Majorant(slots, std::move(out));
}

Majorant Majorant::tabulated(double t0, double t1, double step) const {
  std::vector<MajorantTerm> out = terms_;
  for (auto& term : out) term.magnitude = tabulate(term.magnitude, t0, t1, step);
  return Majorant(slots_, std::move(out));
}

double eval_majorant(const Majorant& L, double t, std::span<const double> xi) { return L.eval(t, xi); }

double RobustMajorant::eval(double t, std::span<const double> xi) const {
  return offset + base.eval(t, xi);
}

Majorant build_majorant(const PolynomialNonlinearity& nl, const EigenDecomposition& decomp,
                        std::size_t slots) {
  const std::size_t n = decomp.n;
  for (const auto& term : nl.terms) {
    if (term.factors.empty()) {
      throw Error(ErrorKind::UnsupportedForm, "majorant: term without state factors is not a monomial");
    }
  }
  if (slots == 0) throw Error(ErrorKind::InvalidParam, "majorant needs at least one slot");
  nl.validate(n, slots - 1);

  std::vector<double> row_sum(n);
  for (std::size_t k = 0; k < n; ++k) row_sum[k] = decomp.V.row(static_cast<Eigen::Index>(k)).cwiseAbs().sum();

  struct LinearEntry {
    std::size_t row, col;
    Sinusoids value;
  };
  std::vector<std::vector<LinearEntry>> linear(slots);
  struct Weighted {
    Sinusoids coefficient;
    double weight;
  };
  std::map<std::vector<std::pair<std::size_t, int>>, std::vector<Weighted>> nonlinear;

  for (const auto& term : nl.terms) {
    if (term.coefficient.is_zero()) continue;
    if (term.factors.size() == 1 && term.factors[0].power == 1) {
      linear[term.factors[0].slot].push_back({term.target, term.factors[0].component, term.coefficient});
      continue;
    }
    std::map<std::size_t, int> powers;
    double weight = decomp.norm_V_inv;
    for (const auto& f : term.factors) {
      powers[f.slot] += f.power;
      weight *= std::pow(row_sum[f.component], f.power);
    }
    nonlinear[{powers.begin(), powers.end()}].push_back({term.coefficient, weight});
  }

  std::vector<MajorantTerm> out;
  for (std::size_t slot = 0; slot < slots; ++slot) {
    if (linear[slot].empty()) continue;
    const auto entries = linear[slot];
    const CMatrix V = decomp.V;
    const CMatrix V_inv = decomp.V_inv;
    auto norm_at = [entries, V, V_inv, n](double t) {
      CMatrix M = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (const auto& e : entries) {
        M(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += e.value(t);
      }
      return spectral_norm(CMatrix(V_inv * M * V));
    };
    const bool constant = std::all_of(entries.begin(), entries.end(),
                                      [](const LinearEntry& e) { return e.value.is_constant(); });
    TimeFunction magnitude = constant ? constant_function(norm_at(0.0)) : TimeFunction(norm_at);
    out.push_back({std::move(magnitude), {{slot, 1}}});
  }
  for (const auto& [signature, parts] : nonlinear) {
    std::vector<SlotPower> factors;
    for (const auto& [slot, power] : signature) factors.push_back({slot, power});
    const bool constant = std::all_of(parts.begin(), parts.end(),
                                      [](const Weighted& w) { return w.coefficient.is_constant(); });
    auto magnitude = [parts](double t) {
      double s = 0.0;
      for (const auto& w : parts) s += w.weight * std::abs(w.coefficient(t));
      return s;
    };
    out.push_back({constant ? constant_function(magnitude(0.0)) : TimeFunction(magnitude), std::move(factors)});
  }
  return Majorant(slots, std::move(out));
}

DominationReport verify_domination(const Majorant& L, const NonlinearityFn& f, std::size_t dim,
                                   const DominationSampling& s) {
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t slots = L.slots();
  std::vector<CVector> args(slots, CVector(static_cast<Eigen::Index>(dim)));
  std::vector<double> xi(slots);
  DominationReport report{true, std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < std::max<std::size_t>(s.samples, 1); ++k) {
    const double t = s.t0 + s.t_window * unit(rng);
    for (std::size_t j = 0; j < slots; ++j) {
      for (Eigen::Index i = 0; i < args[j].size(); ++i) args[j](i) = {gauss(rng), gauss(rng)};
      const double norm = args[j].norm();
      const double r = s.radius * unit(rng);
      if (norm > 0.0) args[j] *= r / norm;
      xi[j] = args[j].norm();
    }
    const double lhs = f ? f(t, args).norm() : 0.0;
    const double margin = L.eval(t, xi) - lhs;
    report.worst_margin = std::min(report.worst_margin, margin);
  }
  report.holds = report.worst_margin >= -s.slack;
  return report;
}

DominationReport verify_domination(const Majorant& L, const EigenbasisSystem& esys,
                                   const DominationSampling& s) {
  NonlinearityFn f = [&esys](double t, std::span<const CVector> args) { return esys.nonlinearity(t, args); };
  DominationSampling local = s;
  if (local.t0 == 0.0) local.t0 = esys.system().t0;
  return verify_domination(L, f, esys.dim(), local);
}

Majorant linearize_majorant(const Majorant& L, double xi_bar) {
  if (!(xi_bar > 0.0)) throw Error(ErrorKind::InvalidParam, "linearize_majorant: xi_bar must be positive");
  struct Part {
    TimeFunction magnitude;
    double factor;
  };
  std::vector<std::vector<Part>> per_slot(L.slots());
  for (const auto& term : L.terms()) {
    if (term.factors.empty()) continue;
    int degree = 0;
    for (const auto& f : term.factors) degree += f.power;
    per_slot[term.factors.front().slot].push_back({term.magnitude, std::pow(xi_bar, degree - 1)});
  }
  std::vector<MajorantTerm> out;
  for (std::size_t slot = 0; slot < per_slot.size(); ++slot) {
    if (per_slot[slot].empty()) continue;
    auto magnitude = [parts = per_slot[slot]](double t) {
      double s = 0.0;
      for (const auto& p : parts) s += p.factor * eval_or_zero(p.magnitude, t);
      return s;
    };
    out.push_back({magnitude, {{slot, 1}}});
  }
  return Majorant(L.slots(), std::move(out));
}

AutonomousBounds autonomize(const Majorant& L, const TimeFunction& g_norm, const TimeFunction& F_norm,
                            double t0, double t1, std::size_t samples) {
  if (!(t1 > t0)) throw Error(ErrorKind::EmptyInterval, "autonomize: empty window");
  samples = std::max<std::size_t>(samples, 2);
  auto sup = [&](const TimeFunction& f) {
    if (!f) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(samples - 1);
      const double v = f(t);
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "autonomize: non-finite sample");
      s = std::max(s, v);
    }
    return s;
  };
  AutonomousBounds out;
  std::vector<MajorantTerm> terms;
  for (const auto& term : L.terms()) terms.push_back({constant_function(sup(term.magnitude)), term.factors});
  out.L_s = Majorant(L.slots(), std::move(terms));
  out.g_s = sup(g_norm);
  out.F_s = sup(F_norm);
  return out;
}

}  // namespace bilat
