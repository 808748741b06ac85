#include "bilat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "json.hpp"

#include "bilat/error.hpp"
#include "bilat/majorant.hpp"
#include "bilat/parallel.hpp"

namespace bilat {
namespace {

void require_series(std::span<const double> times, std::span<const double> values, double t0, double T) {
  if (times.size() != values.size() || times.empty()) {
    throw Error(ErrorKind::HorizonUncovered, "series is empty or ragged");
  }
  const double eps = 1e-9 * std::max(1.0, std::abs(t0) + T);
  if (times.front() > t0 + eps || times.back() < t0 + T - eps) {
    throw Error(ErrorKind::HorizonUncovered, "series does not span [t0, t0 + T]");
  }
}

double peak(const Trajectory& traj, double t_last) {
  double p = 0.0;
  for (std::size_t k = 0; k < traj.node_count() && traj.node_time(k) <= t_last; ++k) {
    p = std::max(p, traj.node_norm(k));
  }
  return p;
}

}  // namespace

void FtsSpec::validate() const {
  if (!(eta1 > 0.0 && eta1 < eta2)) throw Error(ErrorKind::InvalidParam, "FTS spec needs 0 < eta1 < eta2");
  if (!(T > 0.0)) throw Error(ErrorKind::InvalidParam, "FTS spec needs T > 0");
  if (eta3 && !(*eta3 > eta1)) throw Error(ErrorKind::InvalidParam, "FTS spec needs eta1 < eta3");
}

bool check_fts(std::span<const double> times, std::span<const double> values, const FtsSpec& spec,
               double t0) {
  spec.validate();
  require_series(times, values, t0, spec.T);
  const double eps = 1e-9 * std::max(1.0, std::abs(t0) + spec.T);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t0 - eps || times[k] > t0 + spec.T + eps) continue;
    if (!(values[k] < spec.eta2)) return false;
  }
  return true;
}

FtcsResult check_ftcs(std::span<const double> times, std::span<const double> values, const FtsSpec& spec,
                      double t0) {
  if (!spec.eta3) throw Error(ErrorKind::InvalidParam, "FTCS check needs eta3");
  FtcsResult result;
  if (!check_fts(times, values, spec, t0)) return result;
  const double eps = 1e-9 * std::max(1.0, std::abs(t0) + spec.T);
  const double t_stop = t0 + spec.T;
  // Walk back from the end of the window while samples stay below eta3.
  std::optional<std::size_t> first;
  for (std::size_t k = times.size(); k-- > 0;) {
    if (times[k] > t_stop + eps) continue;
    if (times[k] <= t0 + eps) break;
    if (!(values[k] < *spec.eta3)) break;
    first = k;
  }
  if (first && times[*first] < t_stop - eps) {
    result.holds = true;
    result.t1 = times[*first];
  }
  return result;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::UpperBoundedOnHorizon: return "upper-bounded-on-horizon";
    case Verdict::UpperBlowup: return "upper-blowup";
    case Verdict::LowerUnbounded: return "lower-unbounded";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

ClassificationReport classify(const BoundPair& pair, double horizon) {
  ClassificationReport r;
  r.horizon = horizon;
  const double t0 = pair.Z.t0();
  const double t_stop = t0 + horizon;
  const double eps = 1e-9 * std::max(1.0, std::abs(t_stop));
  const auto within = [&](const std::optional<BlowupRecord>& b) { return b && b->time <= t_stop + eps; };
  if (within(pair.Z.blowup())) r.upper_blowup_time = pair.Z.blowup()->time;
  if (within(pair.z.blowup())) r.lower_blowup_time = pair.z.blowup()->time;
  r.peak_Z = peak(pair.Z, t_stop + eps);
  r.peak_z = peak(pair.z, t_stop + eps);
  r.peak_upper = pair.scale_up * r.peak_Z;
  r.peak_lower = pair.scale_down * r.peak_z;

  const bool Z_covers = pair.Z.t_end() >= t_stop - eps;
  const bool z_covers = pair.z.t_end() >= t_stop - eps;
  if (r.lower_blowup_time) {
    r.verdict = Verdict::LowerUnbounded;
    r.statement =
        "the lower bound escapes, so |x| >= z/|V^-1| escapes as well: the vector solution is "
        "unbounded, and the trivial solution is unstable";
  } else if (!r.upper_blowup_time && Z_covers) {
    r.verdict = Verdict::UpperBoundedOnHorizon;
    r.statement =
        "|x| <= |V| Z on the horizon; the bounded upper solution is evidence that the vector "
        "solution is bounded with the same bound";
  } else if (r.upper_blowup_time && !z_covers) {
    r.verdict = Verdict::UpperBlowup;
    r.statement = "the upper bound escapes and the lower bound was not resolved on the horizon";
  } else {
    r.verdict = Verdict::Inconclusive;
    r.statement =
        "the upper bound escapes while the lower bound stays finite; the vector solution may "
        "still be stable";
  }
  return r;
}

std::string classification_to_json(const ClassificationReport& r) {
  nlohmann::ordered_json j;
  j["verdict"] = std::string(to_string(r.verdict));
  j["statement"] = r.statement;
  j["horizon"] = r.horizon;
  j["peak_Z"] = r.peak_Z;
  j["peak_z"] = r.peak_z;
  j["peak_upper"] = r.peak_upper;
  j["peak_lower"] = r.peak_lower;
  j["upper_blowup_time"] = r.upper_blowup_time ? nlohmann::ordered_json(*r.upper_blowup_time) : nullptr;
  j["lower_blowup_time"] = r.lower_blowup_time ? nlohmann::ordered_json(*r.lower_blowup_time) : nullptr;
  return j.dump(2);
}

RadiusEstimate bisect_radius(const std::function<bool(double)>& escapes, const RadiusSearch& search) {
  if (!(search.c_max > 0.0) || !(search.tol > 0.0)) {
    throw Error(ErrorKind::InvalidParam, "radius search needs c_max > 0 and tol > 0");
  }
  RadiusEstimate est;
  auto bad = [&](double c) {
    ++est.evaluations;
    return escapes(c);
  };
  const double tol = std::min(search.tol, search.c_max);
  if (bad(tol)) throw Error(ErrorKind::AllBad, "radius search: the smallest history already escapes");
  double lo = tol;
  double hi = 0.0;
  double c = std::clamp(1.0, tol, search.c_max);
  if (c > lo) {
    if (bad(c)) {
      hi = c;
    } else {
      lo = c;
    }
  }
  while (hi == 0.0 && lo < search.c_max) {
    const double next = std::min(2.0 * lo, search.c_max);
    if (bad(next)) {
      hi = next;
    } else {
      lo = next;
    }
  }
  if (hi == 0.0) {
    est.radius = search.c_max;
    est.all_good = true;
    return est;
  }
  for (std::size_t it = 0; it < search.max_iter && hi - lo > search.tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (bad(mid)) hi = mid; else lo = mid;
  }
  est.radius = lo;
  return est;
}

RadiusEstimate estimate_scalar_radius(const ScalarProblemBuilder& build, double horizon, double threshold,
                                      const RadiusSearch& search, const StepConfig& step) {
  StepConfig cfg = step;
  cfg.blowup_threshold = threshold;
  return bisect_radius(
      [&](double c) {
        const ScalarBoundProblem p = build(c);
        const Trajectory Z = solve_scalar(p, p.t0 + horizon, cfg);
        return Z.blowup().has_value();
      },
      search);
}

std::vector<double> ray_angles(std::pair<std::size_t, std::size_t> plane, double step) {
  if (plane.first == plane.second) return {0.0, std::numbers::pi};
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidParam, "theta step must be positive");
  std::vector<double> out;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0;; ++k) {
    const double theta = static_cast<double>(k) * step;
    if (theta >= two_pi - 1e-9 * step) break;
    out.push_back(theta);
  }
  return out;
}

RVector ray_direction(std::size_t n, std::pair<std::size_t, std::size_t> plane, double theta) {
  if (plane.first >= n || plane.second >= n) throw Error(ErrorKind::DimensionMismatch, "plane index out of range");
  RVector u = RVector::Zero(static_cast<Eigen::Index>(n));
  u(static_cast<Eigen::Index>(plane.first)) += std::cos(theta);
  if (plane.second != plane.first) u(static_cast<Eigen::Index>(plane.second)) += std::sin(theta);
  return u;
}

RegionEstimate estimate_region_projection(const VectorDelaySystem& sys, const RegionScanConfig& config) {
  sys.validate();
  const auto thetas = ray_angles(config.plane, config.theta_step);
  const auto decomp = eigendecompose(sys.A_star);
  const auto esys = to_eigenbasis(sys, decomp);
  const auto L = build_majorant(sys.nonlinearity, decomp, esys.slots());
  const double t_end = sys.t0 + config.horizon;
  StepConfig step = config.step;
  step.blowup_threshold = config.threshold;
  const auto upper = build_upper(esys, L).tabulated(t_end, step);

  RegionEstimate region;
  region.plane = config.plane;
  region.threshold = config.threshold;
  region.horizon = config.horizon;
  region.tol = config.search.tol;
  const auto scalar = estimate_scalar_radius([&](double c) { return upper.with_constant_history(c); },
                                             config.horizon, config.threshold, config.search, step);
  region.scalar_radius = scalar.radius;
  region.scalar_all_good = scalar.all_good;
  const auto inner = scalar_region_boundary(scalar.radius, decomp, config.plane, thetas);

  region.rays.resize(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t k) {
    RayEstimate& ray = region.rays[k];
    ray.theta = thetas[k];
    ray.inner_r = std::hypot(inner[k].first, inner[k].second);
    ray.inner_all_good = scalar.all_good;
    const RVector u = ray_direction(sys.n, config.plane, ray.theta);
    VectorDelaySystem local = sys;
    local.history.kind = HistoryKind::Constant;
    auto escapes = [&](double r) {
      for (std::size_t i = 0; i < sys.n; ++i) local.history.x0[i] = r * u(static_cast<Eigen::Index>(i));
      const Simulation sim = simulate(local, t_end, step);
      return sim.trajectory.blowup().has_value();
    };
    try {
      const auto est = bisect_radius(escapes, config.search);
      ray.outer_r = est.radius;
      ray.outer_all_good = est.all_good;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::AllBad) throw;
      ray.outer_r = 0.0;
      ray.outer_all_bad = true;
    }
    if (ray.outer_all_good) {
      ray.contained = true;
    } else if (ray.inner_all_good) {
      ray.contained = false;
    } else {
      ray.contained = ray.inner_r <= ray.outer_r + config.search.tol;
    }
  });
  region.containment_holds =
      std::all_of(region.rays.begin(), region.rays.end(), [](const RayEstimate& r) { return r.contained; });
  return region;
}

std::vector<std::pair<double, double>> scalar_region_boundary(double r_min, const EigenDecomposition& decomp,
                                                              std::pair<std::size_t, std::size_t> plane,
                                                              std::span<const double> thetas) {
  if (!(r_min >= 0.0)) throw Error(ErrorKind::NegativeArgument, "scalar radius must be >= 0");
  std::vector<std::pair<double, double>> out;
  out.reserve(thetas.size());
  for (double theta : thetas) {
    const RVector u = ray_direction(decomp.n, plane, theta);
    const double s = (decomp.V_inv * u.cast<std::complex<double>>()).norm();
    if (!(s > 0.0)) throw Error(ErrorKind::DegenerateDirection, "|V^-1 u| vanishes along a ray");
    const double rho = r_min / s;
    out.emplace_back(rho * std::cos(theta), rho * std::sin(theta));
  }
  return out;
}

void write_region_csv(const RegionEstimate& region, std::ostream& os) {
  os << "theta,outer_r,inner_r,flags\n";
  char line[128];
  for (const auto& ray : region.rays) {
    std::string flags;
    auto add = [&](const char* f) {
      if (!flags.empty()) flags += '|';
      flags += f;
    };
    if (ray.outer_all_good) add("outer-all-good");
    if (ray.outer_all_bad) add("outer-all-bad");
    if (ray.inner_all_good) add("inner-all-good");
    if (!ray.contained) add("not-contained");
    if (flags.empty()) flags = "ok";
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,", ray.theta, ray.outer_r, ray.inner_r);
    os << line << flags << '\n';
  }
}

}  // namespace bilat
