#include <algorithm>
#include <cmath>

#include "bilat/error.hpp"
#include "bilat/system.hpp"

namespace bilat {

VectorDelaySystem make_oscillators(OscillatorKind kind, const OscillatorParams& p) {
  if (!(p.h1 > 0.0) || !(p.h2 > 0.0) || !std::isfinite(p.h1) || !std::isfinite(p.h2)) {
    throw Error(ErrorKind::InvalidParam, "oscillator delays h1, h2 must be positive and finite");
  }
  if (p.F01 < 0.0 || p.F02 < 0.0) throw Error(ErrorKind::InvalidParam, "forcing amplitudes must be >= 0");

  VectorDelaySystem sys;
  sys.n = 4;
  sys.A_star = RMatrix::Zero(4, 4);
  sys.A_star(0, 1) = 1.0;
  sys.A_star(1, 0) = -(p.omega1_sq + p.d);
  sys.A_star(1, 1) = -p.chi1;
  sys.A_star(1, 2) = p.d;
  sys.A_star(2, 3) = 1.0;
  sys.A_star(3, 0) = p.d;
  sys.A_star(3, 2) = -(p.omega2_sq + p.d);
  sys.A_star(3, 3) = -p.chi2;

  // -g21(t) and -g43(t)
  const Sinusoids g21{0.0, {{-p.a1, p.r1, 0.0}, {-p.a2, p.r2, 0.0}}};
  const Sinusoids g43{0.0, {{-p.b1, p.s1, 0.0}, {-p.b2, p.s2, 0.0}}};
  sys.G_star.n = 4;
  if (!g21.is_zero()) sys.G_star.entries.push_back({1, 0, g21});
  if (!g43.is_zero()) sys.G_star.entries.push_back({3, 2, g43});

  // G*(t) x(t - h1), slot 1
  if (!g21.is_zero()) sys.nonlinearity.terms.push_back({1, g21, {{1, 0, 1}}});
  if (!g43.is_zero()) sys.nonlinearity.terms.push_back({3, g43, {{1, 2, 1}}});
  // -mu_i x_k^3(t - h2), slot 2
  const std::size_t c1 = kind == OscillatorKind::VanDerPol ? 1 : 0;
  const std::size_t c2 = kind == OscillatorKind::VanDerPol ? 3 : 2;
  if (p.mu1 != 0.0) sys.nonlinearity.terms.push_back({1, Sinusoids::constant(-p.mu1), {{2, c1, 3}}});
  if (p.mu2 != 0.0) sys.nonlinearity.terms.push_back({3, Sinusoids::constant(-p.mu2), {{2, c2, 3}}});

  sys.delays.h_lo = std::min(p.h1, p.h2);
  sys.delays.h_hi = std::max(p.h1, p.h2);
  sys.delays.functions = {Sinusoids::constant(p.h1), Sinusoids::constant(p.h2)};

  sys.forcing.F0 = std::hypot(p.F01, p.F02);
  if (sys.forcing.F0 > 0.0) {
    sys.forcing.direction.assign(4, Sinusoids{});
    sys.forcing.direction[1] = Sinusoids{0.0, {{p.F01 / sys.forcing.F0, p.q1, 0.0}}};
    sys.forcing.direction[3] = Sinusoids{0.0, {{p.F02 / sys.forcing.F0, p.q2, 0.0}}};
  }

  sys.history.kind = HistoryKind::Cosine;
  sys.history.x0 = {p.x01, 0.0, 0.0, 0.0};
  sys.validate();
  return sys;
}

VectorDelaySystem make_vdp(const OscillatorParams& p) {
  return make_oscillators(OscillatorKind::VanDerPol, p);
}

VectorDelaySystem make_duf(const OscillatorParams& p) {
  return make_oscillators(OscillatorKind::Duffing, p);
}

}  // namespace bilat
