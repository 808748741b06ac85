#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bilat/error.hpp"
#include "bilat/system.hpp"
#include "oracles.hpp"

using namespace bilat;

namespace {

OscillatorParams fig1a() {
  OscillatorParams p;
  p.mu1 = p.mu2 = -3.0;
  p.chi1 = p.chi2 = 0.4;
  p.h1 = 10.0;
  p.h2 = 12.0;
  return p;
}

OscillatorParams fig1b() {
  OscillatorParams p;
  p.mu1 = p.mu2 = -0.5;
  p.a1 = p.a2 = p.b1 = p.b2 = 0.1;
  p.chi1 = 0.2;
  p.chi2 = 0.4;
  p.h1 = 1.0;
  p.h2 = 2.0;
  return p;
}

VectorDelaySystem scalar_system(double a) {
  VectorDelaySystem s;
  s.n = 1;
  s.A_star = RMatrix::Constant(1, 1, a);
  s.G_star.n = 1;
  s.history.x0 = {1.0};
  return s;
}

CVector random_cvector(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = {scale * g(rng), scale * g(rng)};
  return v;
}

}  // namespace

TEST(EvalRhs, TrivialSolution) {
  const auto sys = make_vdp(fig1b());
  const std::vector<double> zero(4, 0.0), zd(8, 0.0);
  for (double t : {0.0, 1.3, 7.7}) {
    for (double v : eval_rhs(sys, t, zero, zd)) EXPECT_EQ(v, 0.0);
  }
}

TEST(EvalRhs, ScalarLinear) {
  const auto sys = scalar_system(-1.0);
  const std::vector<double> x{2.0};
  EXPECT_EQ(eval_rhs(sys, 0.0, x, {})[0], -2.0);
}

TEST(EvalRhs, OscillatorByHand) {
  // fig1b parameters (nonzero offsets), x = xd = (1, 0, 0, 0).
  const auto p = fig1b();
  const auto sys = make_vdp(p);
  const std::vector<double> x{1.0, 0.0, 0.0, 0.0};
  std::vector<double> xd(8, 0.0);
  xd[0] = 1.0;  // x(t - h1)
  xd[4] = 1.0;  // x(t - h2)
  for (double t : {0.0, 0.4, 2.9}) {
    const auto out = eval_rhs(sys, t, x, xd);
    const double g21 = p.a1 * std::sin(p.r1 * t) + p.a2 * std::sin(p.r2 * t);
    // -(w1^2 + d) x1 - g21 x1 - g21 x1(t - h1) - mu1 x2(t - h2)^3
    EXPECT_NEAR(out[1], -(1.0 + 4.0) - g21 - g21 - p.mu1 * 0.0, 1e-14);
    EXPECT_NEAR(out[0], 0.0, 1e-14);
    EXPECT_NEAR(out[2], 0.0, 1e-14);
    EXPECT_NEAR(out[3], 4.0, 1e-14);  // d x1
  }
}

TEST(EvalRhs, CubicTermsPerKind) {
  auto p = fig1a();
  const std::vector<double> x(4, 0.0);
  std::vector<double> xd(8, 0.0);
  xd[4 + 0] = 0.5;  // x1(t - h2)
  xd[4 + 1] = 2.0;  // x2(t - h2)
  xd[4 + 2] = 0.3;  // x3(t - h2)
  xd[4 + 3] = -1.0; // x4(t - h2)
  const auto vdp = eval_rhs(make_vdp(p), 0.0, x, xd);
  EXPECT_NEAR(vdp[1], 3.0 * 8.0, 1e-13);
  EXPECT_NEAR(vdp[3], 3.0 * -1.0, 1e-13);
  const auto duf = eval_rhs(make_duf(p), 0.0, x, xd);
  EXPECT_NEAR(duf[1], 3.0 * 0.125, 1e-13);
  EXPECT_NEAR(duf[3], 3.0 * 0.027, 1e-13);
}

TEST(EvalRhs, DimensionMismatch) {
  const auto sys = make_vdp(fig1a());
  const std::vector<double> x(3, 0.0), xd(8, 0.0);
  EXPECT_THROW((void)eval_rhs(sys, 0.0, x, xd), Error);
}

TEST(Presets, Figure1aStructure) {
  const auto sys = make_vdp(fig1a());
  EXPECT_EQ(sys.n, 4u);
  RMatrix A(4, 4);
  A << 0, 1, 0, 0, -5, -0.4, 4, 0, 0, 0, 0, 1, 4, 0, -8, -0.4;
  EXPECT_EQ((sys.A_star - A).norm(), 0.0);
  EXPECT_TRUE(sys.G_star.is_zero());
  EXPECT_FALSE(sys.forcing.active());
  EXPECT_EQ(sys.delay_count(), 2u);
  EXPECT_EQ(sys.delays.h_lo, 10.0);
  EXPECT_EQ(sys.delays.h_hi, 12.0);
  // Only the two cubic monomials remain when the offsets vanish.
  ASSERT_EQ(sys.nonlinearity.terms.size(), 2u);
  for (const auto& t : sys.nonlinearity.terms) {
    ASSERT_EQ(t.factors.size(), 1u);
    EXPECT_EQ(t.factors[0].slot, 2u);
    EXPECT_EQ(t.factors[0].power, 3);
  }
  EXPECT_EQ(sys.history.kind, HistoryKind::Cosine);
  EXPECT_EQ(sys.history.x0, (std::vector<double>{0.1, 0.0, 0.0, 0.0}));
}

TEST(Presets, ForcedFigure1c) {
  OscillatorParams p;
  p.mu1 = p.mu2 = -0.01;
  p.b1 = p.b2 = 0.1;
  p.chi1 = 0.2;
  p.chi2 = 0.4;
  p.h1 = 10;
  p.h2 = 12;
  p.F02 = 0.001;
  const auto sys = make_vdp(p);
  EXPECT_TRUE(sys.forcing.active());
  EXPECT_GT(sys.forcing.F0, 0.0);
  std::vector<double> f(4);
  for (double t : {0.1, 0.77, 3.0}) {
    sys.forcing.eval(t, f);
    EXPECT_NEAR(f[3], 0.001 * std::sin(10.0 * t), 1e-16);
    EXPECT_EQ(f[1], 0.0);
  }
  EXPECT_LE(sys.forcing.max_direction_norm(0.0, 100.0), 1.0 + 1e-12);
}

TEST(Presets, OffsetIsZeroMean) {
  const auto sys = make_vdp(fig1b());
  // Average over many periods of r1, r2 (resp. s1, s2).
  const double T = 2000.0;
  for (const auto& e : sys.G_star.entries) {
    const double mean = oracle::simpson([&](double t) { return e.value(t); }, 0.0, T, 400000) / T;
    EXPECT_LE(std::abs(mean), 1e-4);
  }
  // Exact whole periods give the tighter bound.
  for (const auto& e : sys.G_star.entries) {
    for (const auto& w : e.value.waves) {
      const double period = 2.0 * std::numbers::pi / w.frequency;
      const double mean = oracle::simpson([&](double t) { return w.amplitude * std::sin(w.frequency * t); }, 0.0,
                                          50 * period, 200000) / (50 * period);
      EXPECT_LE(std::abs(mean), 1e-6);
    }
  }
}

TEST(Presets, InvalidDelays) {
  auto p = fig1a();
  p.h1 = 0.0;
  try {
    (void)make_vdp(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParam);
  }
  p.h1 = -1.0;
  EXPECT_THROW((void)make_duf(p), Error);
}

TEST(Eigenbasis, IdentityBasisIsTransparent) {
  VectorDelaySystem s;
  s.n = 2;
  s.A_star = RMatrix::Zero(2, 2);
  s.A_star(0, 0) = -1.0;
  s.A_star(1, 1) = -2.0;
  s.G_star.n = 2;
  s.delays = {0.5, 0.5, {Sinusoids::constant(0.5)}};
  s.nonlinearity.terms.push_back({0, Sinusoids::constant(2.0), {{1, 1, 2}}});
  s.history.x0 = {1.0, 0.5};
  const auto esys = to_eigenbasis(s, eigendecompose(s.A_star));
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    std::vector<CVector> args{random_cvector(rng, 2, 1.0), random_cvector(rng, 2, 1.0)};
    const CVector f = esys.nonlinearity(0.3, args);
    EXPECT_NEAR(std::abs(f(0) - 2.0 * args[1](1) * args[1](1)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f(1)), 0.0, 1e-14);
  }
  EXPECT_NEAR(esys.history_norm(0.0), std::hypot(1.0, 0.5), 1e-14);
}

TEST(Eigenbasis, RoundTripInvariant) {
  const auto sys = make_vdp(fig1b());
  const auto d = eigendecompose(sys.A_star);
  const auto esys = to_eigenbasis(sys, d);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ut(0.0, 50.0);
  for (int k = 0; k < 100; ++k) {
    std::vector<CVector> y;
    for (int j = 0; j < 3; ++j) y.push_back(random_cvector(rng, 4, 0.7));
    const double t = ut(rng);
    const CVector f = esys.nonlinearity(t, y);
    // f* evaluated directly on x = V y with complex arithmetic.
    std::vector<CVector> x;
    for (const auto& v : y) x.push_back(d.V * v);
    CVector fstar = CVector::Zero(4);
    auto args = [&](std::size_t slot) { return x[slot].data(); };
    sys.nonlinearity.accumulate<std::complex<double>>(t, args, fstar.data());
    EXPECT_LE((d.V * f - fstar).norm(), 1e-9 * (1.0 + fstar.norm()));
  }
}

TEST(Eigenbasis, CubicStructureMatchesDirectSubstitution) {
  const auto p = fig1a();
  const auto sys = make_vdp(p);
  const auto d = eigendecompose(sys.A_star);
  const auto esys = to_eigenbasis(sys, d);
  std::mt19937_64 rng(13);
  for (int k = 0; k < 100; ++k) {
    std::vector<CVector> y{random_cvector(rng, 4, 1.0), random_cvector(rng, 4, 1.0), random_cvector(rng, 4, 1.0)};
    // V^-1 (0, -mu1 (sum v2k yk)^3, 0, -mu2 (sum v4k yk)^3)
    std::complex<double> Y2 = 0.0, Y4 = 0.0;
    for (int c = 0; c < 4; ++c) {
      Y2 += d.V(1, c) * y[2](c);
      Y4 += d.V(3, c) * y[2](c);
    }
    CVector Y = CVector::Zero(4);
    Y(1) = -p.mu1 * Y2 * Y2 * Y2;
    Y(3) = -p.mu2 * Y4 * Y4 * Y4;
    const CVector expected = d.V_inv * Y;
    EXPECT_LE((esys.nonlinearity(1.0, y) - expected).norm(), 1e-10 * (1.0 + expected.norm()));
  }
}

TEST(Eigenbasis, ForcingNormBound) {
  auto p = fig1b();
  p.F01 = 0.3;
  p.F02 = 0.2;
  const auto sys = make_vdp(p);
  const auto d = eigendecompose(sys.A_star);
  const auto esys = to_eigenbasis(sys, d);
  for (int k = 0; k < 200; ++k) {
    const double t = 0.1 * k;
    EXPECT_LE(esys.forcing_norm(t), d.norm_V_inv * sys.forcing.F0 + 1e-14);
  }
}

TEST(Eigenbasis, DimensionMismatch) {
  const auto sys = make_vdp(fig1a());
  RMatrix A(2, 2);
  A << -1, 0, 0, -2;
  try {
    (void)to_eigenbasis(sys, eigendecompose(A));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Simulate, ZeroHistoryStaysZero) {
  auto sys = make_vdp(fig1b());
  sys.history.x0 = {0.0, 0.0, 0.0, 0.0};
  StepConfig c;
  c.dt = 0.01;
  const auto sim = simulate(sys, 20.0, c);
  for (double v : sim.norms) EXPECT_LE(v, 1e-12);
}

TEST(Simulate, StableDiagonalDecaysMonotonically) {
  VectorDelaySystem s;
  s.n = 2;
  s.A_star = RMatrix::Zero(2, 2);
  s.A_star(0, 0) = -1.0;
  s.A_star(1, 1) = -0.5;
  s.G_star.n = 2;
  s.history.x0 = {1.0, -2.0};
  const auto sim = simulate(s, 10.0, {});
  for (std::size_t k = 1; k < sim.norms.size(); ++k) EXPECT_LT(sim.norms[k], sim.norms[k - 1]);
}

TEST(Simulate, Figure1aSmallHistoryStaysBounded) {
  auto p = fig1a();
  p.x01 = 0.1;
  const auto sim = simulate(make_vdp(p), 50.0, {});
  EXPECT_FALSE(sim.trajectory.blowup().has_value());
  for (double v : sim.norms) EXPECT_LT(v, 1.0);
}

TEST(Simulate, EigenbasisRoundTrip) {
  auto p = fig1a();
  p.x01 = 0.1;
  const auto sys = make_vdp(p);
  const auto d = eigendecompose(sys.A_star);
  const auto esys = to_eigenbasis(sys, d);
  StepConfig c;
  c.dt = 0.01;
  const auto xs = simulate(sys, 30.0, c);
  const auto ys = simulate_eigenbasis(esys, 30.0, c);
  ASSERT_EQ(xs.trajectory.node_count(), ys.node_count());
  for (std::size_t k = 0; k < ys.node_count(); k += 7) {
    CVector y(4);
    const auto node = ys.node(k);
    for (int i = 0; i < 4; ++i) y(i) = {node[2 * i], node[2 * i + 1]};
    const CVector x = d.V * y;
    const auto xk = xs.trajectory.node(k);
    double err = 0.0;
    for (int i = 0; i < 4; ++i) err += std::norm(x(i) - xk[i]);
    EXPECT_LE(std::sqrt(err), 1e-6 * (1.0 + xs.norms[k]));
  }
}

TEST(Validate, RejectsMalformedSystems) {
  auto s = scalar_system(-1.0);
  s.nonlinearity.terms.push_back({0, Sinusoids::constant(1.0), {}});
  EXPECT_THROW(s.validate(), Error);
  s = scalar_system(-1.0);
  s.nonlinearity.terms.push_back({0, Sinusoids::constant(1.0), {{1, 0, 2}}});  // slot 1 without delays
  EXPECT_THROW(s.validate(), Error);
  s = scalar_system(-1.0);
  s.history.x0 = {1.0, 2.0};
  EXPECT_THROW(s.validate(), Error);
}
