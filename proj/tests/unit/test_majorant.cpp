#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bilat/error.hpp"
#include "bilat/majorant.hpp"
#include "bilat/system.hpp"
#include "oracles.hpp"

using namespace bilat;

namespace {

EigenDecomposition identity_basis(std::size_t n) {
  RMatrix A = RMatrix::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) A(i, i) = -1.0 - static_cast<double>(i);
  return eigendecompose(A);
}

TimeFunction constant(double c) {
  return [c](double) { return c; };
}

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

double oracle_norm(const CMatrix& M) {
  oracle::ComplexMatrix m(static_cast<std::size_t>(M.rows()), std::vector<std::complex<double>>(static_cast<std::size_t>(M.cols())));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = M(i, j);
  return oracle::spectral_norm(m);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::InvalidParam;
}

}  // namespace

TEST(Majorant, EvalExamples) {
  const Majorant L(2, {{constant(2.0), {{1, 3}}}});
  const std::vector<double> xi{7.0, 0.5};
  EXPECT_DOUBLE_EQ(L.eval(0.0, xi), 0.25);
  EXPECT_DOUBLE_EQ(eval_majorant(L, 0.0, xi), 0.25);
  const std::vector<double> zero{0.0, 0.0};
  EXPECT_EQ(L.eval(0.0, zero), 0.0);
  const RobustMajorant R{L, 0.3};
  EXPECT_DOUBLE_EQ(R.eval(0.0, zero), 0.3);
  EXPECT_DOUBLE_EQ(L.scaled(4.0).eval(0.0, xi), 1.0);
}

TEST(Majorant, EvalErrors) {
  const Majorant L(2, {{constant(1.0), {{0, 1}}}});
  const std::vector<double> neg{-0.1, 0.0}, nan{std::nan(""), 0.0}, short_xi{1.0};
  EXPECT_EQ(kind_of([&] { (void)L.eval(0.0, neg); }), ErrorKind::NegativeArgument);
  EXPECT_EQ(kind_of([&] { (void)L.eval(0.0, nan); }), ErrorKind::NegativeArgument);
  EXPECT_EQ(kind_of([&] { (void)L.eval(0.0, short_xi); }), ErrorKind::DimensionMismatch);
  EXPECT_EQ(kind_of([] { (void)Majorant(1, {{constant(1.0), {{1, 1}}}}); }), ErrorKind::InvalidParam);
}

TEST(Majorant, MonotoneInEveryArgument) {
  const Majorant L(3, {{constant(1.5), {{0, 1}, {1, 3}}}, {constant(0.2), {{2, 2}}}, {constant(0.7), {{1, 1}}}});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> a{u(rng), u(rng), u(rng)}, b = a;
    for (auto& v : b) v += u(rng);
    EXPECT_LE(L.eval(0.0, a), L.eval(0.0, b));
  }
}

TEST(BuildMajorant, IdentityBasisKeepsCoefficients) {
  // f = (a1 y0 y1^3, a2 y2^2) in slots (undelayed, h1, h2).
  const double a1 = -1.7, a2 = 0.6;
  PolynomialNonlinearity nl;
  nl.terms.push_back({0, Sinusoids::constant(a1), {{0, 0, 1}, {1, 0, 3}}});
  nl.terms.push_back({1, Sinusoids::constant(a2), {{2, 1, 2}}});
  const auto L = build_majorant(nl, identity_basis(2), 3);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const std::vector<double> xi{u(rng), u(rng), u(rng)};
    const double expected = std::abs(a1) * xi[0] * std::pow(xi[1], 3) + std::abs(a2) * xi[2] * xi[2];
    EXPECT_NEAR(L.eval(0.0, xi), expected, 1e-12 * (1.0 + expected));
  }
}

TEST(BuildMajorant, ZeroNonlinearity) {
  const auto L = build_majorant({}, identity_basis(2), 1);
  EXPECT_TRUE(L.empty());
  const std::vector<double> xi{5.0};
  EXPECT_EQ(L.eval(1.0, xi), 0.0);
}

TEST(BuildMajorant, RejectsConstantTerm) {
  PolynomialNonlinearity nl;
  nl.terms.push_back({0, Sinusoids::constant(1.0), {}});
  EXPECT_EQ(kind_of([&] { (void)build_majorant(nl, identity_basis(1), 1); }), ErrorKind::UnsupportedForm);
}

TEST(BuildMajorant, CubicCoefficientFromRowSums) {
  for (auto kind : {OscillatorKind::VanDerPol, OscillatorKind::Duffing}) {
    const auto p = fig1a();
    const auto sys = make_oscillators(kind, p);
    const auto d = eigendecompose(sys.A_star);
    const auto L = build_majorant(sys.nonlinearity, d, 3);
    const std::size_t c1 = kind == OscillatorKind::VanDerPol ? 1 : 0;
    const std::size_t c2 = kind == OscillatorKind::VanDerPol ? 3 : 2;
    auto row_sum = [&](std::size_t r) {
      double s = 0.0;
      for (int c = 0; c < 4; ++c) s += std::abs(d.V(static_cast<Eigen::Index>(r), c));
      return s;
    };
    const double kappa1 = std::pow(row_sum(c1), 3), kappa2 = std::pow(row_sum(c2), 3);
    const double coeff = oracle_norm(d.V_inv) * (std::abs(p.mu1) * kappa1 + std::abs(p.mu2) * kappa2);
    const std::vector<double> xi{0.0, 0.0, 1.0};
    EXPECT_NEAR(L.eval(0.0, xi), coeff, 1e-6 * coeff);
    const std::vector<double> xi2{0.4, 0.9, 0.5};
    EXPECT_NEAR(L.eval(0.0, xi2), coeff * 0.125, 1e-6 * coeff);
  }
}

TEST(BuildMajorant, LinearTermsUseTransformedMatrix) {
  // Single delayed linear term: L = |V^-1 M V| xi_1 with M = e_1 e_0^T.
  RMatrix A(2, 2);
  A << 0.0, 1.0, -2.0, -0.3;
  const auto d = eigendecompose(A);
  PolynomialNonlinearity nl;
  nl.terms.push_back({1, Sinusoids::constant(-0.8), {{1, 0, 1}}});
  const auto L = build_majorant(nl, d, 2);
  CMatrix M = CMatrix::Zero(2, 2);
  M(1, 0) = -0.8;
  const double expected = oracle_norm(d.V_inv * M * d.V);
  const std::vector<double> xi{0.0, 1.0};
  EXPECT_NEAR(L.eval(0.0, xi), expected, 1e-9);
  // The crude row-sum bound would be larger.
  EXPECT_LE(expected, d.norm_V_inv * 0.8 * (std::abs(d.V(0, 0)) + std::abs(d.V(0, 1))) + 1e-12);
}

TEST(Domination, HoldsForOscillators) {
  for (const auto& p : {fig1a(), fig1b()}) {
    for (auto kind : {OscillatorKind::VanDerPol, OscillatorKind::Duffing}) {
      const auto sys = make_oscillators(kind, p);
      const auto esys = to_eigenbasis(sys, eigendecompose(sys.A_star));
      const auto L = build_majorant(sys.nonlinearity, esys.decomposition(), esys.slots());
      for (double rho : {1.0, 5.0, 20.0}) {
        DominationSampling s;
        s.radius = rho;
        s.samples = 2000;
        const auto r = verify_domination(L, esys, s);
        EXPECT_TRUE(r.holds) << "rho " << rho << " margin " << r.worst_margin;
      }
    }
  }
}

TEST(Domination, ShrunkenMajorantFails) {
  const auto sys = make_vdp(fig1a());
  const auto esys = to_eigenbasis(sys, eigendecompose(sys.A_star));
  const auto L = build_majorant(sys.nonlinearity, esys.decomposition(), esys.slots());
  DominationSampling s;
  s.samples = 10000;
  s.radius = 5.0;
  // The row-sum construction overestimates the cubic term about 45-fold here.
  const auto r = verify_domination(L.scaled(0.01), esys, s);
  EXPECT_FALSE(r.holds);
  EXPECT_LT(r.worst_margin, 0.0);
}

TEST(Domination, GenericOverload) {
  // f(y) = y^2 componentwise in one dimension, majorant xi^2 is exact.
  const Majorant L(1, {{constant(1.0), {{0, 2}}}});
  NonlinearityFn f = [](double, std::span<const CVector> y) {
    CVector out(1);
    out(0) = y[0](0) * y[0](0);
    return out;
  };
  DominationSampling s;
  s.radius = 3.0;
  EXPECT_TRUE(verify_domination(L, f, 1, s).holds);
  EXPECT_FALSE(verify_domination(L.scaled(0.5), f, 1, s).holds);
  NonlinearityFn zero = [](double, std::span<const CVector>) { return CVector::Zero(1).eval(); };
  const auto r = verify_domination(L, zero, 1, s);
  EXPECT_TRUE(r.holds);
  EXPECT_GE(r.worst_margin, 0.0);
}

TEST(Linearize, Examples) {
  const Majorant L(3, {{constant(2.0), {{1, 3}}}, {constant(1.0), {{0, 1}, {2, 3}}}});
  const auto lin = linearize_majorant(L, 0.5);
  const std::vector<double> xi{1.0, 1.0, 1.0};
  // 2 * 0.25 * xi_1 + 1 * 0.125 * xi_0
  EXPECT_NEAR(lin.eval(0.0, xi), 0.5 + 0.125, 1e-15);
  for (const auto& t : lin.terms()) {
    ASSERT_EQ(t.factors.size(), 1u);
    EXPECT_EQ(t.factors[0].power, 1);
  }
  // Dominates the original inside the box.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int k = 0; k < 1000; ++k) {
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    EXPECT_GE(lin.eval(0.0, x), L.eval(0.0, x) - 1e-15);
  }
  EXPECT_EQ(kind_of([&] { (void)linearize_majorant(L, 0.0); }), ErrorKind::InvalidParam);
}

TEST(Autonomize, SupremaOfCoefficients) {
  const Majorant L(1, {{[](double t) { return 1.0 + std::sin(t); }, {{0, 2}}}});
  const auto a = autonomize(L, constant(3.0), [](double t) { return std::abs(std::cos(t)); }, 0.0,
                            2.0 * std::numbers::pi);
  EXPECT_NEAR(a.g_s, 3.0, 1e-12);
  EXPECT_NEAR(a.F_s, 1.0, 1e-6);
  const std::vector<double> xi{1.0};
  EXPECT_NEAR(a.L_s.eval(0.0, xi), 2.0, 1e-6);
  EXPECT_NEAR(a.L_s.eval(17.0, xi), 2.0, 1e-6);
  EXPECT_EQ(kind_of([&] { (void)autonomize(L, {}, {}, 1.0, 1.0); }), ErrorKind::EmptyInterval);
  const Majorant bad(1, {{[](double) { return std::nan(""); }, {{0, 1}}}});
  EXPECT_EQ(kind_of([&] { (void)autonomize(bad, {}, {}, 0.0, 1.0); }), ErrorKind::NonFinite);
}

TEST(Majorant, TabulatedMatchesDirect) {
  const Majorant L(2, {{[](double t) { return 2.0 + std::cos(t); }, {{1, 2}}}});
  const auto T = L.tabulated(0.0, 10.0, 0.005);
  const std::vector<double> xi{0.0, 1.5};
  for (double t : {0.0, 0.005, 3.3, 3.3001, 9.995}) EXPECT_DOUBLE_EQ(T.eval(t, xi), L.eval(t, xi));
}
