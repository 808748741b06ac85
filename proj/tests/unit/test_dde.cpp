#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bilat/dde.hpp"
#include "bilat/error.hpp"
#include "oracles.hpp"

using namespace bilat;

namespace {

DdeRhs linear_decay() {
  return [](double, std::span<const double> x, std::span<const double>, std::span<double> out) { out[0] = -x[0]; };
}

DdeRhs delayed_decay() {
  return [](double, std::span<const double>, std::span<const double> xd, std::span<double> out) { out[0] = -xd[0]; };
}

StepConfig step(double dt) {
  StepConfig c;
  c.dt = dt;
  return c;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no bilat::Error thrown";
  return ErrorKind::InvalidParam;
}

// x' = -x(t - 1) + g(t) with exact solution e^{-t}.
double manufactured_error(double dt) {
  DdeRhs rhs = [](double t, std::span<const double>, std::span<const double> xd, std::span<double> out) {
    out[0] = -xd[0] - std::exp(-t) + std::exp(-(t - 1.0));
  };
  const auto traj = integrate(rhs, DelaySet::constant({1.0}), HistoryFunction::scalar([](double t) { return std::exp(-t); }),
                              0.0, 5.0, step(dt));
  double err = 0.0;
  for (std::size_t k = 0; k < traj.node_count(); ++k) {
    err = std::max(err, std::abs(traj.node(k)[0] - std::exp(-traj.node_time(k))));
  }
  return err;
}

}  // namespace

TEST(Integrate, ScalarLinearOde) {
  const auto traj = integrate(linear_decay(), DelaySet::none(), HistoryFunction::constant({1.0}), 0.0, 1.0, step(1e-3));
  EXPECT_NEAR(traj.eval(1.0)[0], std::exp(-1.0), 1e-8);
  EXPECT_EQ(traj.node_count(), 1001u);
  EXPECT_FALSE(traj.blowup());
}

TEST(Integrate, MethodOfStepsClosedForm) {
  const auto traj =
      integrate(delayed_decay(), DelaySet::constant({1.0}), HistoryFunction::constant({1.0}), 0.0, 4.0, step(1e-2));
  EXPECT_NEAR(traj.eval(1.0)[0], 0.0, 1e-6);
  EXPECT_NEAR(traj.eval(2.0)[0], -0.5, 1e-6);
  for (double t = 0.0; t <= 4.0; t += 0.173) {
    EXPECT_NEAR(traj.eval(t)[0], oracle::delayed_decay_exact(t), 1e-6) << "t = " << t;
  }
}

TEST(Integrate, BlowupOfQuadraticOde) {
  DdeRhs rhs = [](double, std::span<const double> x, std::span<const double>, std::span<double> out) {
    out[0] = x[0] * x[0];
  };
  const auto traj = integrate(rhs, DelaySet::none(), HistoryFunction::constant({1.0}), 0.0, 2.0, step(1e-4));
  ASSERT_TRUE(traj.blowup());
  EXPECT_NEAR(traj.blowup()->time, 1.0 - 1e-5, 5e-4);
  EXPECT_GT(traj.node_norm(traj.node_count() - 1), 1e5);
  EXPECT_LE(traj.t_end(), traj.blowup()->time + 1e-12);
}

TEST(Integrate, OrderOfAccuracy) {
  const double coarse = manufactured_error(1e-2);
  const double fine = manufactured_error(5e-3);
  EXPECT_GE(coarse / fine, 12.0) << coarse << " vs " << fine;
}

TEST(Integrate, Deterministic) {
  auto run = [] {
    return integrate(delayed_decay(), DelaySet::constant({1.0}),
                     HistoryFunction::scalar([](double t) { return std::cos(t); }), 0.0, 7.0, step(0.01));
  };
  EXPECT_EQ(run().node_data(), run().node_data());
}

TEST(Integrate, ClampKeepsNodesNonNegative) {
  DdeRhs rhs = [](double, std::span<const double>, std::span<const double>, std::span<double> out) { out[0] = -1.0; };
  StepConfig c = step(0.01);
  c.clamp_nonnegative = true;
  const auto traj = integrate(rhs, DelaySet::none(), HistoryFunction::constant({0.5}), 0.0, 3.0, c);
  for (std::size_t k = 0; k < traj.node_count(); ++k) EXPECT_GE(traj.node(k)[0], 0.0);
  for (double t = 0.0; t <= 3.0; t += 0.0137) EXPECT_GE(traj.eval(t)[0], 0.0);
  EXPECT_EQ(traj.eval(3.0)[0], 0.0);
}

TEST(Integrate, Errors) {
  EXPECT_EQ(kind_of([] {
              (void)integrate(linear_decay(), DelaySet::none(), HistoryFunction::constant({1.0}), 1.0, 1.0, {});
            }),
            ErrorKind::EmptyInterval);
  EXPECT_EQ(kind_of([] {
              (void)integrate(delayed_decay(), DelaySet::constant({1.0}), HistoryFunction::constant({1.0}), 0.0, 2.0,
                              step(0.6));
            }),
            ErrorKind::StepTooLarge);
  DdeRhs nan_rhs = [](double t, std::span<const double>, std::span<const double>, std::span<double> out) {
    out[0] = t > 0.5 ? std::nan("") : 0.0;
  };
  EXPECT_EQ(kind_of([&] {
              (void)integrate(nan_rhs, DelaySet::none(), HistoryFunction::constant({1.0}), 0.0, 1.0, step(0.01));
            }),
            ErrorKind::NonFinite);
}

TEST(Integrate, DefaultStep) {
  EXPECT_DOUBLE_EQ(default_step(DelaySet::none()), 1e-2);
  EXPECT_DOUBLE_EQ(default_step(DelaySet::constant({0.01})), 5e-3);
  EXPECT_DOUBLE_EQ(default_step(DelaySet::constant({10.0, 12.0})), 1e-2);
}

TEST(Integrate, TimeVaryingDelay) {
  // x' = -x(t - h(t)), h(t) = 1 + 0.5 sin t: converges under step refinement.
  DelaySet d;
  d.delays = {[](double t) { return 1.0 + 0.5 * std::sin(t); }};
  d.h_lo = 0.5;
  d.h_hi = 1.5;
  const auto a = integrate(delayed_decay(), d, HistoryFunction::constant({1.0}), 0.0, 6.0, step(0.02));
  const auto b = integrate(delayed_decay(), d, HistoryFunction::constant({1.0}), 0.0, 6.0, step(0.01));
  EXPECT_NEAR(a.eval(6.0)[0], b.eval(6.0)[0], 1e-5);
}

TEST(Eval, NodesHistoryAndInterpolation) {
  DdeRhs rhs = [](double, std::span<const double>, std::span<const double>, std::span<double> out) { out[0] = 2.0; };
  const auto traj = integrate(rhs, DelaySet::constant({1.0}), HistoryFunction::scalar([](double t) { return 2.0 * t; }),
                              0.0, 3.0, step(0.1));
  for (std::size_t k = 0; k < traj.node_count(); ++k) EXPECT_EQ(traj.eval(traj.node_time(k))[0], traj.node(k)[0]);
  for (double t = -1.0; t <= 0.0; t += 0.05) EXPECT_EQ(traj.eval(t)[0], 2.0 * t);
  EXPECT_NEAR(traj.eval(1.25)[0], 2.5, 1e-12);
  EXPECT_NEAR(traj.eval(2.05)[0], 4.1, 1e-12);
  EXPECT_THROW((void)traj.eval(3.5), Error);
  EXPECT_THROW((void)traj.eval(-1.5), Error);
}

TEST(Eval, ContinuousAtNodes) {
  const auto traj =
      integrate(delayed_decay(), DelaySet::constant({1.0}), HistoryFunction::constant({1.0}), 0.0, 3.0, step(0.01));
  for (std::size_t k = 1; k + 1 < traj.node_count(); k += 37) {
    const double t = traj.node_time(k);
    const double left = traj.eval(std::nextafter(t, -1e9))[0];
    const double right = traj.eval(std::nextafter(t, 1e9))[0];
    EXPECT_NEAR(left, right, 1e-12);
  }
}

TEST(Eval, HistoryConsistency) {
  auto phi = [](double t) { return std::cos(3.0 * t) + t * t; };
  const auto traj =
      integrate(delayed_decay(), DelaySet::constant({2.0}), HistoryFunction::scalar(phi), 0.0, 1.0, step(0.01));
  for (double t = -2.0; t <= 0.0; t += 0.01) EXPECT_EQ(traj.eval(t)[0], phi(t));
}

TEST(ValidateDelays, Examples) {
  const auto r = validate_delays(DelaySet::constant({2.0}), 0.0, 10.0);
  EXPECT_EQ(r.h_lo_observed, 2.0);
  EXPECT_EQ(r.h_hi_observed, 2.0);

  DelaySet s;
  s.delays = {[](double t) { return 1.0 + 0.5 * std::sin(t); }};
  s.h_lo = 0.5;
  s.h_hi = 1.5;
  EXPECT_NO_THROW((void)validate_delays(s, 0.0, 20.0));

  DelaySet e;
  e.delays = {[](double t) { return std::exp(-t); }};
  e.h_lo = 0.1;
  e.h_hi = 1.0;
  EXPECT_EQ(kind_of([&] { (void)validate_delays(e, 0.0, 10.0); }), ErrorKind::DelayBoundViolation);
}

TEST(HistoryFunction, SupNorm) {
  auto h = HistoryFunction::scalar([](double t) { return std::cos(t); });
  EXPECT_NEAR(h.sup_norm(0.0, 1.0), 1.0, 1e-12);
  auto c = HistoryFunction::constant({3.0, 4.0});
  EXPECT_NEAR(c.sup_norm(0.0, 2.0), 5.0, 1e-12);
}

TEST(TrajectoryCsv, HeaderAndPrecision) {
  DdeRhs rhs = [](double, std::span<const double> x, std::span<const double>, std::span<double> out) {
    out[0] = -x[1];
    out[1] = x[0];
  };
  const auto traj = integrate(rhs, DelaySet::none(), HistoryFunction::constant({1.0, 0.0}), 0.0, 0.1, step(0.05));
  std::ostringstream os;
  write_trajectory_csv(traj, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x1,x2,norm");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
  }
  EXPECT_EQ(rows, 3);
}
