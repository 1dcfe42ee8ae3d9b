#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "sddelan/experiment.hpp"
#include "sddelan/simulate.hpp"

namespace {

using sddelan::Grid;
using sddelan::InitialPath;
using sddelan::SignedMeasure;

TEST(Simulate, ThetaZeroIsShiftedBrownianMotion) {
  const Grid g = Grid::make(1.0, 0.01, 10.0);
  const auto p = sddelan::simulate(0.0, SignedMeasure::dirac(-0.5), InitialPath::constant(2.5), g, 99);
  for (int n = 0; n <= g.n_steps; ++n) EXPECT_NEAR(p.x_at(n), 2.5 + p.W[n], 1e-12);
  EXPECT_EQ(p.W[0], 0.0);
  EXPECT_EQ(p.x_at(-g.n_delay), 2.5);
}

TEST(Simulate, NoiselessEulerRecursion) {
  const Grid g = Grid::make(1.0, 0.01, 5.0);
  const auto p = sddelan::simulate(-0.5, SignedMeasure::dirac(0.0), InitialPath::constant(1.0), g, 0, false);
  for (int n = 0; n <= g.n_steps; n += 50) EXPECT_NEAR(p.x_at(n), std::pow(1.0 - 0.005, n), 1e-13);
  EXPECT_NEAR(p.x_at(g.n_steps), std::exp(-2.5), 1e-3);
}

TEST(Simulate, YIsRecomputableFromX) {
  const SignedMeasure a(1.0, {{-0.37, 0.8}}, {{-1.0, -0.2, {0.5, -1.0}}}, std::nullopt);
  const Grid g = Grid::make(1.0, 0.01, 20.0);
  const auto p = sddelan::simulate(-0.9, a, InitialPath::constant(0.3), g, 5);
  const auto y = sddelan::y_process(p.X, a, g);
  for (std::size_t n = 0; n < y.size(); ++n) EXPECT_NEAR(y[n], p.Y[n], 1e-12);
}

TEST(YProcess, DiracAtZeroCopiesX) {
  const Grid g = Grid::make(1.0, 0.1, 2.0);
  std::vector<double> X(31);
  for (std::size_t i = 0; i < X.size(); ++i) X[i] = std::sin(0.3 * i);
  const auto y = sddelan::y_process(X, SignedMeasure::dirac(0.0), g);
  for (int n = 0; n <= 20; ++n) EXPECT_EQ(y[n], X[n + 10]);
}

TEST(YProcess, BalancedAtomsCancelOnConstants) {
  const Grid g = Grid::make(1.0, 0.1, 2.0);
  const SignedMeasure a(1.0, {{0.0, 1.0}, {-1.0, -1.0}}, {}, std::nullopt);
  const auto y = sddelan::y_process(std::vector<double>(31, 1.0), a, g);
  for (double v : y) EXPECT_EQ(v, 0.0);
}

TEST(YProcess, UniformDensityOnLinearPath) {
  // \int_{-1}^0 (t + u) du = t - 1/2, trapezoid is exact on linear paths
  const Grid g = Grid::make(1.0, 0.05, 3.0);
  std::vector<double> X(81);
  for (int i = -20; i <= 60; ++i) X[i + 20] = i * 0.05;
  const SignedMeasure a(1.0, {}, {{-1.0, 0.0, {1.0}}}, std::nullopt);
  const auto y = sddelan::y_process(X, a, g);
  for (int n = 0; n <= 60; ++n) EXPECT_NEAR(y[n], n * 0.05 - 0.5, 1e-13);
}

TEST(Simulate, OrnsteinUhlenbeckStationaryVariance) {
  const Grid g = Grid::make(1.0, 0.01, 200.0);
  const auto a = SignedMeasure::dirac(0.0);
  // Euler recursion has stationary variance dt / (1 - (1 + theta dt)^2)
  const int n = 4000;
  std::vector<double> ends(n);
  sddelan::parallel_for(n, sddelan::resolve_threads(0), [&](int i) {
    ends[i] = sddelan::simulate(-0.5, a, InitialPath::zero(), g, sddelan::derive_seed(1, i)).X.back();
  });
  double var = 0.0;
  for (double x : ends) var += x * x;
  var /= n;
  const double expect = 0.01 / (1.0 - 0.995 * 0.995);
  EXPECT_NEAR(var, expect, 4.0 * expect * std::sqrt(2.0 / n));
}

TEST(Simulate, StrongOrderOneWithCommonIncrements) {
  // Reference path at dt/8; coarse increments are sums of fine ones.
  const SignedMeasure a(1.0, {{0.0, -0.6}, {-1.0, 0.4}}, {}, std::nullopt);
  const Grid fine = Grid::make(1.0, 0.01 / 8, 4.0);
  double err[2] = {0.0, 0.0};
  for (int rep = 0; rep < 200; ++rep) {
    const auto dw = sddelan::brownian_increments(sddelan::derive_seed(77, rep), fine);
    const auto ref = sddelan::simulate_with_increments(-1.0, a, InitialPath::constant(1.0), fine, dw);
    for (int level = 0; level < 2; ++level) {
      const int factor = level == 0 ? 8 : 4;
      const Grid g = Grid::make(1.0, fine.dt * factor, 4.0);
      std::vector<double> coarse(g.n_steps, 0.0);
      for (int n = 0; n < g.n_steps; ++n) {
        for (int k = 0; k < factor; ++k) coarse[n] += dw[n * factor + k];
      }
      const auto p = sddelan::simulate_with_increments(-1.0, a, InitialPath::constant(1.0), g, coarse);
      err[level] += std::abs(p.X.back() - ref.X.back());
    }
  }
  const double ratio = err[0] / err[1];
  EXPECT_GT(ratio, 1.6);
  EXPECT_LT(ratio, 2.6);
}

TEST(Simulate, SupercriticalNormalizedPathSettles) {
  // e^{-theta t} Y(t) converges a.s. for a = delta_0, theta = 0.5
  const Grid g = Grid::make(1.0, 0.01, 20.0);
  const auto a = SignedMeasure::dirac(0.0);
  std::vector<double> osc(300);
  std::vector<double> lim(300);
  for (int i = 0; i < 300; ++i) {
    const auto p = sddelan::simulate(0.5, a, InitialPath::zero(), g, sddelan::derive_seed(3, i));
    double lo = 1e300;
    double hi = -1e300;
    for (int n = 1500; n <= 2000; ++n) {
      const double v = std::exp(-0.5 * g.time(n)) * p.Y[n];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    osc[i] = hi - lo;
    lim[i] = std::abs(std::exp(-0.5 * g.T()) * p.Y.back());
  }
  EXPECT_LE(sddelan::median(osc), 0.05 * sddelan::median(lim));
}

TEST(Simulate, IncrementCountMustMatchGrid) {
  const Grid g = Grid::make(1.0, 0.1, 1.0);
  EXPECT_THROW(sddelan::simulate_with_increments(0.0, SignedMeasure::dirac(0.0), InitialPath::zero(), g, {0.0}),
               sddelan::InvalidArgument);
}

}  // namespace
