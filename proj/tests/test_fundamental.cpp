#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "sddelan/fundamental.hpp"
#include "sddelan/json_io.hpp"

namespace {

using sddelan::Grid;
using sddelan::SignedMeasure;
constexpr double kPi = std::numbers::pi;

SignedMeasure load(const char* name) {
  return sddelan::measure_from_json(sddelan::read_json_file(std::string(SDDELAN_CONFIG_DIR) + "/" + name));
}

TEST(Grid, RejectsIncommensurateSteps) {
  EXPECT_THROW(Grid::make(1.0, 0.3, 3.0), sddelan::InvalidArgument);
  EXPECT_THROW(Grid::make(1.0, 0.25, 3.1), sddelan::InvalidArgument);
  const Grid g = Grid::make(1.0, 0.01, 200.0);
  EXPECT_EQ(g.n_delay, 100);
  EXPECT_EQ(g.n_steps, 20000);
}

TEST(Fundamental, DiracAtZeroIsExponential) {
  const Grid g = Grid::make(1.0, 1e-3, 5.0);
  const auto k = sddelan::solve_fundamental(-0.7, SignedMeasure::dirac(0.0), g);
  for (int n = 0; n <= g.n_steps; n += 500) EXPECT_NEAR(k.x_at(n), std::exp(-0.7 * g.time(n)), 1e-7);
  EXPECT_EQ(k.x_at(-1), 0.0);
}

TEST(Fundamental, UnitDelayMethodOfSteps) {
  // x' = x(t - 1) with x = 0 before time 0: x = 1 on [0, 1] and x = t on [1, 2]
  const Grid g = Grid::make(1.0, 1e-3, 2.0);
  const auto k = sddelan::solve_fundamental(1.0, SignedMeasure::dirac(-1.0), g);
  for (int n = 0; n <= g.n_steps; n += 100) {
    const double t = g.time(n);
    const double expect = t <= 1.0 ? 1.0 : t;
    EXPECT_NEAR(k.x_at(n), expect, 1e-9) << t;
  }
  // y(t) = x(t - 1) jumps from 0 to 1 at t = 1
  EXPECT_EQ(k.y_left[1000], 0.0);
  EXPECT_EQ(k.y[1000], 1.0);
}

TEST(Fundamental, UniformDensityFirstStep) {
  // x' = \int_{-1}^0 x(t+u) du: on [0, 1], x' = \int_0^t x, so x = cosh(t)
  const SignedMeasure a(1.0, {}, {{-1.0, 0.0, {1.0}}}, std::nullopt);
  const Grid g = Grid::make(1.0, 1e-3, 1.0);
  const auto k = sddelan::solve_fundamental(1.0, a, g);
  for (int n = 0; n <= g.n_steps; n += 100) EXPECT_NEAR(k.x_at(n), std::cosh(g.time(n)), 1e-6);
}

TEST(Fundamental, ResidueExpansionMatchesSolver) {
  for (double theta : {1.0, -kPi / 2}) {
    const auto a = SignedMeasure::dirac(-1.0);
    auto roots = sddelan::roots_in_strip(theta, a, -3.0);
    for (auto& r : roots) r = sddelan::build_root_data(theta, a, r);
    const Grid g = Grid::make(1.0, 1e-3, 10.0);
    const auto k = sddelan::solve_fundamental(theta, a, g);
    double worst = 0.0;
    for (int n = 5000; n <= 10000; n += 50) {
      worst = std::max(worst, std::abs(k.x_at(n) - sddelan::residue_expansion_eval(roots, g.time(n))));
    }
    EXPECT_LE(worst, 1e-3) << theta;
  }
}

TEST(Fundamental, FisherOrnsteinUhlenbeck) {
  for (double theta : {-0.5, -1.0, -2.0}) {
    EXPECT_NEAR(sddelan::fisher_limit(theta, SignedMeasure::dirac(0.0)), 1.0 / (2.0 * std::abs(theta)), 1e-4);
  }
}

TEST(Fundamental, FisherRequiresNegativeVStar) {
  EXPECT_THROW(sddelan::fisher_limit(0.5, SignedMeasure::dirac(0.0)), sddelan::DomainError);
  EXPECT_THROW(sddelan::fisher_limit(0.0, SignedMeasure::dirac(0.0)), sddelan::DomainError);
}

TEST(Fundamental, FisherThetaZeroBalancedAtoms) {
  EXPECT_NEAR(sddelan::fisher_theta0(load("balanced_atoms.json")), 1.0, 1e-12);
  EXPECT_THROW(sddelan::fisher_theta0(SignedMeasure::dirac(0.0)), sddelan::DomainError);
}

TEST(Fundamental, FisherThetaZeroSinDensity) {
  EXPECT_NEAR(sddelan::fisher_theta0(load("sin_density.json")), 3.0 * kPi, 1e-6);
}

TEST(Fundamental, FisherThetaZeroLinearDensity) {
  // density 2u + 1 on [-1, 0]: a([-t, 0]) = t - t^2, \int_0^1 (t - t^2)^2 = 1/30
  const SignedMeasure a(1.0, {}, {{-1.0, 0.0, {1.0, 2.0}}}, std::nullopt);
  EXPECT_NEAR(sddelan::fisher_theta0(a), 1.0 / 30.0, 1e-14);
}

TEST(Fundamental, FisherSinDensityIsFinitePositive) {
  const double J = sddelan::fisher_limit(0.15, load("sin_density.json"));
  EXPECT_GT(J, 0.0);
  EXPECT_TRUE(std::isfinite(J));
  // at theta -> 0 the information tends to the theta = 0 value 3 pi
  EXPECT_LT(std::abs(J - 3.0 * kPi), 3.0 * kPi);
}

TEST(Fundamental, FisherThetaZeroBranchAgreesWithKernel) {
  // at theta = 0 the kernel is y(t) = a([-t, 0]); integrate it with the solver
  const auto a = load("balanced_atoms.json");
  const Grid g = Grid::make(1.0, 1e-3, 3.0);
  const auto k = sddelan::solve_fundamental(0.0, a, g);
  double J = 0.0;
  for (int n = 0; n < g.n_steps; ++n) J += 0.5 * g.dt * (k.y[n] * k.y[n] + k.y_left[n + 1] * k.y_left[n + 1]);
  EXPECT_NEAR(J, 1.0, 1e-12);
}

TEST(Fundamental, CauchySchwarzBound) {
  // \int_r^T I^2 <= r |a| \int X_0^2 \int_0^T y^2
  const auto a = SignedMeasure(1.0, {{-1.0, 1.0}, {-0.4, -0.5}}, {{-1.0, -0.2, {0.3, 1.0}}}, std::nullopt);
  const double theta = -0.8;
  const Grid g = Grid::make(1.0, 1e-2, 12.0);
  const auto k = sddelan::solve_fundamental(theta, a, g);
  const auto y = sddelan::y_kernel(a, k);
  std::vector<double> vals(101);
  for (int i = 0; i <= 100; ++i) vals[i] = std::sin(3.0 * i / 100.0) + 0.5;
  const auto x0 = sddelan::InitialPath::sampled(1.0, vals);
  double lhs = 0.0;
  for (int n = g.n_delay; n < g.n_steps; ++n) {
    const double I = sddelan::initial_path_functional(a, g, y, x0, n);
    lhs += I * I * g.dt;
  }
  double x2 = 0.0;
  for (int i = 0; i <= 100; ++i) x2 += (i == 0 || i == 100 ? 0.5 : 1.0) * 0.01 * x0(-i * 0.01) * x0(-i * 0.01);
  double y2 = 0.0;
  for (int n = 0; n < g.n_steps; ++n) y2 += y[n] * y[n] * g.dt;
  const double rhs = a.r() * sddelan::total_variation(a) * x2 * y2;
  EXPECT_GT(lhs, 0.0);
  EXPECT_LE(lhs, rhs);
}

TEST(Fundamental, YKernelMatchesSolverOutput) {
  const auto a = load("dirac_delay.json");
  const Grid g = Grid::make(1.0, 1e-2, 4.0);
  const auto k = sddelan::solve_fundamental(-2.0, a, g);
  const auto y = sddelan::y_kernel(a, k);
  for (int n = 0; n <= g.n_steps; ++n) EXPECT_EQ(y[n], k.y[n]);
}

}  // namespace
