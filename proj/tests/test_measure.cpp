#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "sddelan/measure.hpp"

namespace {

using sddelan::cplx;
using sddelan::SignedMeasure;
constexpr double kPi = std::numbers::pi;

SignedMeasure sin_density(int n = 4097) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = std::sin(-2.0 * kPi + k * 2.0 * kPi / (n - 1));
  return SignedMeasure::sampled_density(2.0 * kPi, v);
}

SignedMeasure uniform_density() { return SignedMeasure(1.0, {}, {{-1.0, 0.0, {1.0}}}, std::nullopt); }

// Independent reference: composite Simpson with many panels.
cplx reference_moment(double lo, double hi, int j, cplx lambda, double (*f)(double)) {
  const int n = 200000;
  const double h = (hi - lo) / n;
  cplx acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double u = lo + k * h;
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * std::pow(u, j) * std::exp(lambda * u) * f(u);
  }
  return acc * h / 3.0;
}

TEST(Measure, TotalVariationOfAtoms) {
  const SignedMeasure a(1.0, {{0.0, 1.0}, {-1.0, -1.0}}, {}, std::nullopt);
  EXPECT_DOUBLE_EQ(sddelan::total_variation(a), 2.0);
}

TEST(Measure, TotalVariationOfSinDensity) {
  EXPECT_NEAR(sddelan::total_variation(sin_density()), 4.0, 1e-9);
}

TEST(Measure, TotalVariationOfSignChangingPolynomial) {
  // density u + 1/2 on [-1, 0]: |.| integrates to 1/4
  const SignedMeasure a(1.0, {}, {{-1.0, 0.0, {0.5, 1.0}}}, std::nullopt);
  EXPECT_NEAR(sddelan::total_variation(a), 0.25, 1e-14);
}

TEST(Measure, TailMass) {
  const SignedMeasure a(1.0, {{0.0, 1.0}, {-1.0, -1.0}}, {}, std::nullopt);
  EXPECT_DOUBLE_EQ(sddelan::tail_mass(a, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(sddelan::tail_mass(a, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(sddelan::tail_mass(a, 1.0), 0.0);
  EXPECT_NEAR(sddelan::tail_mass(uniform_density(), 0.25), 0.25, 1e-15);
  EXPECT_NEAR(sddelan::tail_mass(sin_density(), kPi / 2), std::cos(kPi / 2) - 1.0, 1e-12);
  EXPECT_THROW(sddelan::tail_mass(a, 1.5), sddelan::DomainError);
}

TEST(Measure, DiracMoments) {
  const auto a = SignedMeasure::dirac(-1.0);
  const cplx lambda{0.3, -2.0};
  const auto m = sddelan::exp_moments(a, lambda, 5);
  for (int j = 0; j <= 5; ++j) {
    const cplx expect = std::pow(-1.0, j) * std::exp(-lambda);
    EXPECT_NEAR(std::abs(m[j] - expect), 0.0, 1e-15);
  }
}

TEST(Measure, SinDensityFirstMomentAtZero) {
  EXPECT_NEAR(sddelan::exp_moment(sin_density(), 0.0, 1).real(), -2.0 * kPi, 1e-9);
}

TEST(Measure, SinDensityTransformClosedForm) {
  // \int_{-2pi}^0 sin(u) e^{lambda u} du = (e^{-2 pi lambda} - 1) / (lambda^2 + 1)
  const auto a = sin_density();
  for (cplx lambda : {cplx{0.0, 0.0}, cplx{0.4, 0.0}, cplx{-0.19, 0.92}, cplx{-1.0, 5.0}}) {
    const cplx expect = (std::exp(-2.0 * kPi * lambda) - 1.0) / (lambda * lambda + 1.0);
    EXPECT_NEAR(std::abs(sddelan::exp_moment(a, lambda, 0) - expect), 0.0, 1e-9 * (1.0 + std::abs(expect)))
        << lambda;
  }
}

TEST(Measure, UniformDensityMomentsAcrossRegimes) {
  const auto a = uniform_density();
  auto one = [](double) { return 1.0; };
  for (cplx lambda : {cplx{1e-7, 0.0}, cplx{0.3, 0.2}, cplx{3.0, 4.0}, cplx{-12.0, 30.0}, cplx{60.0, -5.0}}) {
    const auto m = sddelan::exp_moments(a, lambda, 4);
    for (int j = 0; j <= 4; ++j) {
      const cplx ref = reference_moment(-1.0, 0.0, j, lambda, one);
      EXPECT_NEAR(std::abs(m[j] - ref), 0.0, 1e-11 * (1.0 + std::abs(ref))) << lambda << " j=" << j;
    }
  }
}

TEST(Measure, PolynomialPieceMoments) {
  // density u^2 - u on [-0.7, -0.2]
  const SignedMeasure a(1.0, {}, {{-0.7, -0.2, {0.0, -1.0, 1.0}}}, std::nullopt);
  auto f = [](double u) { return u * u - u; };
  const cplx lambda{-1.5, 2.5};
  for (int j = 0; j <= 3; ++j) {
    const cplx ref = reference_moment(-0.7, -0.2, j, lambda, f);
    EXPECT_NEAR(std::abs(sddelan::exp_moment(a, lambda, j) - ref), 0.0, 1e-12) << j;
  }
}

TEST(Measure, SeriesAndClosedBranchesAgree) {
  const auto a = uniform_density();
  for (double x : {1e-4, -1e-4}) {
    for (int j = 0; j <= 3; ++j) {
      const cplx s = sddelan::exp_moment(a, x, j, sddelan::MomentMethod::kSeries);
      const cplx c = sddelan::exp_moment(a, x, j, sddelan::MomentMethod::kClosed);
      EXPECT_LE(std::abs(s - c), 1e-10 * std::abs(s));
    }
  }
}

TEST(Measure, OrderAboveSixteenRejected) {
  EXPECT_THROW(sddelan::exp_moments(uniform_density(), 1.0, 17), sddelan::DomainError);
}

TEST(Measure, ValidationErrors) {
  EXPECT_THROW(SignedMeasure(0.0, {{0.0, 1.0}}, {}, std::nullopt), sddelan::InvalidArgument);
  EXPECT_THROW(SignedMeasure(1.0, {{-1.5, 1.0}}, {}, std::nullopt), sddelan::InvalidArgument);
  EXPECT_THROW(SignedMeasure(1.0, {}, {}, std::nullopt), sddelan::InvalidArgument);
  EXPECT_THROW(SignedMeasure(1.0, {{0.0, 0.0}}, {}, std::nullopt), sddelan::InvalidArgument);
  EXPECT_THROW(SignedMeasure::sampled_density(1.0, std::vector<double>(100, 1.0)), sddelan::InvalidArgument);
  EXPECT_THROW(SignedMeasure(1.0, {}, {{-1.0, -0.4, {1.0}}, {-0.5, 0.0, {1.0}}}, std::nullopt),
               sddelan::InvalidArgument);
}

TEST(Measure, DensityAtSharedBoundaryIsTheMean) {
  const SignedMeasure a(1.0, {}, {{-1.0, -0.5, {1.0}}, {-0.5, 0.0, {3.0}}}, std::nullopt);
  EXPECT_DOUBLE_EQ(a.density_at(-0.75), 1.0);
  EXPECT_DOUBLE_EQ(a.density_at(-0.5), 2.0);
  EXPECT_DOUBLE_EQ(a.density_at(-0.25), 3.0);
}

TEST(Measure, DecayBoundHolds) {
  const auto a = sin_density();
  const auto [A, D] = sddelan::exp_moment_decay_bound(a, -1.0);
  for (cplx lambda : {cplx{-1.0, 3.0}, cplx{-0.5, 10.0}, cplx{2.0, 40.0}, cplx{-1.0, 0.5}}) {
    EXPECT_LE(std::abs(sddelan::exp_moment(a, lambda, 0)), A + D / std::abs(lambda)) << lambda;
  }
}

}  // namespace
