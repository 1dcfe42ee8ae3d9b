#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "sddelan/experiment.hpp"
#include "sddelan/ks.hpp"
#include "sddelan/limit_laws.hpp"

namespace {

using sddelan::InitialPath;
using sddelan::SignedMeasure;
constexpr double kPi = std::numbers::pi;

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

TEST(LimitLaws, LanSamples) {
  sddelan::NormalStream rng(1, 0);
  std::vector<double> d(10000);
  for (auto& x : d) x = sddelan::sample_lan(1.0, rng).delta;
  double var = 0.0;
  for (double x : d) var += x * x / d.size();
  EXPECT_NEAR(var, 1.0, 0.05);
  EXPECT_GT(sddelan::ks_normal(d).p_value, 0.01);
  EXPECT_EQ(sddelan::sample_lan(0.5, rng).info, 0.5);
  EXPECT_THROW(sddelan::sample_lan(0.0, rng), sddelan::InvalidArgument);
}

std::vector<sddelan::LimitSample> laq_draws(const sddelan::RegimeReport& rep, int n, int steps, std::uint64_t seed) {
  std::vector<sddelan::LimitSample> out(n);
  sddelan::parallel_for(n, sddelan::resolve_threads(0), [&](int i) {
    out[i] = sddelan::sample_laq(rep, steps, sddelan::derive_seed(seed, i));
  });
  return out;
}

TEST(LimitLaws, LaqBrownianMoments) {
  const auto rep = sddelan::classify(0.0, SignedMeasure::dirac(0.0));
  const auto s = laq_draws(rep, 10000, 10000, 5);
  std::vector<double> J;
  std::vector<double> D;
  for (const auto& x : s) {
    J.push_back(x.info);
    D.push_back(x.delta);
  }
  EXPECT_NEAR(mean(J), 0.5, 0.01);
  EXPECT_NEAR(mean(D), 0.0, 0.02);
  // left sums give (W(1)^2 - sum dW^2) / 2, and sum dW^2 = 1 +- sqrt(2 / n)
  for (double d : D) EXPECT_GE(d, -0.5 - 0.06);
}

TEST(LimitLaws, LaqHayesBoundaryMean) {
  const auto rep = sddelan::classify(-kPi / 2, SignedMeasure::dirac(-1.0));
  ASSERT_EQ(rep.regime, sddelan::Regime::kLAQ);
  const auto s = laq_draws(rep, 10000, 10000, 6);
  std::vector<double> J;
  for (const auto& x : s) J.push_back(x.info);
  const double expect = 1.0 / (1.0 + kPi * kPi / 4.0);
  EXPECT_NEAR(mean(J), expect, 0.02 * expect);
}

TEST(LimitLaws, LaqStepRefinementIsStable) {
  // Euler bias of E[J] is 1/(2n), far below 1% at n = 1e4; the two runs
  // use unrelated increments so they agree up to Monte Carlo error.
  const auto rep = sddelan::classify(0.0, SignedMeasure::dirac(0.0));
  const int n = 8000;
  const auto a = laq_draws(rep, n, 10000, 8);
  const auto b = laq_draws(rep, n, 20000, 18);
  double ja = 0.0;
  double jb = 0.0;
  for (int i = 0; i < n; ++i) {
    ja += a[i].info / n;
    jb += b[i].info / n;
  }
  // Var \int_0^1 W^2 = 1/3
  EXPECT_LE(std::abs(ja - jb), 0.005 + 4.0 * std::sqrt(2.0 / (3.0 * n)));
}

TEST(LimitLaws, LaqRejectsCoarseGrid) {
  const auto rep = sddelan::classify(0.0, SignedMeasure::dirac(0.0));
  EXPECT_THROW(sddelan::sample_laq(rep, 100, 1), sddelan::InvalidArgument);
}

TEST(LimitLaws, LaqIsDeterministic) {
  const auto rep = sddelan::classify(-kPi / 2, SignedMeasure::dirac(-1.0));
  const auto x = sddelan::sample_laq(rep, 10000, 77);
  const auto y = sddelan::sample_laq(rep, 10000, 77);
  EXPECT_EQ(x.delta, y.delta);
  EXPECT_EQ(x.info, y.info);
}

std::vector<double> lamn_info(const InitialPath& x0, int n, std::uint64_t seed, bool noise = true) {
  const auto a = SignedMeasure::dirac(0.0);
  const auto rep = sddelan::classify(0.5, a);
  sddelan::SupercriticalOptions o;
  o.noise = noise;
  std::vector<double> J(n);
  for (int i = 0; i < n; ++i) J[i] = sddelan::sample_lamn(0.5, a, rep, x0, sddelan::derive_seed(seed, i), o).info;
  return J;
}

TEST(LimitLaws, LamnZeroInitialPath) {
  EXPECT_NEAR(mean(lamn_info(InitialPath::zero(), 10000, 9)), 1.0, 0.03);
}

TEST(LimitLaws, LamnShiftedInitialPath) {
  // J = U^2 with U ~ N(1, 1): U = sign * sqrt(J) is not recoverable, so check
  // E[J] = 2 and E[J^2] = E[U^4] = 1 + 6 + 3 = 10
  const auto J = lamn_info(InitialPath::constant(1.0), 20000, 10);
  double m2 = 0.0;
  for (double v : J) m2 += v * v / J.size();
  EXPECT_NEAR(mean(J), 2.0, 0.06);
  EXPECT_NEAR(m2, 10.0, 0.6);
}

TEST(LimitLaws, LamnUIsShiftedNormal) {
  const auto a = SignedMeasure::dirac(0.0);
  const auto rep = sddelan::classify(0.5, a);
  std::vector<double> u(5000);
  for (int i = 0; i < 5000; ++i) {
    sddelan::NormalStream rng(sddelan::derive_seed(12, i), 0);
    u[i] = sddelan::sample_u(0.5, a, rep.contributing_roots, InitialPath::constant(1.0), 40.0, rng)[0].real() - 1.0;
  }
  EXPECT_GT(sddelan::ks_normal(u).p_value, 0.01);
}

TEST(LimitLaws, LamnNoiselessIsDeterministic) {
  for (double J : lamn_info(InitialPath::constant(1.0), 5, 1, false)) EXPECT_DOUBLE_EQ(J, 1.0);
}

TEST(LimitLaws, DeltaIsMixedNormal) {
  const auto a = SignedMeasure::dirac(0.0);
  const auto rep = sddelan::classify(0.5, a);
  std::vector<double> z(5000);
  for (int i = 0; i < 5000; ++i) {
    const auto s = sddelan::sample_lamn(0.5, a, rep, InitialPath::zero(), sddelan::derive_seed(13, i));
    z[i] = s.delta / std::sqrt(s.info);
  }
  EXPECT_GT(sddelan::ks_normal(z).p_value, 0.01);
}

TEST(LimitLaws, PlamnIsPeriodicInPhase) {
  const auto a = SignedMeasure::dirac(-1.0);
  const auto rep = sddelan::classify(-2.0, a);
  ASSERT_EQ(rep.regime, sddelan::Regime::kPLAMN);
  const double P = *rep.period();
  for (double d : {0.0, 0.7, 2.1}) {
    const auto x = sddelan::sample_plamn(-2.0, a, rep, InitialPath::constant(1.0), d, 21);
    const auto y = sddelan::sample_plamn(-2.0, a, rep, InitialPath::constant(1.0), d + P, 21);
    EXPECT_NEAR(x.info, y.info, 1e-10 * x.info);
    EXPECT_EQ(x.d_offset, d);
  }
}

TEST(LimitLaws, PlamnClosedFormMatchesQuadrature) {
  const std::vector<sddelan::cplx> b = {{0.3, -1.2}, {0.3, 1.2}, {0.8, 0.1}, {0.8, -0.1}};
  const std::vector<double> phi = {1.7, -1.7, 4.0, -4.0};
  const double v = 0.2;
  const double h = 1e-3;
  double q = 0.0;
  for (int k = 0; k < 200000; ++k) {
    const double t = (k + 0.5) * h;
    sddelan::cplx s = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) s += b[j] * std::exp(sddelan::cplx{0.0, -phi[j] * t});
    q += std::exp(-2.0 * v * t) * s.real() * s.real() * h;
  }
  EXPECT_NEAR(sddelan::plamn_information(v, b, phi), q, 1e-6 * q);
}

TEST(LimitLaws, PlamnSingleRealRootIsLamn) {
  const auto a = SignedMeasure::dirac(0.0);
  const auto rep = sddelan::classify(0.5, a);
  const auto x = sddelan::sample_plamn(0.5, a, rep, InitialPath::constant(0.4), 1.3, 31);
  const auto y = sddelan::sample_lamn(0.5, a, rep, InitialPath::constant(0.4), 31);
  EXPECT_EQ(x.info, y.info);
  EXPECT_EQ(x.delta, y.delta);
}

TEST(LimitLaws, PlamnInformationIsPositive) {
  const auto a = SignedMeasure::dirac(-1.0);
  const auto rep = sddelan::classify(-2.0, a);
  const double P = *rep.period();
  for (int i = 0; i < 1000; ++i) {
    const double d = P * (i % 37) / 37.0;
    EXPECT_GT(sddelan::sample_plamn(-2.0, a, rep, InitialPath::zero(), d, sddelan::derive_seed(40, i)).info, 0.0);
  }
}

TEST(LimitLaws, InitialPathTransformConstantVsSampled) {
  const SignedMeasure a(1.0, {{-0.6, 0.7}}, {{-1.0, -0.1, {0.2, 1.0}}}, std::nullopt);
  const sddelan::cplx lam{0.17, 1.67};
  const auto c = sddelan::initial_path_transform(a, InitialPath::constant(1.3), lam);
  const auto s = sddelan::initial_path_transform(a, InitialPath::sampled(1.0, std::vector<double>(201, 1.3)), lam);
  EXPECT_NEAR(std::abs(c - s), 0.0, 1e-10);
}

}  // namespace
