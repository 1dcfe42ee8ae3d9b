#ifndef SDDELAN_DETAIL_QUADRATURE_HPP
#define SDDELAN_DETAIL_QUADRATURE_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

namespace sddelan::detail {

using cplx = std::complex<double>;

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `n` points, computed once per `n` by Newton
/// iteration on the Legendre recurrence and cached for the process lifetime.
inline const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

enum class ExpIntegralMethod { kAuto, kSeries, kClosed };

/// W_i = \int_0^w t^i e^{mu t} dt for i = 0..imax.
///
/// Small |mu w| uses the Taylor expansion of the exponential. Moderate
/// |mu w| uses composite Gauss-Legendre (the integrand is entire, so a
/// handful of panels reach machine precision). Large |mu w| uses the
/// integration-by-parts recursion, which is forward stable once
/// |mu w| exceeds the polynomial degree by a margin.
inline std::vector<cplx> power_exp_integrals(cplx mu, double w, int imax,
                                             ExpIntegralMethod method = ExpIntegralMethod::kAuto) {
  std::vector<cplx> out(static_cast<std::size_t>(imax) + 1, cplx{0.0, 0.0});
  if (w <= 0.0) return out;
  const cplx z = mu * w;
  const double az = std::abs(z);

  const bool use_series = method == ExpIntegralMethod::kSeries ||
                          (method == ExpIntegralMethod::kAuto && az <= 0.5);
  if (use_series) {
    // W_i = w^{i+1} sum_k z^k / (k! (i + k + 1))
    double wp = w;
    for (int i = 0; i <= imax; ++i) {
      cplx sum = 0.0;
      cplx term = 1.0;  // z^k / k!
      for (int k = 0; k < 400; ++k) {
        const cplx add = term / static_cast<double>(i + k + 1);
        sum += add;
        if (k > 2 && std::abs(add) <= 1e-18 * std::abs(sum)) break;
        term *= z / static_cast<double>(k + 1);
      }
      out[i] = wp * sum;
      wp *= w;
    }
    return out;
  }

  const double recursion_floor = 4.0 * (imax + 8);
  if (method == ExpIntegralMethod::kClosed && az > recursion_floor) {
    // fall through to the recursion below
  } else if (az <= recursion_floor) {
    const GaussRule& rule = gauss_legendre(32);
    const int panels = std::max(1, static_cast<int>(std::ceil(az / 6.0)));
    const double pw = w / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = p * pw;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double t = a + 0.5 * pw * (rule.nodes[k] + 1.0);
        const cplx e = std::exp(mu * t) * (0.5 * pw * rule.weights[k]);
        double tp = 1.0;
        for (int i = 0; i <= imax; ++i) {
          out[i] += tp * e;
          tp *= t;
        }
      }
    }
    return out;
  }

  const cplx ew = std::exp(z);
  out[0] = (ew - 1.0) / mu;
  double wp = 1.0;
  for (int i = 1; i <= imax; ++i) {
    wp *= w;
    out[i] = (wp * ew - static_cast<double>(i) * out[i - 1]) / mu;
  }
  return out;
}

/// Monomial coefficients of the interpolating polynomial through (ts, fs).
inline std::vector<double> interpolate_monomial(const std::vector<double>& ts,
                                                const std::vector<double>& fs) {
  const std::size_t n = ts.size();
  std::vector<double> dd(fs);
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (ts[i] - ts[i - level]);
    }
  }
  // Horner-style expansion of the Newton form.
  std::vector<double> coeffs(n, 0.0);
  coeffs[0] = dd[n - 1];
  std::size_t deg = 0;
  for (std::size_t k = n - 1; k-- > 0;) {
    // coeffs <- coeffs * (t - ts[k]) + dd[k]
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i <= deg; ++i) {
      next[i + 1] += coeffs[i];
      next[i] -= ts[k] * coeffs[i];
    }
    next[0] += dd[k];
    coeffs = std::move(next);
    ++deg;
  }
  return coeffs;
}

inline double horner(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
  return acc;
}

}  // namespace sddelan::detail

#endif  // SDDELAN_DETAIL_QUADRATURE_HPP
