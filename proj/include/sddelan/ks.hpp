#ifndef SDDELAN_KS_HPP
#define SDDELAN_KS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sddelan/error.hpp"

namespace sddelan {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// P(K > x) for the Kolmogorov distribution.
inline double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace detail {
inline double ks_p(double D, double ne) {
  const double s = std::sqrt(ne);
  return kolmogorov_survival((s + 0.12 + 0.11 / s) * D);
}
}  // namespace detail

inline KsResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw InvalidArgument("ks_two_sample: empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double D = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    D = std::max(D, std::abs(i / n - j / m));
  }
  return {D, detail::ks_p(D, n * m / (n + m))};
}

template <class Cdf>
KsResult ks_one_sample(std::vector<double> x, Cdf cdf) {
  if (x.empty()) throw InvalidArgument("ks_one_sample: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double D = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    D = std::max({D, (i + 1) / n - F, F - i / n});
  }
  return {D, detail::ks_p(D, n)};
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline KsResult ks_normal(std::vector<double> x) { return ks_one_sample(std::move(x), normal_cdf); }

}  // namespace sddelan

#endif  // SDDELAN_KS_HPP
