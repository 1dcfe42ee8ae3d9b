#ifndef SDDELAN_LIMIT_LAWS_HPP
#define SDDELAN_LIMIT_LAWS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "sddelan/error.hpp"
#include "sddelan/initial_path.hpp"
#include "sddelan/measure.hpp"
#include "sddelan/rng.hpp"
#include "sddelan/spectrum.hpp"

namespace sddelan {

struct LimitSample {
  double delta = 0.0;
  double info = 0.0;
  Regime regime = Regime::kLAN;
  double d_offset = 0.0;
};

inline LimitSample sample_lan(double J, NormalStream& rng) {
  if (!(J > 0.0)) throw InvalidArgument("sample_lan: J must be positive");
  return {std::sqrt(J) * rng.next(), J, Regime::kLAN, 0.0};
}

namespace detail {

inline double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

inline int upper_half_index(const std::vector<CharRoot>& roots, cplx lambda) {
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (roots[i].lambda == lambda) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace detail

/// Draws (Delta, J) of the LAQ limit. Each contributing root with Im >= 0
/// gets its own Wiener process (two for complex roots); conjugates reuse it.
inline LimitSample sample_laq(const RegimeReport& report, int n_steps, std::uint64_t seed) {
  if (report.regime != Regime::kLAQ) throw InvalidArgument("sample_laq: regime is not LAQ");
  if (n_steps < 10'000) throw InvalidArgument("sample_laq: n_steps must be at least 1e4");
  const int m = report.m_star.value_or(0);
  const double h = 1.0 / n_steps;
  const double sh = std::sqrt(h);

  std::vector<CharRoot> upper;
  for (const auto& rt : report.contributing_roots) {
    if (rt.lambda.imag() >= 0.0) upper.push_back(rt);
  }

  cplx delta = 0.0;
  double info = 0.0;
  std::vector<double> binom(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) binom[i] = detail::binomial(m, i);

  for (std::size_t k = 0; k < upper.size(); ++k) {
    const bool complex_root = upper[k].lambda.imag() > 0.0;
    NormalStream re(seed, static_cast<std::uint32_t>(2 * k));
    NormalStream im(seed, static_cast<std::uint32_t>(2 * k + 1));
    // Z_m(s_n) = sum_i C(m,i) s_n^{m-i} S_i(n), S_i(n) = sum_{j<n} (-u_j)^i dZ_j
    std::vector<cplx> S(static_cast<std::size_t>(m) + 1, cplx{0.0, 0.0});
    cplx stoch = 0.0;  // \int Z_m d conj(Z_0)
    double quad = 0.0;  // \int |Z_m|^2
    for (int n = 0; n < n_steps; ++n) {
      const double s = n * h;
      cplx zm = 0.0;
      double sp = 1.0;
      for (int i = m; i >= 0; --i) {
        zm += binom[i] * sp * S[static_cast<std::size_t>(i)];
        sp *= s;
      }
      const cplx dz = complex_root ? cplx{re.next(), im.next()} * (sh / std::sqrt(2.0)) : cplx{sh * re.next(), 0.0};
      stoch += zm * std::conj(dz);
      quad += std::norm(zm) * h;
      double up = 1.0;
      for (int i = 0; i <= m; ++i) {
        S[static_cast<std::size_t>(i)] += up * dz;
        up *= -s;
      }
    }
    const cplx c = upper[k].P_poly.at(static_cast<std::size_t>(m));
    delta += c * stoch;
    info += std::norm(c) * quad;
    if (complex_root) {
      // the conjugate root's term, computed from the conjugated process
      const int j = detail::upper_half_index(report.contributing_roots, std::conj(upper[k].lambda));
      const cplx cc = j >= 0 ? report.contributing_roots[static_cast<std::size_t>(j)].P_poly.at(
                                   static_cast<std::size_t>(m))
                             : std::conj(c);
      delta += cc * std::conj(stoch);
      info += std::norm(cc) * quad;
    }
  }
  if (std::abs(delta.imag()) > 1e-8 * (1.0 + std::abs(delta))) {
    throw NumericalError("sample_laq: imaginary part of Delta does not cancel");
  }
  return {delta.real(), info, Regime::kLAQ, 0.0};
}

/// \int_{[-r,0]} \int_u^0 e^{-lambda (s - u)} X_0(s) ds a(du).
inline cplx initial_path_transform(const SignedMeasure& a, const InitialPath& x0, cplx lambda) {
  switch (x0.kind()) {
    case InitialPath::Kind::kZero: return 0.0;
    case InitialPath::Kind::kConstant: {
      const double c = x0.constant_value();
      if (std::abs(lambda) * a.r() < 1e-6) {
        // (M_0(0) - M_0(lambda)) / lambda -> -M_1(0) - lambda M_2(0) / 2
        const auto m = exp_moments(a, 0.0, 2);
        return c * (-m[1] - 0.5 * lambda * m[2]);
      }
      return c * (exp_moment(a, 0.0, 0) - exp_moment(a, lambda, 0)) / lambda;
    }
    case InitialPath::Kind::kSampled: break;
  }
  // F(u) = \int_u^0 e^{-lambda s} X_0(s) ds on the sample nodes, Gauss on
  // each linear piece; inner integral is e^{lambda u} F(u).
  const auto& vals = x0.values();
  const int nseg = static_cast<int>(vals.size()) - 1;
  const double r = x0.span();
  const double hseg = r / nseg;
  const auto& rule = detail::gauss_legendre(16);
  auto seg_integral = [&](double lo, double hi) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double s = lo + 0.5 * (hi - lo) * (rule.nodes[k] + 1.0);
      acc += rule.weights[k] * std::exp(-lambda * s) * x0(s);
    }
    return 0.5 * (hi - lo) * acc;
  };
  std::vector<cplx> F(static_cast<std::size_t>(nseg) + 1, cplx{0.0, 0.0});  // F at node -k hseg
  for (int k = 1; k <= nseg; ++k) F[k] = F[k - 1] + seg_integral(-k * hseg, -(k - 1) * hseg);
  auto F_at = [&](double u) {
    const double pos = std::clamp(-u / hseg, 0.0, static_cast<double>(nseg));
    const int k = std::min(static_cast<int>(std::floor(pos)), nseg);
    const double node = -k * hseg;
    return F[k] + (u < node ? seg_integral(u, node) : cplx{0.0, 0.0});
  };
  cplx total = 0.0;
  for (const auto& at : a.atoms()) total += at.w * std::exp(lambda * at.u) * F_at(at.u);
  for (const auto& p : a.local_pieces()) {
    const int panels = std::max(1, static_cast<int>(std::ceil(p.width / hseg)));
    const double pw = p.width / panels;
    for (int q = 0; q < panels; ++q) {
      const double lo = p.lo() + q * pw;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double u = lo + 0.5 * pw * (rule.nodes[k] + 1.0);
        total += 0.5 * pw * rule.weights[k] * p.at(u) * std::exp(lambda * u) * F_at(u);
      }
    }
  }
  return total;
}

/// Horizon S with e^{-2 v S} below 1e-8.
inline double default_horizon(double v_star) { return std::log(1e8) / (2.0 * v_star); }

/// Joint draw of U_lambda for the roots with Im >= 0:
/// U_lambda = X_0(0) + theta * transform + \int_0^S e^{-lambda s} dW(s).
/// The stochastic integrals are jointly Gaussian and sampled exactly from
/// their covariance.
inline std::vector<cplx> sample_u(double theta, const SignedMeasure& a, const std::vector<CharRoot>& upper,
                                  const InitialPath& x0, double S, NormalStream& rng, bool noise = true) {
  const std::size_t k = upper.size();
  std::vector<cplx> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = x0(0.0) + theta * initial_path_transform(a, x0, upper[i].lambda);
  }
  if (!noise) return out;
  auto I = [S](cplx z) -> cplx {
    if (std::abs(z) * S < 1e-8) return S - 0.5 * z * S * S;
    return std::isinf(S) ? 1.0 / z : (1.0 - std::exp(-z * S)) / z;
  };
  // real coordinates: Re xi_i and, for complex roots, Im xi_i
  struct Coord {
    std::size_t root;
    bool imag;
  };
  std::vector<Coord> coords;
  for (std::size_t i = 0; i < k; ++i) {
    coords.push_back({i, false});
    if (upper[i].lambda.imag() > 0.0) coords.push_back({i, true});
  }
  const std::size_t n = coords.size();
  std::vector<double> cov(n * n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      const cplx l = upper[coords[p].root].lambda;
      const cplx m = upper[coords[q].root].lambda;
      const cplx same = I(l + m);
      const cplx mixed = I(std::conj(l) + m);
      double v = 0.0;
      if (!coords[p].imag && !coords[q].imag) v = 0.5 * (same + mixed).real();
      if (!coords[p].imag && coords[q].imag) v = 0.5 * (same + mixed).imag();
      if (coords[p].imag && !coords[q].imag) v = 0.5 * (same - mixed).imag();
      if (coords[p].imag && coords[q].imag) v = 0.5 * (mixed - same).real();
      cov[p * n + q] = v;
    }
  }
  // Cholesky, tolerating rank deficiency
  std::vector<double> L(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = cov[j * n + j];
    for (std::size_t t = 0; t < j; ++t) d -= L[j * n + t] * L[j * n + t];
    const double ljj = d > 1e-300 ? std::sqrt(d) : 0.0;
    L[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = cov[i * n + j];
      for (std::size_t t = 0; t < j; ++t) s -= L[i * n + t] * L[j * n + t];
      L[i * n + j] = ljj > 0.0 ? s / ljj : 0.0;
    }
  }
  std::vector<double> z(n);
  for (auto& v : z) v = rng.next();
  for (std::size_t p = 0; p < n; ++p) {
    double x = 0.0;
    for (std::size_t t = 0; t <= p; ++t) x += L[p * n + t] * z[t];
    if (coords[p].imag) {
      out[coords[p].root] += cplx{0.0, x};
    } else {
      out[coords[p].root] += x;
    }
  }
  return out;
}

/// J(d) = \int_0^\infty e^{-2vt} Re(sum_k b_k e^{-i phi_k t})^2 dt with
/// b_k = c_k U_k e^{i d phi_k}, in closed form.
inline double plamn_information(double v_star, const std::vector<cplx>& b, const std::vector<double>& phi) {
  cplx same = 0.0;
  cplx cross = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    for (std::size_t l = 0; l < b.size(); ++l) {
      same += b[k] * b[l] / cplx{2.0 * v_star, phi[k] + phi[l]};
      cross += b[k] * std::conj(b[l]) / cplx{2.0 * v_star, phi[k] - phi[l]};
    }
  }
  return 0.5 * (same.real() + cross.real());
}

struct SupercriticalOptions {
  double horizon = std::numeric_limits<double>::quiet_NaN();  // NaN: default_horizon(v*)
  bool noise = true;
};

/// Draws (Delta(d), J(d), d) for a PLAMN or LAMN report. All contributing
/// roots share one Brownian path; conjugate roots use conjugate U.
inline LimitSample sample_plamn(double theta, const SignedMeasure& a, const RegimeReport& report,
                                const InitialPath& x0, double d, std::uint64_t seed,
                                const SupercriticalOptions& opts = {}) {
  if (report.regime != Regime::kPLAMN && report.regime != Regime::kLAMN) {
    throw InvalidArgument("sample_plamn: regime is not LAMN or PLAMN");
  }
  if (!(report.v_star > 0.0)) throw InvalidArgument("sample_plamn: requires v* > 0");
  const int m = report.m_star.value_or(0);
  const double S = std::isnan(opts.horizon) ? default_horizon(report.v_star) : opts.horizon;
  std::vector<CharRoot> upper;
  for (const auto& rt : report.contributing_roots) {
    if (rt.lambda.imag() >= 0.0) upper.push_back(rt);
  }
  NormalStream rng(seed, 0);
  const double z = rng.next();
  const std::vector<cplx> U = sample_u(theta, a, upper, x0, S, rng, opts.noise);

  std::vector<cplx> b;
  std::vector<double> phi;
  for (std::size_t k = 0; k < upper.size(); ++k) {
    const double ph = upper[k].lambda.imag();
    const cplx c = upper[k].P_poly.at(static_cast<std::size_t>(m));
    b.push_back(c * U[k] * std::exp(cplx{0.0, d * ph}));
    phi.push_back(ph);
    if (ph > 0.0) {
      b.push_back(std::conj(b.back()));
      phi.push_back(-ph);
    }
  }
  const double J = plamn_information(report.v_star, b, phi);
  return {z * std::sqrt(std::max(J, 0.0)), J, report.regime, d};
}

inline LimitSample sample_lamn(double theta, const SignedMeasure& a, const RegimeReport& report,
                               const InitialPath& x0, std::uint64_t seed, const SupercriticalOptions& opts = {}) {
  if (report.regime != Regime::kLAMN) throw InvalidArgument("sample_lamn: regime is not LAMN");
  return sample_plamn(theta, a, report, x0, 0.0, seed, opts);
}

}  // namespace sddelan

#endif  // SDDELAN_LIMIT_LAWS_HPP
