#ifndef SDDELAN_SPECTRUM_HPP
#define SDDELAN_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sddelan/error.hpp"
#include "sddelan/measure.hpp"

namespace sddelan {

/// h(lambda) = lambda - theta \int e^{lambda u} a(du).
inline cplx char_value(double theta, const SignedMeasure& a, cplx lambda) {
  return lambda - theta * exp_moment(a, lambda, 0);
}

/// h^{(k)}(lambda) for k = 0..kmax.
inline std::vector<cplx> char_derivatives(double theta, const SignedMeasure& a, cplx lambda, int kmax) {
  if (kmax < 0 || kmax > kMaxMomentOrder) throw DomainError("derivative order outside [0, 16]");
  std::vector<cplx> m = exp_moments(a, lambda, kmax);
  std::vector<cplx> out(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) out[k] = -theta * m[k];
  out[0] += lambda;
  if (kmax >= 1) out[1] += 1.0;
  return out;
}

inline cplx char_derivative(double theta, const SignedMeasure& a, cplx lambda, int k) {
  if (k < 1 || k > kMaxMomentOrder) throw DomainError("derivative order outside [1, 16]");
  return char_derivatives(theta, a, lambda, k)[static_cast<std::size_t>(k)];
}

/// Characteristic root together with its residue data. `laurent` holds
/// A_{-m}, ..., A_K, so A_k is laurent[k + m].
struct CharRoot {
  cplx lambda{0.0, 0.0};
  int multiplicity = 1;
  std::vector<cplx> laurent;
  std::vector<cplx> p_poly;
  std::vector<cplx> P_poly;
  std::optional<int> m_tilde;  // nullopt is the degree of the zero polynomial (-inf)

  cplx laurent_at(int k) const { return laurent.at(static_cast<std::size_t>(k + multiplicity)); }
};

struct Rect {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(cplx z, double margin = 0.0) const {
    return z.real() >= x0 - margin && z.real() <= x1 + margin && z.imag() >= y0 - margin &&
           z.imag() <= y1 + margin;
  }
};

struct RootSearchOptions {
  double merge_tol = 1e-8;
  double newton_residual = 1e-12;
  double degenerate_distance = 1e-6;
  std::size_t max_rectangles = 1'000'000;
  int perturbation_retries = 3;
};

namespace detail {

class ContourDegenerate : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Zero counting and isolation for h on axis-aligned rectangles.
class RootSearcher {
 public:
  RootSearcher(double theta, const SignedMeasure& a, RootSearchOptions opts)
      : theta_(theta), a_(a), opts_(opts) {
    double span = 0.0;
    for (const auto& at : a.atoms()) span = std::max(span, std::abs(at.u));
    for (const auto& p : a.local_pieces()) span = std::max(span, std::abs(p.lo()));
    // e^{lambda u} turns by at most span radians per unit of Im(lambda)
    max_step_ = span > 0.0 ? std::numbers::pi / (4.0 * span) : 1.0;
  }

  /// Winding number of h around the rectangle.
  int count(const Rect& rc) {
    const cplx z[4] = {{rc.x0, rc.y0}, {rc.x1, rc.y0}, {rc.x1, rc.y1}, {rc.x0, rc.y1}};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) total += edge_phase(z[e], z[(e + 1) % 4]);
    const double w = total / (2.0 * std::numbers::pi);
    const double k = std::round(w);
    if (std::abs(w - k) > 0.25 || k < 0) throw ContourDegenerate("contour degenerate: non-integer winding");
    return static_cast<int>(k);
  }

  /// Count with up to `retries` outward perturbations of size <= 1e-4.
  int count_robust(Rect& rc) {
    for (int attempt = 0;; ++attempt) {
      try {
        return count(rc);
      } catch (const ContourDegenerate&) {
        if (attempt >= opts_.perturbation_retries) throw NumericalError("contour degenerate");
        const double eps = 1e-4 * jitter();
        rc.x0 -= eps;
        rc.x1 += eps;
        rc.y0 -= eps;
        rc.y1 += eps;
      }
    }
  }

  void search(const Rect& rc, int n, std::vector<std::pair<cplx, int>>& found) {
    if (n <= 0) return;
    if (++rect_count_ > opts_.max_rectangles) throw NumericalError("search diverged");
    const double diam = std::hypot(rc.width(), rc.height());
    const double scale = 1.0 + std::abs(rc.center());
    if (n == 1 || diam < 1e-3 * scale) {
      if (auto z = newton(rc.center(), n); z && rc.contains(*z, 1e-12 * scale)) {
        found.emplace_back(*z, n);
        return;
      }
    }
    if (diam < 1e-10 * scale) {
      found.emplace_back(rc.center(), n);
      return;
    }
    const bool split_x = rc.width() >= rc.height();
    for (int attempt = 0; attempt <= opts_.perturbation_retries; ++attempt) {
      const double frac = 0.5 + 0.06 * (jitter() - 0.5);
      Rect lo = rc;
      Rect hi = rc;
      if (split_x) {
        const double s = rc.x0 + frac * rc.width();
        lo.x1 = s;
        hi.x0 = s;
      } else {
        const double s = rc.y0 + frac * rc.height();
        lo.y1 = s;
        hi.y0 = s;
      }
      try {
        const int n_lo = count(lo);
        const int n_hi = count(hi);
        if (n_lo + n_hi != n) continue;
        search(lo, n_lo, found);
        search(hi, n_hi, found);
        return;
      } catch (const ContourDegenerate&) {
        continue;
      }
    }
    throw NumericalError("contour degenerate");
  }

  /// Newton on h^{(m-1)}, then a check that h, ..., h^{(m-1)} all vanish.
  std::optional<cplx> newton(cplx z, int m) const {
    if (m > kMaxMomentOrder - 1) return std::nullopt;
    for (int it = 0; it < 80; ++it) {
      const auto d = char_derivatives(theta_, a_, z, m);
      const cplx f = d[m - 1];
      const cplx fp = d[m];
      if (std::abs(fp) == 0.0 || !std::isfinite(std::abs(f))) return std::nullopt;
      const cplx step = f / fp;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    const auto d = char_derivatives(theta_, a_, z, m);
    const double scale = 1.0 + std::abs(z);
    if (std::abs(d[0]) > opts_.newton_residual * scale * 10.0) return std::nullopt;
    const double lead = std::max(1.0, std::abs(d[m]));
    if (std::abs(d[m]) < 1e-10) return std::nullopt;
    for (int k = 1; k < m; ++k) {
      if (std::abs(d[k]) > 1e-6 * lead) return std::nullopt;
    }
    return z;
  }

  std::size_t rectangles() const { return rect_count_; }

 private:
  struct Sample {
    cplx z;
    cplx h;
    double rate;  // |h'/h|, the local turning rate of arg h
  };

  Sample eval(cplx z) const {
    const auto d = char_derivatives(theta_, a_, z, 1);
    const double dist = std::abs(d[0]) / std::max(std::abs(d[1]), 1e-300);
    if (dist < opts_.degenerate_distance) throw ContourDegenerate("contour degenerate: passes near a root");
    return {z, d[0], 1.0 / dist};
  }

  double edge_phase(cplx z0, cplx z1) {
    const double len = std::abs(z1 - z0);
    const int pieces = std::max(8, static_cast<int>(std::ceil(len / max_step_)));
    double total = 0.0;
    Sample prev = eval(z0);
    for (int k = 1; k <= pieces; ++k) {
      const Sample next = eval(z0 + (z1 - z0) * (static_cast<double>(k) / pieces));
      total += segment_phase(prev, next, 0);
      prev = next;
    }
    return total;
  }

  double segment_phase(const Sample& s0, const Sample& s1, int depth) {
    const double whole = std::arg(s1.h / s0.h);
    const Sample mid = eval(0.5 * (s0.z + s1.z));
    const double left = std::arg(mid.h / s0.h);
    const double right = std::arg(s1.h / mid.h);
    // Three samples cannot see a full turn of arg h, so the segment must
    // also be short against the turning rate (near clustered roots).
    const double turn = std::abs(s1.z - s0.z) * std::max({s0.rate, mid.rate, s1.rate});
    if (std::abs(whole) <= std::numbers::pi / 4.0 && std::abs(left + right - whole) <= 1e-9 &&
        turn <= std::numbers::pi / 2.0) {
      return left + right;
    }
    if (depth > 48) throw ContourDegenerate("contour degenerate: phase unresolved");
    return segment_phase(s0, mid, depth + 1) + segment_phase(mid, s1, depth + 1);
  }

  double jitter() {
    // deterministic low-discrepancy sequence in (0, 1)
    jitter_state_ += 0.6180339887498949;
    jitter_state_ -= std::floor(jitter_state_);
    return 0.1 + 0.8 * jitter_state_;
  }

  double theta_;
  const SignedMeasure& a_;
  RootSearchOptions opts_;
  double max_step_ = 1.0;
  std::size_t rect_count_ = 0;
  double jitter_state_ = 0.0;
};

/// Radius R such that every root with Re(lambda) >= c has |lambda| <= R.
inline double root_modulus_bound(double theta, const SignedMeasure& a, double c) {
  const double at = std::abs(theta);
  const double crude = at * total_variation(a) * std::exp(std::max(0.0, -c) * a.r()) + std::abs(c) + 1.0;
  const auto [atoms, dens] = exp_moment_decay_bound(a, c);
  const double decay = 0.5 * (at * atoms + std::sqrt(at * at * atoms * atoms + 4.0 * at * dens));
  return std::min(crude, decay + 1.0);
}

inline double real_newton(double theta, const SignedMeasure& a, double x) {
  for (int it = 0; it < 60; ++it) {
    const auto d = char_derivatives(theta, a, cplx{x, 0.0}, 1);
    if (d[1].real() == 0.0) break;
    const double step = d[0].real() / d[1].real();
    x -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
  }
  return x;
}

}  // namespace detail

/// Argument-principle zero count of h on a rectangle.
inline int count_zeros(double theta, const SignedMeasure& a, const Rect& rect, RootSearchOptions opts = {}) {
  detail::RootSearcher searcher(theta, a, opts);
  Rect rc = rect;
  return searcher.count_robust(rc);
}

/// All characteristic roots with Re(lambda) >= c, with multiplicities.
/// Roots are returned sorted by decreasing real part, then increasing
/// imaginary part; non-real roots come in exact conjugate pairs.
inline std::vector<CharRoot> roots_in_strip(double theta, const SignedMeasure& a, double c,
                                            RootSearchOptions opts = {}) {
  std::vector<CharRoot> out;
  if (theta == 0.0) {
    if (c <= 0.0) out.push_back({cplx{0.0, 0.0}, 1, {}, {}, {}, std::nullopt});
    return out;
  }
  const double bound = detail::root_modulus_bound(theta, a, c);
  if (c > bound) return out;

  detail::RootSearcher searcher(theta, a, opts);
  // Upper half plane plus a thin band below the real axis, so that real
  // roots sit strictly inside the contour.
  Rect box{c, bound + 0.5, -0.0123, bound + 0.5};
  const int total = searcher.count_robust(box);
  std::vector<std::pair<cplx, int>> found;
  searcher.search(box, total, found);

  // Real roots are snapped onto the axis; non-real roots in the band below
  // it are dropped because their conjugates were found above.
  std::vector<std::pair<cplx, int>> full;
  for (auto [z, m] : found) {
    const double scale = 1.0 + std::abs(z);
    if (std::abs(z.imag()) <= 1e-9 * scale) {
      full.emplace_back(cplx{m == 1 ? detail::real_newton(theta, a, z.real()) : z.real(), 0.0}, m);
    } else if (z.imag() > 0.0) {
      full.emplace_back(z, m);
      full.emplace_back(std::conj(z), m);
    }
  }
  std::sort(full.begin(), full.end(), [](const auto& l, const auto& r) {
    return l.first.real() != r.first.real() ? l.first.real() > r.first.real() : l.first.imag() < r.first.imag();
  });
  // clusters closer than merge_tol are one root of the summed multiplicity
  std::vector<std::pair<cplx, int>> merged;
  for (const auto& [z, m] : full) {
    bool joined = false;
    for (auto& [w, n] : merged) {
      if (std::abs(w - z) < opts.merge_tol) {
        w = (w * static_cast<double>(n) + z * static_cast<double>(m)) / static_cast<double>(n + m);
        n += m;
        joined = true;
        break;
      }
    }
    if (!joined) merged.emplace_back(z, m);
  }
  for (auto& [z, m] : merged) {
    if (std::abs(z.imag()) < opts.merge_tol) z = z.real();
    if (m > 1) {
      if (auto refined = searcher.newton(z, m); refined && std::abs(*refined - z) < opts.merge_tol) {
        z = z.imag() == 0.0 ? cplx{refined->real(), 0.0} : *refined;
      }
    }
  }
  for (const auto& [z, m] : merged) {
    if (z.real() < c - 1e-9 * (1.0 + std::abs(c))) continue;
    out.push_back({z, m, {}, {}, {}, std::nullopt});
  }
  std::sort(out.begin(), out.end(), [](const CharRoot& l, const CharRoot& r) {
    return l.lambda.real() != r.lambda.real() ? l.lambda.real() > r.lambda.real()
                                              : l.lambda.imag() < r.lambda.imag();
  });
  return out;
}

/// Laurent coefficients A_{-m}, ..., A_K of 1/h at a root of multiplicity m,
/// by power-series inversion of h(z) / (z - lambda)^m.
inline std::vector<cplx> laurent_coeffs(double theta, const SignedMeasure& a, cplx lambda, int m, int K) {
  if (m < 1) throw DomainError("multiplicity must be positive");
  if (K < -m) throw DomainError("K must be >= -m");
  const int terms = K + m + 1;
  const int top = m + terms - 1;
  if (top > kMaxMomentOrder) throw DomainError("laurent_coeffs: needs derivatives beyond order 16");
  const auto d = char_derivatives(theta, a, lambda, top);
  if (std::abs(d[0]) > 1e-9 * (1.0 + std::abs(lambda))) throw DomainError("laurent_coeffs: lambda is not a root");
  std::vector<cplx> g(static_cast<std::size_t>(terms));
  double fact = 1.0;
  for (int j = 1; j <= m; ++j) fact *= j;
  for (int i = 0; i < terms; ++i) {
    g[i] = d[m + i] / fact;
    fact *= (m + i + 1);
  }
  if (std::abs(g[0]) < 1e-10) throw NumericalError("multiplicity inconsistent");
  std::vector<cplx> b(static_cast<std::size_t>(terms));
  b[0] = 1.0 / g[0];
  for (int n = 1; n < terms; ++n) {
    cplx acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += g[k] * b[n - k];
    b[n] = -acc / g[0];
  }
  return b;
}

namespace detail {

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace detail

/// Fills in Laurent data, p_{theta,lambda}, P_{theta,lambda} and its degree.
inline CharRoot build_root_data(double theta, const SignedMeasure& a, const CharRoot& root) {
  CharRoot out = root;
  const int m = root.multiplicity;
  const cplx lambda = root.lambda;
  out.laurent = laurent_coeffs(theta, a, lambda, m, 0);
  const auto moments = exp_moments(a, lambda, m - 1);

  double a_norm = 0.0;
  for (int k = -m; k <= -1; ++k) a_norm = std::max(a_norm, std::abs(out.laurent_at(k)));

  out.p_poly.assign(static_cast<std::size_t>(m), cplx{0.0, 0.0});
  for (int l = 0; l < m; ++l) out.p_poly[l] = out.laurent_at(-1 - l) / detail::factorial(l);

  out.P_poly.assign(static_cast<std::size_t>(m), cplx{0.0, 0.0});
  for (int l = 0; l < m; ++l) {
    cplx acc = 0.0;
    for (int j = 0; j <= m - 1 - l; ++j) acc += out.laurent_at(-j - 1 - l) / detail::factorial(j) * moments[j];
    out.P_poly[l] = acc / detail::factorial(l);
  }
  // At lambda = 0 the constant term carries the factor a([-r, 0]); an exact
  // cancellation there must not survive as rounding noise.
  const double tv = total_variation(a);
  if (lambda == cplx{0.0, 0.0} && m == 1 && std::abs(tail_mass(a, a.r())) <= 1e-12 * std::max(1.0, tv)) {
    out.P_poly[0] = 0.0;
  }
  if (lambda.imag() == 0.0) {
    for (auto& v : out.p_poly) v = v.real();
    for (auto& v : out.P_poly) v = v.real();
    for (auto& v : out.laurent) v = v.real();
  }
  const double cutoff = 1e-10 * (1.0 + a_norm) * tv;
  out.m_tilde.reset();
  for (int l = m - 1; l >= 0; --l) {
    if (std::abs(out.P_poly[l]) > cutoff) {
      out.m_tilde = l;
      break;
    }
  }
  return out;
}

/// Largest d such that every h in H is within tol * max(H) of an integer
/// multiple of d, or nullopt when the required multiples exceed 1e6.
inline std::optional<double> real_gcd(const std::vector<double>& H, double tol = 1e-8) {
  if (H.empty()) throw DomainError("real_gcd: empty input");
  if (!(tol > 0.0 && tol <= 1e-4)) throw DomainError("real_gcd: tol outside (0, 1e-4]");
  double hmax = 0.0;
  for (double h : H) {
    if (!(h > 0.0)) throw DomainError("real_gcd: entries must be positive");
    hmax = std::max(hmax, h);
  }
  const double thr = tol * hmax;
  double d = H[0];
  for (std::size_t i = 1; i < H.size(); ++i) {
    double x = std::max(d, H[i]);
    double y = std::min(d, H[i]);
    for (int it = 0; it < 400 && y > thr; ++it) {
      double rem = std::fmod(x, y);
      if (rem > 0.5 * y) rem = y - rem;
      x = y;
      y = rem;
    }
    d = x;
  }
  for (double h : H) {
    const double k = std::round(h / d);
    if (k > 1e6 || k < 1.0) return std::nullopt;
    if (std::abs(h - k * d) > thr) return std::nullopt;
  }
  return d;
}

enum class Regime { kLAN, kLAQ, kLAMN, kPLAMN, kUnclassified };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::kLAN: return "LAN";
    case Regime::kLAQ: return "LAQ";
    case Regime::kLAMN: return "LAMN";
    case Regime::kPLAMN: return "PLAMN";
    case Regime::kUnclassified: return "UNCLASSIFIED";
  }
  return "UNCLASSIFIED";
}

inline Regime regime_from_string(const std::string& s) {
  if (s == "LAN") return Regime::kLAN;
  if (s == "LAQ") return Regime::kLAQ;
  if (s == "LAMN") return Regime::kLAMN;
  if (s == "PLAMN") return Regime::kPLAMN;
  if (s == "UNCLASSIFIED") return Regime::kUnclassified;
  throw InvalidArgument("unknown regime '" + s + "'");
}

/// Rate r_{theta,T} of the score and information normalization.
struct Scaling {
  enum class Kind { kInvSqrtT, kPowerT, kExpPowerT };
  Kind kind = Kind::kInvSqrtT;
  int m_star = 0;
  double v_star = 0.0;

  double at(double T) const {
    switch (kind) {
      case Kind::kInvSqrtT: return 1.0 / std::sqrt(T);
      case Kind::kPowerT: return std::pow(T, -(m_star + 1.0));
      case Kind::kExpPowerT: return std::pow(T, -static_cast<double>(m_star)) * std::exp(-v_star * T);
    }
    return 1.0;
  }

  std::string describe() const {
    switch (kind) {
      case Kind::kInvSqrtT: return "T^(-1/2)";
      case Kind::kPowerT: return "T^(-" + std::to_string(m_star + 1) + ")";
      case Kind::kExpPowerT: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v_star);
        return "T^(-" + std::to_string(m_star) + ")*exp(-" + buf + "*T)";
      }
    }
    return "";
  }
};

struct RegimeReport {
  double theta = 0.0;
  double v0 = -std::numeric_limits<double>::infinity();
  double v_star = -std::numeric_limits<double>::infinity();
  std::optional<int> m_star;
  std::vector<double> H;
  std::optional<double> D;
  Regime regime = Regime::kUnclassified;
  Scaling scaling;
  std::vector<CharRoot> contributing_roots;
  std::vector<CharRoot> roots;  // every root found above the final cut line
  double cut = 0.0;
  std::vector<std::string> warnings;

  std::optional<double> period() const {
    if (!D) return std::nullopt;
    return 2.0 * std::numbers::pi / *D;
  }
};

struct ClassifyOptions {
  std::optional<Regime> regime_hint;
  double zero_tol = 1e-8;
  double gcd_tol = 1e-8;
  RootSearchOptions search;
};

inline Scaling scaling_for(Regime regime, double v_star, std::optional<int> m_star) {
  Scaling s;
  const int m = m_star.value_or(0);
  switch (regime) {
    case Regime::kLAN:
      s.kind = Scaling::Kind::kInvSqrtT;
      break;
    case Regime::kLAQ:
      s.kind = Scaling::Kind::kPowerT;
      s.m_star = m;
      break;
    default:
      s.kind = Scaling::Kind::kExpPowerT;
      s.m_star = m;
      s.v_star = std::isfinite(v_star) ? v_star : 0.0;
      break;
  }
  return s;
}

/// Classifies the local asymptotic regime of the likelihood at theta.
///
/// Cut lines descend from just below a rough estimate of the rightmost root
/// until a root with a nonzero P-polynomial enters the strip. Below -10/r the
/// search stops and v* = -inf is declared.
inline RegimeReport classify(double theta, const SignedMeasure& a, const ClassifyOptions& opts = {}) {
  RegimeReport rep;
  rep.theta = theta;
  const double c_min = -10.0 / a.r();

  auto with_data = [&](std::vector<CharRoot> roots) {
    for (auto& rt : roots) {
      if (rt.lambda.imag() < 0.0) continue;
      rt = build_root_data(theta, a, rt);
    }
    // conjugates mirror the upper-half data exactly
    for (auto& rt : roots) {
      if (rt.lambda.imag() >= 0.0) continue;
      for (const auto& up : roots) {
        if (up.lambda == std::conj(rt.lambda)) {
          CharRoot mirror = up;
          mirror.lambda = rt.lambda;
          for (auto& v : mirror.laurent) v = std::conj(v);
          for (auto& v : mirror.p_poly) v = std::conj(v);
          for (auto& v : mirror.P_poly) v = std::conj(v);
          rt = mirror;
          break;
        }
      }
    }
    return roots;
  };

  // rough rightmost-root estimate
  std::vector<CharRoot> roots;
  double v_hat = 0.0;
  bool any = false;
  for (double c = 0.0;; c -= 1.0) {
    const double cc = std::max(c, c_min);
    roots = roots_in_strip(theta, a, cc, opts.search);
    rep.cut = cc;
    if (!roots.empty()) {
      v_hat = roots.front().lambda.real();
      any = true;
      break;
    }
    if (cc <= c_min) break;
  }

  bool found_nonzero = false;
  if (any) {
    rep.v0 = v_hat;
    for (int step = 1;; ++step) {
      const double cc = std::max(v_hat - step, c_min);
      roots = with_data(roots_in_strip(theta, a, cc, opts.search));
      rep.cut = cc;
      for (const auto& rt : roots) {
        rep.v0 = std::max(rep.v0, rt.lambda.real());
        if (rt.m_tilde) found_nonzero = true;
      }
      if (found_nonzero || cc <= c_min) break;
    }
  }
  rep.roots = roots;

  if (!found_nonzero) {
    rep.v_star = -std::numeric_limits<double>::infinity();
    rep.m_star.reset();
    rep.warnings.push_back("no root with nonzero P-polynomial above Re = " + std::to_string(c_min) +
                           "; v* declared -inf");
  } else {
    double vs = -std::numeric_limits<double>::infinity();
    for (const auto& rt : roots) {
      if (rt.m_tilde) vs = std::max(vs, rt.lambda.real());
    }
    rep.v_star = vs;
    const double tol = 1e-8 * (1.0 + std::abs(vs));
    int ms = -1;
    for (const auto& rt : roots) {
      if (rt.m_tilde && std::abs(rt.lambda.real() - vs) <= tol) ms = std::max(ms, *rt.m_tilde);
    }
    rep.m_star = ms;
    for (const auto& rt : roots) {
      if (rt.m_tilde && *rt.m_tilde == ms && std::abs(rt.lambda.real() - vs) <= tol) {
        rep.contributing_roots.push_back(rt);
        if (rt.lambda.imag() > 0.0) rep.H.push_back(rt.lambda.imag());
      }
    }
    if (!rep.H.empty()) rep.D = real_gcd(rep.H, opts.gcd_tol);
  }

  if (!std::isfinite(rep.v_star) || rep.v_star < -opts.zero_tol) {
    rep.regime = Regime::kLAN;
  } else if (std::abs(rep.v_star) <= opts.zero_tol) {
    rep.regime = Regime::kLAQ;
  } else if (rep.H.empty()) {
    rep.regime = Regime::kLAMN;
  } else if (rep.D) {
    rep.regime = Regime::kPLAMN;
  } else {
    rep.regime = Regime::kUnclassified;
    rep.warnings.push_back("imaginary parts in H have no common divisor");
  }
  if (opts.regime_hint) {
    rep.regime = *opts.regime_hint;
    if (rep.regime == Regime::kLAQ) rep.v_star = 0.0;
  }
  rep.scaling = scaling_for(rep.regime, rep.v_star, rep.m_star);
  return rep;
}

}  // namespace sddelan

#endif  // SDDELAN_SPECTRUM_HPP
