#ifndef SDDELAN_MEASURE_HPP
#define SDDELAN_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sddelan/detail/quadrature.hpp"
#include "sddelan/error.hpp"

namespace sddelan {

using cplx = std::complex<double>;

/// Point mass w at location u.
struct Atom {
  double u = 0.0;
  double w = 0.0;
};

/// Polynomial density on [lo, hi], coefficients in powers of u.
struct DensityPiece {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> coeffs;
};

/// Density sampled on the uniform grid u_i = -r + i r/(n-1), i = 0..n-1.
struct SampledDensity {
  std::vector<double> values;
};

inline constexpr int kMaxMomentOrder = 16;
inline constexpr std::size_t kMinSampledPoints = 2048;

namespace detail {

/// Density restricted to [hi - width, hi], stored in the local variable
/// t = hi - u: density(u) = sum_i q[i] t^i.
struct LocalPiece {
  double hi = 0.0;
  double width = 0.0;
  std::vector<double> q;

  double lo() const { return hi - width; }
  double at(double u) const { return horner(q, hi - u); }
};

/// Taylor shift: coefficients of p(hi - t) in powers of t.
inline std::vector<double> reflect_shift(const std::vector<double>& coeffs, double hi) {
  std::vector<double> out(coeffs.size(), 0.0);
  std::vector<double> power{1.0};  // (hi - t)^k
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    for (std::size_t i = 0; i < power.size(); ++i) out[i] += coeffs[k] * power[i];
    std::vector<double> next(power.size() + 1, 0.0);
    for (std::size_t i = 0; i < power.size(); ++i) {
      next[i] += hi * power[i];
      next[i + 1] -= power[i];
    }
    power = std::move(next);
  }
  return out;
}

inline double poly_integral(const std::vector<double>& q, double a, double b) {
  double fa = 0.0;
  double fb = 0.0;
  for (std::size_t i = q.size(); i-- > 0;) {
    fa = fa * a + q[i] / static_cast<double>(i + 1);
    fb = fb * b + q[i] / static_cast<double>(i + 1);
  }
  return fb * b - fa * a;
}

/// \int_a^b |q(t)| dt, splitting at the real roots of q inside (a, b).
inline double poly_abs_integral(const std::vector<double>& q, double a, double b) {
  const int samples = 16 * static_cast<int>(q.size() + 1);
  std::vector<double> cuts{a};
  double t0 = a;
  double f0 = horner(q, t0);
  for (int k = 1; k <= samples; ++k) {
    const double t1 = a + (b - a) * k / samples;
    const double f1 = horner(q, t1);
    if (f1 == 0.0 && k < samples) {
      cuts.push_back(t1);
    } else if ((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0)) {
      double lo = t0;
      double hi = t1;
      double flo = f0;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = horner(q, mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      cuts.push_back(0.5 * (lo + hi));
    }
    t0 = t1;
    f0 = f1;
  }
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += std::abs(poly_integral(q, cuts[i], cuts[i + 1]));
  }
  return total;
}

}  // namespace detail

/// Finite signed measure on [-r, 0]: atoms plus an absolutely continuous part
/// given either by polynomial pieces or by samples on a uniform grid.
///
/// Sampled densities are integrated as their composite Simpson interpolant
/// (quadratic per pair of cells, one cubic 3/8 panel when the cell count is
/// odd), so every integral functional reduces to exact polynomial-times-
/// exponential integrals.
class SignedMeasure {
 public:
  SignedMeasure(double r, std::vector<Atom> atoms, std::vector<DensityPiece> density = {},
                std::optional<SampledDensity> sampled = std::nullopt)
      : r_(r), atoms_(std::move(atoms)), density_(std::move(density)), sampled_(std::move(sampled)) {
    validate();
    build_pieces();
    build_prefix();
    if (!nonzero()) throw InvalidArgument("measure is identically zero");
  }

  static SignedMeasure dirac(double u, double r = 1.0, double w = 1.0) {
    return SignedMeasure(r, {{u, w}});
  }

  static SignedMeasure sampled_density(double r, std::vector<double> values) {
    return SignedMeasure(r, {}, {}, SampledDensity{std::move(values)});
  }

  double r() const { return r_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& density_pieces() const { return density_; }
  const std::optional<SampledDensity>& sampled() const { return sampled_; }
  const std::vector<detail::LocalPiece>& local_pieces() const { return pieces_; }
  bool has_density() const { return !pieces_.empty(); }

  /// Density value at u; at a boundary shared by two pieces the mean of the
  /// one-sided values is returned.
  double density_at(double u) const {
    double sum = 0.0;
    int hits = 0;
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), u,
                               [](double x, const detail::LocalPiece& p) { return x < p.lo(); });
    auto c = it - std::min<std::ptrdiff_t>(2, it - pieces_.begin());
    for (; c != pieces_.end() && c->lo() <= u + 1e-14; ++c) {
      if (u >= c->lo() - 1e-14 && u <= c->hi + 1e-14) {
        sum += c->at(u);
        ++hits;
      }
    }
    if (hits > 0) return sum / hits;
    return 0.0;
  }

  /// Sum of atom weights with location in [-t, 0] (closed at both ends).
  double atom_tail(double t) const {
    const double cut = -t - 1e-12 * std::max(1.0, r_);
    auto it = std::lower_bound(atom_order_.begin(), atom_order_.end(), cut,
                               [&](std::size_t i, double x) { return atoms_[i].u < x; });
    const std::size_t first = static_cast<std::size_t>(it - atom_order_.begin());
    return atom_suffix_[first];
  }

  /// \int_{[-t, 0]} density(u) du.
  double density_tail(double t) const {
    if (pieces_.empty()) return 0.0;
    const double cut = -t;
    // pieces are sorted by lo; full pieces are those with lo >= cut
    auto it = std::lower_bound(pieces_.begin(), pieces_.end(), cut,
                               [](const detail::LocalPiece& p, double x) { return p.lo() < x; });
    const std::size_t first = static_cast<std::size_t>(it - pieces_.begin());
    double total = piece_suffix_[first];
    if (first > 0) {
      const auto& p = pieces_[first - 1];
      if (cut < p.hi) total += detail::poly_integral(p.q, 0.0, std::min(p.hi - cut, p.width));
    }
    return total;
  }

 private:
  void validate() const {
    if (!(r_ > 0.0) || !std::isfinite(r_)) throw InvalidArgument("delay horizon r must be positive");
    const double tol = 1e-12 * std::max(1.0, r_);
    for (const auto& a : atoms_) {
      if (!(a.u >= -r_ - tol && a.u <= tol)) throw InvalidArgument("atom location outside [-r, 0]");
      if (a.w == 0.0 || !std::isfinite(a.w)) throw InvalidArgument("atom weight must be finite and nonzero");
    }
    if (!density_.empty() && sampled_) {
      throw InvalidArgument("density pieces and sampled density are mutually exclusive");
    }
    std::vector<std::pair<double, double>> spans;
    for (const auto& p : density_) {
      if (!(p.lo < p.hi)) throw InvalidArgument("density piece needs lo < hi");
      if (p.lo < -r_ - tol || p.hi > tol) throw InvalidArgument("density piece outside [-r, 0]");
      if (p.coeffs.empty()) throw InvalidArgument("density piece has no coefficients");
      spans.emplace_back(p.lo, p.hi);
    }
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].first < spans[i - 1].second - tol) throw InvalidArgument("density pieces overlap");
    }
    if (sampled_ && sampled_->values.size() < kMinSampledPoints) {
      throw InvalidArgument("sampled density needs at least " + std::to_string(kMinSampledPoints) +
                            " points");
    }
  }

  void build_pieces() {
    for (const auto& p : density_) {
      const double hi = std::min(p.hi, 0.0);
      const double lo = std::max(p.lo, -r_);
      pieces_.push_back({hi, hi - lo, detail::reflect_shift(p.coeffs, hi)});
    }
    if (sampled_) {
      const auto& v = sampled_->values;
      const std::size_t cells = v.size() - 1;
      const double h = r_ / static_cast<double>(cells);
      auto node = [&](std::size_t i) { return -r_ + h * static_cast<double>(i); };
      std::size_t i = 0;
      const std::size_t quad_cells = (cells % 2 == 0) ? cells : cells - 3;
      const double w2 = 2.0 * h;
      while (i < quad_cells) {
        const double hi = (i + 2 == cells) ? 0.0 : node(i + 2);
        pieces_.push_back({hi, w2, detail::interpolate_monomial({0.0, h, 2.0 * h}, {v[i + 2], v[i + 1], v[i]})});
        i += 2;
      }
      if (i < cells) {
        pieces_.push_back({0.0, 3.0 * h,
                           detail::interpolate_monomial({0.0, h, 2.0 * h, 3.0 * h},
                                                        {v[i + 3], v[i + 2], v[i + 1], v[i]})});
      }
    }
    std::sort(pieces_.begin(), pieces_.end(),
              [](const detail::LocalPiece& a, const detail::LocalPiece& b) { return a.lo() < b.lo(); });
  }

  void build_prefix() {
    atom_order_.resize(atoms_.size());
    for (std::size_t i = 0; i < atoms_.size(); ++i) atom_order_[i] = i;
    std::sort(atom_order_.begin(), atom_order_.end(),
              [&](std::size_t a, std::size_t b) { return atoms_[a].u < atoms_[b].u; });
    atom_suffix_.assign(atoms_.size() + 1, 0.0);
    for (std::size_t k = atoms_.size(); k-- > 0;) atom_suffix_[k] = atom_suffix_[k + 1] + atoms_[atom_order_[k]].w;
    piece_suffix_.assign(pieces_.size() + 1, 0.0);
    for (std::size_t k = pieces_.size(); k-- > 0;) {
      piece_suffix_[k] = piece_suffix_[k + 1] + detail::poly_integral(pieces_[k].q, 0.0, pieces_[k].width);
    }
  }

  bool nonzero() const {
    if (!atoms_.empty()) return true;
    for (const auto& p : pieces_) {
      for (double c : p.q) {
        if (c != 0.0) return true;
      }
    }
    return false;
  }

  double r_;
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> density_;
  std::optional<SampledDensity> sampled_;
  std::vector<detail::LocalPiece> pieces_;
  std::vector<std::size_t> atom_order_;
  std::vector<double> atom_suffix_;
  std::vector<double> piece_suffix_;
};

/// |a|([-r, 0]).
inline double total_variation(const SignedMeasure& a) {
  double tv = 0.0;
  for (const auto& at : a.atoms()) tv += std::abs(at.w);
  for (const auto& p : a.local_pieces()) tv += detail::poly_abs_integral(p.q, 0.0, p.width);
  return tv;
}

/// a([-t, 0]).
inline double tail_mass(const SignedMeasure& a, double t) {
  const double tol = 1e-12 * std::max(1.0, a.r());
  if (!(t >= -tol && t <= a.r() + tol)) throw DomainError("tail_mass: t outside [0, r]");
  t = std::clamp(t, 0.0, a.r());
  return a.atom_tail(t) + a.density_tail(t);
}

using MomentMethod = detail::ExpIntegralMethod;

/// M_j(lambda) = \int u^j e^{lambda u} a(du) for j = 0..jmax.
inline std::vector<cplx> exp_moments(const SignedMeasure& a, cplx lambda, int jmax,
                                     MomentMethod method = MomentMethod::kAuto) {
  if (jmax < 0 || jmax > kMaxMomentOrder) throw DomainError("exp_moment: order outside [0, 16]");
  std::vector<cplx> m(static_cast<std::size_t>(jmax) + 1, cplx{0.0, 0.0});
  for (const auto& at : a.atoms()) {
    cplx e = at.w * std::exp(lambda * at.u);
    for (int j = 0; j <= jmax; ++j) {
      m[j] += e;
      e *= at.u;
    }
  }
  if (!a.has_density()) return m;

  // W_i(-lambda, width) depends only on the width, which is shared by all
  // panels of a sampled density.
  double cached_width = -1.0;
  int cached_imax = -1;
  std::vector<cplx> weights;
  std::vector<double> g;
  for (const auto& p : a.local_pieces()) {
    const int deg = static_cast<int>(p.q.size()) - 1;
    const int imax = deg + jmax;
    if (p.width != cached_width || imax > cached_imax) {
      weights = detail::power_exp_integrals(-lambda, p.width, imax, method);
      cached_width = p.width;
      cached_imax = imax;
    }
    const cplx scale = std::exp(lambda * p.hi);
    // g(t) = (hi - t)^j q(t), built up one factor at a time
    g.assign(p.q.begin(), p.q.end());
    for (int j = 0; j <= jmax; ++j) {
      cplx acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * weights[i];
      m[j] += scale * acc;
      if (j == jmax) break;
      g.push_back(0.0);
      for (std::size_t i = g.size() - 1; i > 0; --i) g[i] = p.hi * g[i] - g[i - 1];
      g[0] *= p.hi;
    }
  }
  return m;
}

inline cplx exp_moment(const SignedMeasure& a, cplx lambda, int j, MomentMethod method = MomentMethod::kAuto) {
  return exp_moments(a, lambda, j, method)[static_cast<std::size_t>(j)];
}

/// Upper bound on \int |u|^j e^{x u} |a|(du) for j in {0, 1}, piece by piece.
inline double abs_moment_bound(const SignedMeasure& a, double x, int j) {
  auto g = [&](double u) { return std::pow(std::abs(u), j) * std::exp(x * u); };
  double total = 0.0;
  for (const auto& at : a.atoms()) total += std::abs(at.w) * g(at.u);
  for (const auto& p : a.local_pieces()) {
    double peak = std::max(g(p.lo()), g(p.hi));
    if (j == 1 && x > 0.0) {
      const double crit = -1.0 / x;
      if (crit > p.lo() && crit < p.hi) peak = std::max(peak, g(crit));
    }
    total += peak * detail::poly_abs_integral(p.q, 0.0, p.width);
  }
  return total;
}

/// Bounds (A, D) with |\int e^{lambda u} a(du)| <= A + D / |lambda| for every
/// lambda with Re(lambda) >= x. The density part is bounded after one
/// integration by parts: jumps of the density (including its ends) plus the
/// variation inside each piece.
inline std::pair<double, double> exp_moment_decay_bound(const SignedMeasure& a, double x) {
  double atoms = 0.0;
  for (const auto& at : a.atoms()) atoms += std::abs(at.w) * std::exp(x * at.u);
  double dens = 0.0;
  std::vector<std::pair<double, double>> jumps;  // (u, signed boundary value)
  for (const auto& p : a.local_pieces()) {
    jumps.emplace_back(p.hi, p.q[0]);
    jumps.emplace_back(p.lo(), -detail::horner(p.q, p.width));
    std::vector<double> dq(p.q.size() > 1 ? p.q.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < p.q.size(); ++i) dq[i - 1] = static_cast<double>(i) * p.q[i];
    const double e_max = std::max(std::exp(x * p.lo()), std::exp(x * p.hi));
    dens += e_max * detail::poly_abs_integral(dq, 0.0, p.width);
  }
  std::sort(jumps.begin(), jumps.end());
  for (std::size_t i = 0; i < jumps.size();) {
    std::size_t k = i;
    double sum = 0.0;
    const double tol = 1e-12 * std::max(1.0, a.r());
    for (; k < jumps.size() && jumps[k].first - jumps[i].first <= tol; ++k) sum += jumps[k].second;
    // rounding in the stored boundary values is not a real jump
    double scale = 0.0;
    for (std::size_t t = i; t < k; ++t) scale = std::max(scale, std::abs(jumps[t].second));
    if (std::abs(sum) > 1e-12 * scale) dens += std::abs(sum) * std::exp(x * jumps[i].first);
    i = k;
  }
  return {atoms, dens};
}

}  // namespace sddelan

#endif  // SDDELAN_MEASURE_HPP
