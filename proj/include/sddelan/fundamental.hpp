#ifndef SDDELAN_FUNDAMENTAL_HPP
#define SDDELAN_FUNDAMENTAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sddelan/error.hpp"
#include "sddelan/initial_path.hpp"
#include "sddelan/measure.hpp"
#include "sddelan/spectrum.hpp"

namespace sddelan {

/// Uniform time grid with dt = r / n_delay and T = n_steps * dt.
struct Grid {
  double dt = 0.0;
  int n_delay = 0;
  int n_steps = 0;

  double r() const { return dt * n_delay; }
  double T() const { return dt * n_steps; }
  double time(int n) const { return dt * n; }

  static Grid from_delay_nodes(double r, int n_delay, double T) {
    if (!(r > 0.0) || n_delay < 1) throw InvalidArgument("grid: need r > 0 and n_delay >= 1");
    Grid g;
    g.n_delay = n_delay;
    g.dt = r / n_delay;
    const double steps = T / g.dt;
    g.n_steps = static_cast<int>(std::llround(steps));
    if (!(T > 0.0) || std::abs(steps - g.n_steps) > 1e-9 * std::max(1.0, steps)) {
      throw InvalidArgument("grid: T must be a positive integer multiple of dt");
    }
    return g;
  }

  static Grid make(double r, double dt, double T) {
    if (!(dt > 0.0)) throw InvalidArgument("grid: dt must be positive");
    const double nd = r / dt;
    const long long n = std::llround(nd);
    if (n < 1 || std::abs(nd - static_cast<double>(n)) > 1e-9 * std::max(1.0, nd)) {
      throw InvalidArgument("grid: r / dt must be an integer");
    }
    return from_delay_nodes(r, static_cast<int>(n), T);
  }
};

/// Discretization of the delay functional \int x(t + u) a(du) on a grid:
/// atoms read the path at t + u (snapped to a node when within 1e-12,
/// otherwise linear interpolation), the density part is the trapezoid rule
/// over the nodes of [-r, 0].
///
/// Paths are addressed by time index i in [-n_delay, N], stored at
/// offset i + n_delay.
class DelayOperator {
 public:
  DelayOperator(const SignedMeasure& a, const Grid& g) : nd_(g.n_delay), dt_(g.dt) {
    if (std::abs(g.r() - a.r()) > 1e-9 * a.r()) throw InvalidArgument("grid delay does not match the measure");
    for (const auto& at : a.atoms()) {
      const double pos = std::clamp(-at.u / dt_, 0.0, static_cast<double>(nd_));
      const double k = std::round(pos);
      if (std::abs(pos - k) * dt_ <= 1e-12) {
        taps_.push_back({static_cast<int>(k), 0.0, at.w});
      } else {
        const double up = std::ceil(pos);
        taps_.push_back({static_cast<int>(up), up - pos, at.w});
      }
    }
    if (a.has_density()) {
      node_density_.resize(static_cast<std::size_t>(nd_) + 1);
      weights_.resize(static_cast<std::size_t>(nd_) + 1);
      for (int k = 0; k <= nd_; ++k) {
        const double d = a.density_at(-k * dt_);
        node_density_[k] = d;
        weights_[k] = d * dt_ * ((k == 0 || k == nd_) ? 0.5 : 1.0);
      }
    }
    for (const auto& t : taps_) {
      if (t.offset == 0) coef_now_ += t.w;
      if (t.offset == 1 && t.frac > 0.0) coef_now_ += t.w * t.frac;
    }
    if (!weights_.empty()) coef_now_ += weights_[0];
  }

  int n_delay() const { return nd_; }

  /// Coefficient of x(t) in the functional at time t.
  double coefficient_now() const { return coef_now_; }

  /// Functional at time index n for a path continuous at 0.
  double apply(std::span<const double> x, int n) const {
    const std::size_t base = static_cast<std::size_t>(n + nd_);
    double acc = 0.0;
    for (const auto& t : taps_) {
      const std::size_t i = base - static_cast<std::size_t>(t.offset);
      acc += t.frac == 0.0 ? t.w * x[i] : t.w * ((1.0 - t.frac) * x[i] + t.frac * x[i + 1]);
    }
    for (std::size_t k = 0; k < weights_.size(); ++k) acc += weights_[k] * x[base - k];
    return acc;
  }

  /// Functional at time index n for the fundamental solution, which is 0 on
  /// [-r, 0) and 1 at 0. `right_limit` selects the value at a time where an
  /// atom reads exactly the jump.
  double apply_fundamental(std::span<const double> x, int n, bool right_limit) const {
    const std::size_t base = static_cast<std::size_t>(n + nd_);
    double acc = 0.0;
    for (const auto& t : taps_) {
      const int i = n - t.offset;
      if (t.frac == 0.0) {
        if (i > 0 || (i == 0 && right_limit)) acc += t.w * x[base - static_cast<std::size_t>(t.offset)];
      } else if (i >= 0) {
        const std::size_t j = base - static_cast<std::size_t>(t.offset);
        acc += t.w * ((1.0 - t.frac) * x[j] + t.frac * x[j + 1]);
      }
    }
    if (!weights_.empty()) {
      const int kmax = std::min(n, nd_);
      for (int k = 0; k <= kmax; ++k) acc += weights_[k] * x[base - static_cast<std::size_t>(k)];
      // the cell left of time 0 sees x = 0, not the jump value
      if (n < nd_) acc -= 0.5 * node_density_[n] * dt_ * x[static_cast<std::size_t>(nd_)];
    }
    return acc;
  }

 private:
  struct Tap {
    int offset;
    double frac;  // weight of the node at index n - offset + 1
    double w;
  };

  int nd_;
  double dt_;
  std::vector<Tap> taps_;
  std::vector<double> node_density_;
  std::vector<double> weights_;
  double coef_now_ = 0.0;
};

/// Fundamental solution x_0 on [-r, T] and the kernel y on [0, T].
struct Kernel {
  Grid grid;
  std::vector<double> x;       // index i + n_delay, i in [-n_delay, N]
  std::vector<double> y;       // right-continuous values at t_n
  std::vector<double> y_left;  // left limits at t_n (differ only at jumps)

  double x_at(int i) const { return x[static_cast<std::size_t>(i + grid.n_delay)]; }
};

/// Method of steps with a Heun predictor-corrector; the delay functional
/// is affine in the newest node, so the corrector needs one evaluation.
inline Kernel solve_fundamental(double theta, const SignedMeasure& a, const Grid& grid) {
  const DelayOperator op(a, grid);
  const int nd = grid.n_delay;
  const int N = grid.n_steps;
  Kernel k;
  k.grid = grid;
  k.x.assign(static_cast<std::size_t>(nd + N + 1), 0.0);
  k.y.assign(static_cast<std::size_t>(N + 1), 0.0);
  k.y_left.assign(static_cast<std::size_t>(N + 1), 0.0);
  k.x[static_cast<std::size_t>(nd)] = 1.0;
  const double dt = grid.dt;
  const double kappa = op.coefficient_now();

  double f_now = op.apply_fundamental(k.x, 0, true);
  k.y[0] = f_now;
  k.y_left[0] = op.apply_fundamental(k.x, 0, false);
  for (int n = 0; n < N; ++n) {
    const std::size_t next = static_cast<std::size_t>(n + 1 + nd);
    k.x[next] = 0.0;
    // the step integral sees the left limit at t_{n+1}; a jump there
    // belongs to the next step
    const double partial = op.apply_fundamental(k.x, n + 1, false);
    const double x_now = k.x[next - 1];
    const double pred = x_now + dt * theta * f_now;
    const double x_next = x_now + 0.5 * dt * theta * (f_now + partial + kappa * pred);
    k.x[next] = x_next;
    k.y_left[static_cast<std::size_t>(n + 1)] = partial + kappa * x_next;
    f_now = n + 1 <= nd ? op.apply_fundamental(k.x, n + 1, true) : k.y_left[static_cast<std::size_t>(n + 1)];
    k.y[static_cast<std::size_t>(n + 1)] = f_now;
  }
  return k;
}

/// y(t) = \int x_0(t + u) a(du) on the kernel's grid.
inline std::vector<double> y_kernel(const SignedMeasure& a, const Kernel& kernel) {
  const DelayOperator op(a, kernel.grid);
  std::vector<double> y(static_cast<std::size_t>(kernel.grid.n_steps + 1));
  for (int n = 0; n <= kernel.grid.n_steps; ++n) y[n] = op.apply_fundamental(kernel.x, n, true);
  return y;
}

/// Sum of p_{theta,lambda}(t) e^{lambda t} over the given roots (real part;
/// conjugate pairs cancel the imaginary parts).
inline double residue_expansion_eval(const std::vector<CharRoot>& roots, double t) {
  cplx acc = 0.0;
  for (const auto& rt : roots) {
    if (rt.p_poly.empty()) throw InvalidArgument("residue_expansion_eval: root data not built");
    cplx p = 0.0;
    for (std::size_t l = rt.p_poly.size(); l-- > 0;) p = p * t + rt.p_poly[l];
    acc += p * std::exp(rt.lambda * t);
  }
  return acc.real();
}

/// \int_0^r a([-t, 0])^2 dt, exact on every interval where the tail mass is
/// polynomial.
inline double fisher_theta0(const SignedMeasure& a) {
  const double tv = total_variation(a);
  if (std::abs(tail_mass(a, a.r())) > 1e-12 * std::max(1.0, tv)) {
    throw DomainError("fisher_theta0: requires a([-r, 0]) = 0");
  }
  std::vector<double> cuts{0.0, a.r()};
  for (const auto& at : a.atoms()) cuts.push_back(-at.u);
  for (const auto& p : a.local_pieces()) {
    cuts.push_back(-p.hi);
    cuts.push_back(-p.lo());
  }
  std::sort(cuts.begin(), cuts.end());
  int deg = 0;
  for (const auto& p : a.local_pieces()) deg = std::max(deg, static_cast<int>(p.q.size()));
  const auto& rule = detail::gauss_legendre(std::max(2, deg + 2));
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::clamp(cuts[i], 0.0, a.r());
    const double hi = std::clamp(cuts[i + 1], 0.0, a.r());
    if (hi - lo <= 1e-15 * a.r()) continue;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = lo + 0.5 * (hi - lo) * (rule.nodes[k] + 1.0);
      const double m = tail_mass(a, t);
      total += 0.5 * (hi - lo) * rule.weights[k] * m * m;
    }
  }
  return total;
}

struct FisherOptions {
  double dt_target = 1e-3;
  double tail_tol = 1e-10;
  int max_steps = 50'000'000;
};

/// J = \int_0^\infty y(t)^2 dt for a LAN parameter (v* < 0). The horizon is
/// extended until C^2 e^{2cT} / (2|c|) < tail_tol with c = v*/2 and C fitted
/// on the second half of the computed kernel.
inline double fisher_limit(double theta, const SignedMeasure& a, const RegimeReport& report,
                           const FisherOptions& opts = {}) {
  if (!(report.v_star < 0.0)) throw DomainError("information diverges: v* >= 0");
  if (theta == 0.0) return fisher_theta0(a);
  const double r = a.r();
  const double c = std::isfinite(report.v_star) ? 0.5 * report.v_star : -5.0 / r;
  const int nd = std::max(1, static_cast<int>(std::ceil(r / opts.dt_target)));
  const double dt = r / nd;

  auto horizon_steps = [&](double T) { return static_cast<long long>(std::ceil(T / dt)); };
  double T = std::max(20.0 * r, 10.0 / std::abs(c));
  for (int round = 0; round < 8; ++round) {
    const long long steps = horizon_steps(T);
    if (steps > opts.max_steps) throw NumericalError("fisher_limit: horizon exceeds step budget");
    const Grid g = Grid::from_delay_nodes(r, nd, static_cast<double>(steps) * dt);
    const Kernel k = solve_fundamental(theta, a, g);
    double C = 0.0;
    for (int n = g.n_steps / 2; n <= g.n_steps; ++n) {
      C = std::max(C, std::abs(k.y[n]) * std::exp(-c * g.time(n)));
    }
    const double tail = C * C * std::exp(2.0 * c * g.T()) / (2.0 * std::abs(c));
    if (tail < opts.tail_tol) {
      double J = 0.0;
      for (int n = 0; n < g.n_steps; ++n) {
        J += 0.5 * dt * (k.y[n] * k.y[n] + k.y_left[n + 1] * k.y_left[n + 1]);
      }
      return J;
    }
    const double needed = std::log(C * C / (2.0 * std::abs(c) * opts.tail_tol)) / (-2.0 * c);
    T = std::max(1.5 * T, 1.1 * needed);
  }
  throw NumericalError("fisher_limit: tail bound not reached");
}

inline double fisher_limit(double theta, const SignedMeasure& a, const FisherOptions& opts = {}) {
  return fisher_limit(theta, a, classify(theta, a), opts);
}

/// I(t) = \int_{[-r,0]} \int_u^0 y(t + u - s) X_0(s) ds a(du) at time index
/// n >= n_delay, trapezoid in s on the grid and the delay quadrature in u.
inline double initial_path_functional(const SignedMeasure& a, const Grid& grid, std::span<const double> y,
                                      const InitialPath& x0, int n) {
  const double dt = grid.dt;
  const int nd = grid.n_delay;
  auto inner = [&](int ku) {
    // u = -ku dt, s from u to 0 on nodes s = -j dt, j = 0..ku
    double acc = 0.0;
    for (int j = 0; j <= ku; ++j) {
      const double w = (j == 0 || j == ku) ? 0.5 : 1.0;
      const int idx = n - ku + j;  // t + u - s
      acc += w * y[static_cast<std::size_t>(idx)] * x0(-j * dt);
    }
    return acc * dt;
  };
  double total = 0.0;
  for (const auto& at : a.atoms()) {
    const int ku = static_cast<int>(std::llround(-at.u / dt));
    if (ku > 0) total += at.w * inner(ku);
  }
  if (a.has_density()) {
    for (int k = 1; k <= nd; ++k) {
      const double w = (k == nd) ? 0.5 : 1.0;
      total += w * dt * a.density_at(-k * dt) * inner(k);
    }
  }
  return total;
}

}  // namespace sddelan

#endif  // SDDELAN_FUNDAMENTAL_HPP
