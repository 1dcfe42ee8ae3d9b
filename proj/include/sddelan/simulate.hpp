#ifndef SDDELAN_SIMULATE_HPP
#define SDDELAN_SIMULATE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sddelan/error.hpp"
#include "sddelan/fundamental.hpp"
#include "sddelan/initial_path.hpp"
#include "sddelan/measure.hpp"
#include "sddelan/rng.hpp"

namespace sddelan {

struct SamplePath {
  Grid grid;
  std::vector<double> W;  // W(t_n), n = 0..N
  std::vector<double> X;  // X(t_i), i = -n_delay..N, stored at i + n_delay
  std::vector<double> Y;  // Y(t_n), n = 0..N
  double theta_true = 0.0;
  std::uint64_t seed = 0;

  double x_at(int i) const { return X[static_cast<std::size_t>(i + grid.n_delay)]; }
  double dW(int n) const { return W[static_cast<std::size_t>(n + 1)] - W[static_cast<std::size_t>(n)]; }
  double dX(int n) const { return x_at(n + 1) - x_at(n); }
};

/// Brownian increments of N(0, dt) for steps 0..N-1; step k always uses
/// draw k of stream 0 under `seed`.
inline std::vector<double> brownian_increments(std::uint64_t seed, const Grid& grid) {
  NormalStream rng(seed, 0);
  std::vector<double> dw(static_cast<std::size_t>(grid.n_steps));
  const double s = std::sqrt(grid.dt);
  for (double& v : dw) v = s * rng.next();
  return dw;
}

/// Euler-Maruyama driven by given increments (all zero switches the noise off).
inline SamplePath simulate_with_increments(double theta, const SignedMeasure& a, const InitialPath& x0,
                                           const Grid& grid, const std::vector<double>& dw) {
  if (dw.size() != static_cast<std::size_t>(grid.n_steps)) throw InvalidArgument("simulate: increment count mismatch");
  if (x0.kind() == InitialPath::Kind::kSampled && std::abs(x0.span() - a.r()) > 1e-9 * a.r()) {
    throw InvalidArgument("simulate: initial path span differs from the measure's r");
  }
  const DelayOperator op(a, grid);
  const int nd = grid.n_delay;
  const int N = grid.n_steps;
  SamplePath p;
  p.grid = grid;
  p.theta_true = theta;
  p.X.resize(static_cast<std::size_t>(nd + N + 1));
  p.W.assign(static_cast<std::size_t>(N + 1), 0.0);
  p.Y.resize(static_cast<std::size_t>(N + 1));
  for (int i = -nd; i <= 0; ++i) p.X[static_cast<std::size_t>(i + nd)] = x0(i * grid.dt);
  for (int n = 0; n < N; ++n) {
    const double y = op.apply(p.X, n);
    p.Y[static_cast<std::size_t>(n)] = y;
    const std::size_t i = static_cast<std::size_t>(n + nd);
    p.X[i + 1] = p.X[i] + theta * y * grid.dt + dw[static_cast<std::size_t>(n)];
    p.W[static_cast<std::size_t>(n + 1)] = p.W[static_cast<std::size_t>(n)] + dw[static_cast<std::size_t>(n)];
  }
  p.Y[static_cast<std::size_t>(N)] = op.apply(p.X, N);
  return p;
}

inline SamplePath simulate(double theta, const SignedMeasure& a, const InitialPath& x0, const Grid& grid,
                           std::uint64_t seed, bool noise = true) {
  SamplePath p = simulate_with_increments(
      theta, a, x0, grid,
      noise ? brownian_increments(seed, grid) : std::vector<double>(static_cast<std::size_t>(grid.n_steps), 0.0));
  p.seed = seed;
  return p;
}

/// Delay functional of a path stored as for SamplePath::X.
inline std::vector<double> y_process(const std::vector<double>& X, const SignedMeasure& a, const Grid& grid) {
  if (X.size() != static_cast<std::size_t>(grid.n_delay + grid.n_steps + 1)) {
    throw InvalidArgument("y_process: path does not cover [-r, T]");
  }
  const DelayOperator op(a, grid);
  std::vector<double> y(static_cast<std::size_t>(grid.n_steps + 1));
  for (int n = 0; n <= grid.n_steps; ++n) y[static_cast<std::size_t>(n)] = op.apply(X, n);
  return y;
}

}  // namespace sddelan

#endif  // SDDELAN_SIMULATE_HPP
