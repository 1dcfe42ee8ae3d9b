#ifndef SDDELAN_INFERENCE_HPP
#define SDDELAN_INFERENCE_HPP

#include <cmath>
#include <cstddef>

#include "sddelan/error.hpp"
#include "sddelan/simulate.hpp"

namespace sddelan {

struct ScorePair {
  double delta = 0.0;
  double info = 0.0;
  double scaling = 1.0;
  double T = 0.0;
};

/// Left-point sums over the path: \int Y dX and \int Y^2 dt.
struct PathSums {
  double y_dx = 0.0;
  double y2_dt = 0.0;
};

inline PathSums path_sums(const SamplePath& p) {
  PathSums s;
  const double dt = p.grid.dt;
  for (int n = 0; n < p.grid.n_steps; ++n) {
    const double y = p.Y[static_cast<std::size_t>(n)];
    s.y_dx += y * p.dX(n);
    s.y2_dt += y * y * dt;
  }
  return s;
}

inline double log_likelihood_ratio(const SamplePath& p, double theta_num, double theta_den) {
  if (p.Y.size() != static_cast<std::size_t>(p.grid.n_steps + 1) ||
      p.X.size() != static_cast<std::size_t>(p.grid.n_delay + p.grid.n_steps + 1)) {
    throw InvalidArgument("log_likelihood_ratio: path arrays do not match the grid");
  }
  if (theta_num == theta_den) return 0.0;
  const PathSums s = path_sums(p);
  return (theta_num - theta_den) * s.y_dx - 0.5 * (theta_num * theta_num - theta_den * theta_den) * s.y2_dt;
}

/// Score and observed information at theta with dW recovered as dX - theta Y dt.
inline ScorePair score_and_info(const SamplePath& p, double theta, double scaling) {
  ScorePair out;
  out.scaling = scaling;
  out.T = p.grid.T();
  const double dt = p.grid.dt;
  double s_dw = 0.0;
  double s_y2 = 0.0;
  for (int n = 0; n < p.grid.n_steps; ++n) {
    const double y = p.Y[static_cast<std::size_t>(n)];
    s_dw += y * (p.dX(n) - theta * y * dt);
    s_y2 += y * y * dt;
  }
  out.delta = scaling * s_dw;
  out.info = scaling * scaling * s_y2;
  return out;
}

inline double mle(const SamplePath& p) {
  const PathSums s = path_sums(p);
  if (s.y2_dt <= 1e-12) throw DomainError("mle: degenerate path, Y vanishes");
  return s.y_dx / s.y2_dt;
}

}  // namespace sddelan

#endif  // SDDELAN_INFERENCE_HPP
