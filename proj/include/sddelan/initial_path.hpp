#ifndef SDDELAN_INITIAL_PATH_HPP
#define SDDELAN_INITIAL_PATH_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sddelan/error.hpp"

namespace sddelan {

/// Deterministic continuous initial segment X_0 on [-r, 0].
class InitialPath {
 public:
  enum class Kind { kZero, kConstant, kSampled };

  static InitialPath zero() { return InitialPath(Kind::kZero, 0.0, 0.0, {}); }
  static InitialPath constant(double c) { return InitialPath(Kind::kConstant, c, 0.0, {}); }

  /// Values on the uniform grid of [-r, 0], linearly interpolated.
  static InitialPath sampled(double r, std::vector<double> values) {
    if (!(r > 0.0)) throw InvalidArgument("initial path: r must be positive");
    if (values.size() < 2) throw InvalidArgument("initial path: need at least two samples");
    return InitialPath(Kind::kSampled, 0.0, r, std::move(values));
  }

  Kind kind() const { return kind_; }
  double constant_value() const { return constant_; }
  const std::vector<double>& values() const { return values_; }
  double span() const { return r_; }

  double operator()(double s) const {
    switch (kind_) {
      case Kind::kZero: return 0.0;
      case Kind::kConstant: return constant_;
      case Kind::kSampled: {
        const double h = r_ / static_cast<double>(values_.size() - 1);
        const double pos = std::clamp((s + r_) / h, 0.0, static_cast<double>(values_.size() - 1));
        const auto i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
        const double f = pos - static_cast<double>(i);
        return (1.0 - f) * values_[i] + f * values_[i + 1];
      }
    }
    return 0.0;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::kZero: return "zero";
      case Kind::kConstant: return "constant";
      case Kind::kSampled: return "sampled";
    }
    return "";
  }

 private:
  InitialPath(Kind k, double c, double r, std::vector<double> v)
      : kind_(k), constant_(c), r_(r), values_(std::move(v)) {}

  Kind kind_;
  double constant_;
  double r_;
  std::vector<double> values_;
};

}  // namespace sddelan

#endif  // SDDELAN_INITIAL_PATH_HPP
