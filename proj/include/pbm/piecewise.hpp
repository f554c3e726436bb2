#pragma once

#include <cmath>
#include <initializer_list>
#include <utility>
#include <vector>

#include "pbm/errors.hpp"

namespace pbm {

namespace detail {
inline bool all_finite(double v) { return std::isfinite(v); }
template <class M>
bool all_finite(const M& m) {
  return m.allFinite();
}
}  // namespace detail

/// Piecewise-constant function of time. Segment k holds `values[k]` on
/// [starts[k], starts[k+1]); the last segment extends to infinity.
template <class T>
class Piecewise {
 public:
  Piecewise(std::vector<double> starts, std::vector<T> values)
      : starts_(std::move(starts)), values_(std::move(values)) {
    if (starts_.empty() || starts_.size() != values_.size())
      throw ValidationError("piecewise: need one start time per value");
    if (starts_.front() != 0.0)
      throw ValidationError("piecewise: first segment must start at t = 0");
    for (std::size_t k = 1; k < starts_.size(); ++k)
      if (!(starts_[k] > starts_[k - 1]) || !std::isfinite(starts_[k]))
        throw ValidationError("piecewise: start times must be finite and increasing");
    for (const T& v : values_)
      if (!detail::all_finite(v)) throw ValidationError("piecewise: non-finite value");
  }

  static Piecewise constant(T value) { return Piecewise({0.0}, {std::move(value)}); }

  const T& value(double t) const {
    std::size_t k = starts_.size() - 1;
    while (k > 0 && t < starts_[k]) --k;
    return values_[k];
  }

  std::size_t segments() const { return values_.size(); }
  const std::vector<double>& starts() const { return starts_; }
  const std::vector<T>& values() const { return values_; }

  /// Discontinuity times in (0, t_max).
  std::vector<double> breakpoints(double t_max) const {
    std::vector<double> out;
    for (std::size_t k = 1; k < starts_.size(); ++k)
      if (starts_[k] < t_max) out.push_back(starts_[k]);
    return out;
  }

 private:
  std::vector<double> starts_;
  std::vector<T> values_;
};

}  // namespace pbm
