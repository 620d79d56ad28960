#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "mixiso/error.hpp"

namespace mixiso {

/// Continuous piecewise-linear function given by its values at strictly
/// increasing breakpoints, linear in between.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;

  PiecewiseLinear(std::vector<double> breakpoints, std::vector<double> values)
      : x_(std::move(breakpoints)), y_(std::move(values)) {
    if (x_.size() != y_.size() || x_.size() < 2)
      throw Error(ErrorKind::BadParam, "piecewise-linear function needs >= 2 matching breakpoints");
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1])) throw Error(ErrorKind::BadParam, "breakpoints must be strictly increasing");
  }

  const std::vector<double>& breakpoints() const noexcept { return x_; }
  const std::vector<double>& values() const noexcept { return y_; }
  double lower() const noexcept { return x_.front(); }
  double upper() const noexcept { return x_.back(); }

  double operator()(double t) const {
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    const auto i = static_cast<std::size_t>(it - x_.begin());
    const double x0 = x_[i - 1], x1 = x_[i];
    const double w = (t - x0) / (x1 - x0);
    return y_[i - 1] + w * (y_[i] - y_[i - 1]);
  }

  /// Exact integral over [a, b] (trapezoid rule is exact on each linear piece).
  double integral(double a, double b) const {
    a = std::max(a, x_.front());
    b = std::min(b, x_.back());
    if (!(b > a)) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      const double lo = std::max(a, x_[i]);
      const double hi = std::min(b, x_[i + 1]);
      if (hi <= lo) continue;
      s += 0.5 * (hi - lo) * ((*this)(lo) + (*this)(hi));
    }
    return s;
  }

  /// Returns a copy with an extra breakpoint at t (no-op if already present).
  PiecewiseLinear with_breakpoint(double t) const {
    if (t <= x_.front() || t >= x_.back()) return *this;
    auto it = std::lower_bound(x_.begin(), x_.end(), t);
    if (it != x_.end() && *it == t) return *this;
    const double value = (*this)(t);
    const auto pos = it - x_.begin();
    auto x = x_;
    auto y = y_;
    x.insert(x.begin() + pos, t);
    y.insert(y.begin() + pos, value);
    return PiecewiseLinear(std::move(x), std::move(y));
  }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

/// Right-continuous step function: value v_i on [b_i, b_{i+1}).
class StepFunction {
 public:
  StepFunction() = default;

  StepFunction(std::vector<double> breakpoints, std::vector<double> values)
      : b_(std::move(breakpoints)), v_(std::move(values)) {
    if (b_.size() != v_.size() + 1 || v_.empty())
      throw Error(ErrorKind::BadParam, "step function needs one more breakpoint than values");
    for (std::size_t i = 1; i < b_.size(); ++i)
      if (!(b_[i] > b_[i - 1])) throw Error(ErrorKind::BadParam, "breakpoints must be strictly increasing");
  }

  const std::vector<double>& breakpoints() const noexcept { return b_; }
  const std::vector<double>& values() const noexcept { return v_; }
  std::size_t pieces() const noexcept { return v_.size(); }
  double lower() const noexcept { return b_.front(); }
  double upper() const noexcept { return b_.back(); }

  double operator()(double x) const {
    if (x < b_.front()) return v_.front();
    const auto it = std::upper_bound(b_.begin(), b_.end(), x);
    auto i = static_cast<std::size_t>(it - b_.begin());
    if (i == 0) i = 1;
    return v_[std::min(i - 1, v_.size() - 1)];
  }

  double integral(double a, double b) const {
    double s = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      const double lo = std::max(a, b_[i]);
      const double hi = std::min(b, b_[i + 1]);
      if (hi > lo) s += (hi - lo) * v_[i];
    }
    return s;
  }

 private:
  std::vector<double> b_;
  std::vector<double> v_;
};

}  // namespace mixiso
