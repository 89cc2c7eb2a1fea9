#pragma once

#include <span>
#include <vector>

namespace fdlsm {

/// Natural cubic spline through (x_i, y_i) with strictly increasing x;
/// extrapolates linearly with the end-point slopes.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;
  bool empty() const { return x_.empty(); }
  double lower() const { return x_.front(); }
  double upper() const { return x_.back(); }
  std::span<const double> knots() const { return x_; }
  std::span<const double> values() const { return y_; }

 private:
  std::size_t interval(double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

}  // namespace fdlsm
