#include "fdlsm/spline.hpp"

#include <algorithm>
#include <cmath>

#include "fdlsm/errors.hpp"

namespace fdlsm {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw ConfigError("spline: need at least two knots and matching values");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw ConfigError("spline: knots must be strictly increasing");

  m_.assign(n, 0.0);
  if (n == 2) return;
  // Tridiagonal system for interior second derivatives, natural ends.
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    const double a = h0 / 6.0, b = (h0 + h1) / 3.0, cc = h1 / 6.0;
    const double rhs = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    const double denom = b - a * c[i - 1];
    c[i] = cc / denom;
    d[i] = (rhs - a * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = d[i] - c[i] * m_[i + 1];
    if (i == 1) break;
  }
}

std::size_t CubicSpline::interval(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, x_.size() - 2);
}

double CubicSpline::operator()(double x) const {
  const std::size_t n = x_.size();
  if (x <= x_[0]) return y_[0] + derivative(x_[0]) * (x - x_[0]);
  if (x >= x_[n - 1]) return y_[n - 1] + derivative(x_[n - 1]) * (x - x_[n - 1]);
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = 1.0 - a;
  return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
  const std::size_t n = x_.size();
  const double xc = std::clamp(x, x_[0], x_[n - 1]);
  const std::size_t i = interval(xc);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - xc) / h;
  const double b = 1.0 - a;
  return (y_[i + 1] - y_[i]) / h + ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
}

}  // namespace fdlsm
