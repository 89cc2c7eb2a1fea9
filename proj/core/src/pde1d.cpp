#include "fdlsm/pde1d.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "fdlsm/errors.hpp"
#include "fdlsm/spline.hpp"

namespace fdlsm {

void PdeSpec::validate() const {
  if (!vol) throw ConfigError("pde: volatility function is required");
  if (!terminal) throw ConfigError("pde: terminal payoff is required");
  if (dates.empty()) throw ConfigError("pde: at least one date (the maturity) is required");
  if (!(dates.front() > 0.0)) throw ConfigError("pde: dates must be positive");
  for (std::size_t k = 1; k < dates.size(); ++k)
    if (!(dates[k] > dates[k - 1])) throw ConfigError("pde: dates must be strictly increasing");
  if (!std::isfinite(rate)) throw ConfigError("pde: rate must be finite");
  if (!(spot0 > 0.0)) throw ConfigError("pde: spot must be positive");
}

double PdeGrid::spot(std::size_t j) const { return std::exp(x(j)); }

std::vector<double> PdeGrid::spots() const {
  std::vector<double> s(n_);
  for (std::size_t j = 0; j < n_; ++j) s[j] = spot(j);
  return s;
}

PdeGrid PdeGrid::make(const PdeSpec& spec, const PdeGridOptions& options) {
  spec.validate();
  if (options.nodes < 5) throw ConfigError("pde grid: at least 5 nodes are required");
  if (!(options.n_sd > 0.0)) throw ConfigError("pde grid: n_sd must be positive");
  if (!(options.max_step > 0.0)) throw ConfigError("pde grid: max_step must be positive");

  const double maturity = spec.maturity();
  double ref = options.ref_vol;
  if (ref <= 0.0) {
    // Largest vol over time and a band of spots around S(0).
    for (int it = 0; it <= 20; ++it) {
      const double t = maturity * it / 20.0;
      for (int is = -4; is <= 4; ++is) {
        const double v = spec.vol(spec.spot0 * std::exp(0.25 * is), t);
        if (!std::isfinite(v) || v <= 0.0) throw ConfigError("pde grid: volatility must be positive and finite");
        ref = std::max(ref, v);
      }
    }
  }

  PdeGrid g;
  g.n_ = options.nodes;
  g.max_step_ = options.max_step;
  g.rannacher_ = options.rannacher_steps;
  const double half_width = options.n_sd * ref * std::sqrt(maturity);
  g.dx_ = 2.0 * half_width / static_cast<double>(g.n_ - 1);
  g.x_min_ = std::log(spec.spot0) - half_width;
  if (options.anchor > 0.0) {
    const double off = (std::log(options.anchor) - g.x_min_) / g.dx_;
    g.x_min_ += (off - std::round(off)) * g.dx_;
  }
  return g;
}

BoundaryRule boundary_conditions(const PdeSpec&, const PdeGrid&) { return BoundaryRule::Linearity; }

double linearity_residual(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n < 3) return 0.0;
  return std::max(std::abs(v[0] - 2.0 * v[1] + v[2]), std::abs(v[n - 1] - 2.0 * v[n - 2] + v[n - 3]));
}

double PdeSolution::value_at(double spot) const {
  const CubicSpline s(grid.spots(), initial);
  return s(spot);
}

namespace {

class Stepper {
 public:
  Stepper(const PdeSpec& spec, const PdeGrid& grid)
      : spec_(spec), grid_(grid), n_(grid.size()), s_(grid.spots()),
        lo_(n_), di_(n_), up_(n_), rhs_(n_), c_(n_), w_(n_) {}

  // V(t - h) from V(t), theta = 1 implicit, 0.5 Crank-Nicolson.
  void step(std::vector<double>& v, double t, double h, double theta) {
    const double tm = t - 0.5 * h;
    const double dx = grid_.dx();
    const double inv_dx2 = 1.0 / (dx * dx);
    const double inv_2dx = 0.5 / dx;
    for (std::size_t j = 1; j + 1 < n_; ++j) {
      const double sig = spec_.vol(s_[j], tm);
      const double q = spec_.dividend ? spec_.dividend(s_[j], tm) : 0.0;
      const double a = 0.5 * sig * sig;
      const double b = spec_.rate - q - a;
      lo_[j] = a * inv_dx2 - b * inv_2dx;
      di_[j] = -2.0 * a * inv_dx2;
      up_[j] = a * inv_dx2 + b * inv_2dx;
    }

    const double ex = (1.0 - theta) * h;
    for (std::size_t j = 1; j + 1 < n_; ++j)
      rhs_[j] = v[j] + ex * (lo_[j] * v[j - 1] + di_[j] * v[j] + up_[j] * v[j + 1]);

    // Implicit rows with W_0 = 2W_1 - W_2 and W_{N-1} = 2W_{N-2} - W_{N-3} folded in.
    const double im = theta * h;
    const std::size_t last = n_ - 2;
    auto row = [&](std::size_t j, double& a, double& b, double& c) {
      a = -im * lo_[j];
      b = 1.0 - im * di_[j];
      c = -im * up_[j];
      if (j == 1) {
        b += 2.0 * a;
        c -= a;
        a = 0.0;
      }
      if (j == last) {
        a -= c;
        b += 2.0 * c;
        c = 0.0;
      }
    };

    double a, b, c;
    row(1, a, b, c);
    double den = b;
    check_pivot(den, h, 1);
    c_[1] = c / den;
    w_[1] = rhs_[1] / den;
    for (std::size_t j = 2; j <= last; ++j) {
      row(j, a, b, c);
      den = b - a * c_[j - 1];
      check_pivot(den, h, j);
      c_[j] = c / den;
      w_[j] = (rhs_[j] - a * w_[j - 1]) / den;
    }
    for (std::size_t j = last - 1; j >= 1; --j) {
      w_[j] -= c_[j] * w_[j + 1];
      if (j == 1) break;
    }
    w_[0] = 2.0 * w_[1] - w_[2];
    w_[n_ - 1] = 2.0 * w_[last] - w_[last - 1];

    // The reaction term -rV is constant in S and t and commutes with the
    // spatial operator, so it is applied as an exact discount factor.
    const double df = std::exp(-spec_.rate * h);
    for (std::size_t j = 0; j < n_; ++j) v[j] = df * w_[j];
  }

 private:
  void check_pivot(double den, double h, std::size_t j) const {
    if (std::isfinite(den) && std::abs(den) > 1e-13) return;
    std::ostringstream os;
    os << "pde: tridiagonal solve broke down at row " << j << " (pivot " << den << ", N_x " << n_
       << ", dx " << grid_.dx() << ", dt " << h << ")";
    throw NumericalError(os.str());
  }

  const PdeSpec& spec_;
  const PdeGrid& grid_;
  std::size_t n_;
  std::vector<double> s_;
  std::vector<double> lo_, di_, up_, rhs_, c_, w_;
};

}  // namespace

PdeSolution solve_backward(const PdeSpec& spec, const PdeGrid& grid) {
  spec.validate();
  const std::size_t n = grid.size();
  const std::size_t m = spec.dates.size();
  const std::vector<double> s = grid.spots();

  PdeSolution out;
  out.grid = grid;
  out.dates = spec.dates;
  out.slices.resize(m);
  out.after.resize(m - 1);

  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = spec.terminal(s[j]);
  out.slices[m - 1] = v;

  Stepper stepper(spec, grid);
  bool restart = true;
  for (std::size_t k = m; k >= 1; --k) {
    const double t_hi = spec.dates[k - 1];
    const double t_lo = k >= 2 ? spec.dates[k - 2] : 0.0;
    const auto steps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil((t_hi - t_lo) / grid.max_step() - 1e-9)));
    const double h = (t_hi - t_lo) / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      const double t = t_hi - static_cast<double>(i) * h;
      if (i == 0 && restart && grid.rannacher_steps() > 0) {
        const std::size_t sub = grid.rannacher_steps();
        const double hs = h / static_cast<double>(sub);
        for (std::size_t r = 0; r < sub; ++r) stepper.step(v, t - static_cast<double>(r) * hs, hs, 1.0);
      } else {
        stepper.step(v, t, h, 0.5);
      }
    }
    restart = false;
    if (k == 1) break;

    const std::size_t date = k - 1;
    out.slices[date - 1] = v;
    if (spec.obstacle) {
      for (std::size_t j = 0; j < n; ++j) {
        const double c = spec.coupon ? spec.coupon(s[j], date) : 0.0;
        const double z = spec.obstacle(s[j], date) - c;
        v[j] = c + (spec.side == ExerciseSide::Holder ? std::max(z, v[j]) : std::min(z, v[j]));
      }
      restart = true;
    } else if (spec.coupon) {
      for (std::size_t j = 0; j < n; ++j) v[j] += spec.coupon(s[j], date);
      restart = true;
    }
    out.after[date - 1] = v;
  }
  out.initial = v;
  for (double x : out.initial)
    if (!std::isfinite(x)) throw NumericalError("pde: non-finite value in solution");
  return out;
}

void write_slices_csv(const PdeSolution& solution, std::ostream& out) {
  out << "t,S,value\n";
  out.precision(12);
  const auto s = solution.grid.spots();
  for (std::size_t k = 1; k <= solution.slices.size(); ++k)
    for (std::size_t j = 0; j < s.size(); ++j)
      out << solution.dates[k - 1] << ',' << s[j] << ',' << solution.slices[k - 1][j] << '\n';
}

}  // namespace fdlsm
