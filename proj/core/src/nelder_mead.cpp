#include "fdlsm/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fdlsm/errors.hpp"

namespace fdlsm {

namespace {

struct Simplex {
  std::vector<std::vector<double>> pts;
  std::vector<double> val;
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                             const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0) throw ConfigError("nelder-mead: empty parameter vector");
  constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return f(x);
  };

  std::vector<double> start = std::move(x0);
  double best_prev = eval(start);
  res.x = start;
  res.value = best_prev;

  for (std::size_t round = 0; round <= options.restarts; ++round) {
    Simplex s;
    s.pts.push_back(start);
    s.val.push_back(round == 0 ? best_prev : res.value);
    for (std::size_t i = 0; i < n && res.evaluations < options.max_evaluations; ++i) {
      std::vector<double> p = start;
      p[i] += options.initial_step * (p[i] != 0.0 ? std::abs(p[i]) : 1.0);
      s.val.push_back(eval(p));
      s.pts.push_back(std::move(p));
    }
    if (s.pts.size() < n + 1) break;

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    bool converged = false;
    while (res.evaluations < options.max_evaluations) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.val[a] < s.val[b]; });
      const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
      if (std::abs(s.val[worst] - s.val[best]) <= options.tolerance) {
        converged = true;
        break;
      }
      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i <= n; ++i)
        if (i != worst)
          for (std::size_t j = 0; j < n; ++j) centroid[j] += s.pts[i][j] / static_cast<double>(n);

      for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - s.pts[worst][j]);
      const double fr = eval(xr);
      if (fr < s.val[best]) {
        for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
        const double fe = eval(xe);
        if (fe < fr) {
          s.pts[worst] = xe;
          s.val[worst] = fe;
        } else {
          s.pts[worst] = xr;
          s.val[worst] = fr;
        }
        continue;
      }
      if (fr < s.val[second]) {
        s.pts[worst] = xr;
        s.val[worst] = fr;
        continue;
      }
      const bool outside = fr < s.val[worst];
      for (std::size_t j = 0; j < n; ++j)
        xc[j] = outside ? centroid[j] + rho * (xr[j] - centroid[j])
                        : centroid[j] + rho * (s.pts[worst][j] - centroid[j]);
      const double fc = eval(xc);
      if (fc < (outside ? fr : s.val[worst])) {
        s.pts[worst] = xc;
        s.val[worst] = fc;
        continue;
      }
      for (std::size_t i = 0; i <= n && res.evaluations < options.max_evaluations; ++i) {
        if (i == best) continue;
        for (std::size_t j = 0; j < n; ++j) s.pts[i][j] = s.pts[best][j] + sigma * (s.pts[i][j] - s.pts[best][j]);
        s.val[i] = eval(s.pts[i]);
      }
    }

    const auto it = std::min_element(s.val.begin(), s.val.end());
    const std::size_t b = static_cast<std::size_t>(it - s.val.begin());
    const bool improved = *it < res.value - options.tolerance;
    if (*it < res.value) {
      res.value = *it;
      res.x = s.pts[b];
    }
    res.converged = converged;
    if (!converged || (round > 0 && !improved)) break;
    start = res.x;
  }
  return res;
}

}  // namespace fdlsm
