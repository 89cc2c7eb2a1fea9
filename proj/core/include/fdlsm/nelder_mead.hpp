#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fdlsm {

struct NelderMeadOptions {
  /// Vertex i of the initial simplex is x0 + step * (|x0_i| or 1) e_i.
  double initial_step = 0.05;
  std::size_t max_evaluations = 1000;
  /// Stop when the spread of objective values across the simplex is below this.
  double tolerance = 1e-5;
  /// Rebuild the simplex around the best point after convergence, up to
  /// this many times, while it keeps improving.
  std::size_t restarts = 0;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Minimises f with the standard reflection/expansion/contraction/shrink moves.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

}  // namespace fdlsm
