#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sroc {

struct SimplexOptions {
  /// Converged once max f - min f over the simplex drops below this.
  double f_spread_tol = 1e-8;
  int max_iter = 10000;
};

struct SimplexResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free Nelder-Mead minimization. `step` sets the initial
/// simplex edge along each coordinate.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> x0, std::span<const double> step,
                          const SimplexOptions& options = {});

}  // namespace sroc
