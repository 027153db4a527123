#pragma once

// Derivative-free minimizers for small smooth problems.

#include <functional>
#include <vector>

namespace dressed {

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  /// Initial simplex edge per coordinate.
  double initial_step = 0.1;
  /// Stop when the spread of simplex values falls below this.
  double f_tol = 1e-12;
  double x_tol = 1e-10;
  int max_evaluations = 20000;
};

MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                           const NelderMeadOptions& options = {});

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of a unimodal f on [a, b].
ScalarMinimum golden_section(const std::function<double(double)>& f, double a, double b, double x_tol = 1e-10,
                             int max_iterations = 200);

} // namespace dressed
