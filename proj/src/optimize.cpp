#include "dressed/optimize.hpp"

#include "dressed/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dressed {

MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                           const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0) {
    throw ConfigError("nelder_mead: empty starting point");
  }
  MinimizeResult out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1][i] += options.initial_step;
  }
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    values[i] = eval(simplex[i]);
  }
  std::vector<std::size_t> order(n + 1);

  auto affine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) {
      r[k] = a[k] + t * (b[k] - a[k]);
    }
    return r;
  };

  while (out.evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double x_spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        x_spread = std::max(x_spread, std::abs(simplex[i][k] - simplex[best][k]));
      }
    }
    if (values[worst] - values[best] <= options.f_tol || x_spread <= options.x_tol) {
      out.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) {
        continue;
      }
      for (std::size_t k = 0; k < n; ++k) {
        centroid[k] += simplex[i][k] / static_cast<double>(n);
      }
    }
    const auto reflected = affine(centroid, simplex[worst], -1.0);
    const double fr = eval(reflected);
    if (fr < values[best]) {
      const auto expanded = affine(centroid, simplex[worst], -2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
    } else {
      const bool outside = fr < values[worst];
      const auto contracted = affine(centroid, outside ? reflected : simplex[worst], 0.5);
      const double fc = eval(contracted);
      if (fc < (outside ? fr : values[worst])) {
        simplex[worst] = contracted;
        values[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i != best) {
            simplex[i] = affine(simplex[best], simplex[i], 0.5);
            values[i] = eval(simplex[i]);
          }
        }
      }
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  out.x = simplex[static_cast<std::size_t>(it - values.begin())];
  out.value = *it;
  return out;
}

ScalarMinimum golden_section(const std::function<double(double)>& f, double a, double b, double x_tol,
                             int max_iterations) {
  if (!(b > a)) {
    throw ConfigError("golden_section: requires a < b");
  }
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  ScalarMinimum out;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  out.evaluations = 2;
  for (int it = 0; it < max_iterations && (b - a) > x_tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
    ++out.evaluations;
  }
  if (fc <= fd) {
    out.x = c;
    out.value = fc;
  } else {
    out.x = d;
    out.value = fd;
  }
  return out;
}

} // namespace dressed
