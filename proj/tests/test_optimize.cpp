#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dressed/core.hpp"
#include "dressed/optimize.hpp"

#include <cmath>

using namespace dressed;

TEST_CASE("Nelder-Mead on the Rosenbrock valley") {
  auto rosen = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  NelderMeadOptions o;
  o.initial_step = 0.5;
  o.f_tol = 1e-20;
  o.x_tol = 1e-12;
  const auto r = nelder_mead(rosen, {-1.2, 1.0}, o);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Nelder-Mead in six dimensions") {
  auto quad = [](const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += (i + 1.0) * std::pow(x[i] - 0.1 * i, 2);
    }
    return s;
  };
  const auto r = nelder_mead(quad, std::vector<double>(6, 1.0));
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(r.x[i] == doctest::Approx(0.1 * i).epsilon(1e-4));
  }
  CHECK_THROWS_AS(nelder_mead(quad, {}), ConfigError);
}

TEST_CASE("golden section") {
  const auto m = golden_section([](double x) { return std::cos(x); }, 2.0, 4.0, 1e-12);
  // a quadratic minimum locates x only to ~sqrt(machine eps)
  CHECK(m.x == doctest::Approx(kPi).epsilon(1e-7));
  CHECK(m.value == doctest::Approx(-1.0));
  CHECK_THROWS_AS(golden_section([](double x) { return x; }, 1.0, 0.0), ConfigError);
}
