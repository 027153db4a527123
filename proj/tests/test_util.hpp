#pragma once

#include "dressed/core.hpp"

#include <random>

namespace testutil {

inline dressed::Operator random_matrix(std::mt19937_64& rng, dressed::Index n) {
  std::normal_distribution<double> g;
  dressed::Operator a(n, n);
  for (dressed::Index i = 0; i < a.size(); ++i) {
    a(i) = dressed::Complex(g(rng), g(rng));
  }
  return a;
}

inline dressed::Operator random_hermitian(std::mt19937_64& rng, dressed::Index n) {
  const dressed::Operator a = random_matrix(rng, n);
  return 0.5 * (a + a.adjoint());
}

inline dressed::Operator random_density(std::mt19937_64& rng, dressed::Index n) {
  const dressed::Operator a = random_matrix(rng, n);
  dressed::Operator rho = a * a.adjoint();
  return rho / rho.trace();
}

inline dressed::Ket random_ket(std::mt19937_64& rng, dressed::Index n) {
  std::normal_distribution<double> g;
  dressed::Ket v(n);
  for (dressed::Index i = 0; i < n; ++i) {
    v(i) = dressed::Complex(g(rng), g(rng));
  }
  return v.normalized();
}

} // namespace testutil
