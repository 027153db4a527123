#include "dressed/core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dressed {

Operator annihilation(Index n_fock) {
  if (n_fock < 1) {
    throw ConfigError("annihilation: n_fock must be positive");
  }
  Operator b = Operator::Zero(n_fock, n_fock);
  for (Index n = 1; n < n_fock; ++n) {
    b(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return b;
}

Operator qubit_operator(const Field3& h) {
  Operator m(2, 2);
  m(0, 0) = Complex(0.5 * h.z(), 0.0);
  m(1, 1) = Complex(-0.5 * h.z(), 0.0);
  m(0, 1) = Complex(0.5 * h.x(), -0.5 * h.y());
  m(1, 0) = Complex(0.5 * h.x(), 0.5 * h.y());
  return m;
}

Operator kron_all(const std::vector<Operator>& factors) {
  if (factors.empty()) {
    return Operator::Identity(1, 1);
  }
  Operator out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) {
    out = kron(out, factors[i]);
  }
  return out;
}

Operator expm(const Operator& a) {
  if (a.rows() != a.cols()) {
    throw ConfigError("expm: matrix must be square");
  }
  if (!a.allFinite()) {
    throw NumericalError("expm: non-finite input");
  }
  Operator out = a.exp();
  return out;
}

Operator expm_hermitian(const Operator& h, double dt) {
  if (!h.allFinite() || !std::isfinite(dt)) {
    throw NumericalError("expm_hermitian: non-finite input");
  }
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  const Eigen::VectorXd& w = es.eigenvalues();
  const Operator& v = es.eigenvectors();
  Ket phases(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    phases(i) = std::polar(1.0, -w(i) * dt);
  }
  return v * phases.asDiagonal() * v.adjoint();
}

Eigen::Matrix2cd su2_exp(const Field3& h, double dt) {
  const double n = h.norm();
  const double theta = 0.5 * n * dt;
  const double c = std::cos(theta);
  // sin(theta)/n, continuous at n = 0
  const double s = n > 0.0 ? std::sin(theta) / n : 0.5 * dt;
  Eigen::Matrix2cd u;
  u(0, 0) = Complex(c, -s * h.z());
  u(1, 1) = Complex(c, s * h.z());
  u(0, 1) = Complex(-s * h.y(), -s * h.x());
  u(1, 0) = Complex(s * h.y(), -s * h.x());
  return u;
}

Operator unitarize(const Operator& u) {
  Eigen::JacobiSVD<Operator> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Index CompositeSpace::dim() const {
  Index d = 1;
  for (Index f : factor_dims) {
    d *= f;
  }
  return d;
}

void CompositeSpace::validate() const {
  if (factor_dims.empty()) {
    throw ConfigError("CompositeSpace: no factors");
  }
  for (Index f : factor_dims) {
    if (f < 1) {
      throw ConfigError("CompositeSpace: factor dimensions must be positive");
    }
  }
}

Operator partial_trace(const Operator& a, const CompositeSpace& space, std::vector<std::size_t> keep) {
  space.validate();
  if (a.rows() != a.cols() || a.rows() != space.dim()) {
    throw ConfigError("partial_trace: operator dimension " + std::to_string(a.rows()) +
                      " inconsistent with composite space dimension " + std::to_string(space.dim()));
  }
  const std::size_t nf = space.factor_dims.size();
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (std::size_t k : keep) {
    if (k >= nf) {
      throw ConfigError("partial_trace: kept factor index out of range");
    }
  }
  std::vector<bool> kept(nf, false);
  for (std::size_t k : keep) {
    kept[k] = true;
  }

  Index kept_dim = 1;
  Index traced_dim = 1;
  for (std::size_t f = 0; f < nf; ++f) {
    (kept[f] ? kept_dim : traced_dim) *= space.factor_dims[f];
  }

  // Split each full index into (kept, traced) sub-indices; the first factor
  // is the most significant digit.
  const Index dim = a.rows();
  std::vector<Index> kept_of(dim), traced_of(dim);
  for (Index i = 0; i < dim; ++i) {
    Index rem = i;
    Index ki = 0, ti = 0, kmul = 1, tmul = 1;
    for (std::size_t f = nf; f-- > 0;) {
      const Index d = space.factor_dims[f];
      const Index digit = rem % d;
      rem /= d;
      if (kept[f]) {
        ki += digit * kmul;
        kmul *= d;
      } else {
        ti += digit * tmul;
        tmul *= d;
      }
    }
    kept_of[i] = ki;
    traced_of[i] = ti;
  }

  std::vector<std::vector<Index>> by_traced(traced_dim);
  for (Index i = 0; i < dim; ++i) {
    by_traced[traced_of[i]].push_back(i);
  }

  Operator out = Operator::Zero(kept_dim, kept_dim);
  for (const auto& group : by_traced) {
    for (Index i : group) {
      for (Index j : group) {
        out(kept_of[i], kept_of[j]) += a(i, j);
      }
    }
  }
  return out;
}

bool is_valid_state(const Operator& density, double trace_tol, double eig_tol) {
  if (density.rows() != density.cols() || !density.allFinite()) {
    return false;
  }
  if (!is_hermitian(density, 1e-10)) {
    return false;
  }
  if (std::abs(density.trace() - Complex(1.0, 0.0)) >= trace_tol) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Operator> es(density, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > -eig_tol;
}

ThermalState thermal_oscillator_state(double nbar, Index n_fock) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw ConfigError("thermal_oscillator_state: nbar must be finite and >= 0");
  }
  if (n_fock < 2) {
    throw ConfigError("thermal_oscillator_state: n_fock must be >= 2");
  }
  ThermalState out;
  out.raw_populations.resize(static_cast<std::size_t>(n_fock));
  const double ratio = nbar / (1.0 + nbar);
  double p = 1.0 / (1.0 + nbar);
  for (Index n = 0; n < n_fock; ++n) {
    out.raw_populations[static_cast<std::size_t>(n)] = p;
    p *= ratio;
  }
  const double total = std::accumulate(out.raw_populations.begin(), out.raw_populations.end(), 0.0);
  out.tail_mass = std::max(0.0, 1.0 - total);
  out.state.density = Operator::Zero(n_fock, n_fock);
  for (Index n = 0; n < n_fock; ++n) {
    out.state.density(n, n) = out.raw_populations[static_cast<std::size_t>(n)] / total;
  }
  return out;
}

double average_gate_fidelity(const Eigen::Matrix2cd& ua, const Eigen::Matrix2cd& ub) {
  double sum = 0.0;
  for (PauliAxis axis : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
    const Eigen::Matrix2cd s = pauli(axis);
    sum += (ua * s * ua.adjoint() * ub * s * ub.adjoint()).trace().real();
  }
  return 0.5 + sum / 12.0;
}

} // namespace dressed
