#pragma once

// Dense complex linear algebra and quantum-state primitives.
//
// Basis conventions used everywhere in the library:
//   * qubit |0> is the +1 eigenstate of sigma_z,
//   * composite spaces are ordered qubit1 (x) qubit2 (x) oscillator,
//   * the Fock basis is ascending in phonon number.
// Energies are angular frequencies (rad/s); hbar = 1.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dressed {

template <typename Scalar>
using OperatorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using KetT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using Operator = OperatorT<double>;
using Ket = KetT<double>;
using Index = Eigen::Index;

/// Bloch field h of a qubit Hamiltonian H = 1/2 h.sigma (rad/s).
using Field3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Raised when an input violates a precondition that depends on runtime data
/// (non-finite entries, degenerate spectra, Fock truncation leakage, ...).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised for inconsistent arguments (dimension mismatches, invalid ranges).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class PauliAxis { I, X, Y, Z };

template <typename Scalar = double>
OperatorT<Scalar> pauli(PauliAxis axis) {
  using C = std::complex<Scalar>;
  OperatorT<Scalar> m = OperatorT<Scalar>::Zero(2, 2);
  switch (axis) {
  case PauliAxis::I:
    m(0, 0) = m(1, 1) = C(1);
    break;
  case PauliAxis::X:
    m(0, 1) = m(1, 0) = C(1);
    break;
  case PauliAxis::Y:
    m(0, 1) = C(0, -1);
    m(1, 0) = C(0, 1);
    break;
  case PauliAxis::Z:
    m(0, 0) = C(1);
    m(1, 1) = C(-1);
    break;
  }
  return m;
}

inline Operator sigma0() { return pauli(PauliAxis::I); }
inline Operator sigma_x() { return pauli(PauliAxis::X); }
inline Operator sigma_y() { return pauli(PauliAxis::Y); }
inline Operator sigma_z() { return pauli(PauliAxis::Z); }

/// Truncated annihilation operator b on n_fock levels.
Operator annihilation(Index n_fock);

/// 1/2 (h_x sigma_x + h_y sigma_y + h_z sigma_z).
Operator qubit_operator(const Field3& h);

/// Largest elementwise modulus of the difference a - b.
template <typename DerivedA, typename DerivedB>
double max_abs_diff(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) {
    return 0.0;
  }
  return (a - b).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, double tol) {
  return a.rows() == a.cols() && max_abs_diff(a, a.adjoint()) < tol;
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& a, double tol) {
  if (a.rows() != a.cols()) {
    return false;
  }
  using Plain = typename Derived::PlainObject;
  const Plain g = a.adjoint() * a;
  return max_abs_diff(g, Plain::Identity(a.rows(), a.cols())) < tol;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.allFinite();
}

/// Kronecker product; result(i*rb + k, j*cb + l) = a(i,j) b(k,l).
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Kronecker product of a list, left to right.
Operator kron_all(const std::vector<Operator>& factors);

/// Matrix exponential of a general square matrix.
Operator expm(const Operator& a);

/// exp(-i h dt) for Hermitian h (eigendecomposition path).
Operator expm_hermitian(const Operator& h, double dt);

/// exp(-i dt H) for H = 1/2 h.sigma, closed form.
Eigen::Matrix2cd su2_exp(const Field3& h, double dt);

/// Polar projection onto the nearest unitary.
Operator unitarize(const Operator& u);

struct CompositeSpace {
  std::vector<Index> factor_dims;

  Index dim() const;
  void validate() const;
};

/// Reduced operator over the kept factors (in ascending factor order).
Operator partial_trace(const Operator& a, const CompositeSpace& space, std::vector<std::size_t> keep);

struct State {
  Operator density;
};

/// Hermitian, unit trace within trace_tol and minimum eigenvalue above -eig_tol.
bool is_valid_state(const Operator& density, double trace_tol = 1e-10, double eig_tol = 1e-9);

struct ThermalState {
  State state;
  /// Bare occupation probabilities before renormalization.
  std::vector<double> raw_populations;
  /// Probability mass beyond the truncation, 1 - sum(raw_populations).
  double tail_mass = 0.0;
};

ThermalState thermal_oscillator_state(double nbar, Index n_fock);

/// Average gate fidelity between two qubit unitaries,
/// 1/2 + 1/12 sum_k Tr(U_a s_k U_a^dag U_b s_k U_b^dag).
double average_gate_fidelity(const Eigen::Matrix2cd& ua, const Eigen::Matrix2cd& ub);

} // namespace dressed
