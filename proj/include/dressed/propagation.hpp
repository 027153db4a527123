#pragma once

// Time-ordered propagators U(t) = T exp(-i int_0^t H(t') dt').

#include "dressed/control.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace dressed {

enum class PropagationMethod { Direct, Stroboscopic };

class Propagator {
public:
  Propagator(PropagationMethod method, std::function<Operator(double)> at)
      : method_(method), at_(std::move(at)) {}

  Operator at(double t) const { return at_(t); }
  PropagationMethod method() const { return method_; }

private:
  PropagationMethod method_;
  std::function<Operator(double)> at_;
};

/// One fourth-order Magnus step (two-point Gauss-Legendre) from t0 to t0 + dt.
Operator magnus4_step(const TimeDependentHamiltonian& h, double t0, double dt);
Eigen::Matrix2cd magnus4_step(const std::function<Field3(double)>& field, double t0, double dt);

/// Fixed-step Magnus propagator from t0 to t1.
Operator magnus4_evolve(const TimeDependentHamiltonian& h, double t0, double t1, int steps);
Eigen::Matrix2cd magnus4_evolve(const std::function<Field3(double)>& field, double t0, double t1, int steps);

/// Adaptive Dormand-Prince 5(4) integration of dU/dt = -i H(t) U with U(t_start) = I.
/// Unitarity drift above 10 tol is removed by polar projection.
Propagator propagate_direct(const TimeDependentHamiltonian& h, double t_final, double tol = 1e-10,
                            double t_start = 0.0);

/// U(T) over one period with `substeps` Magnus steps.
Operator monodromy(const TimeDependentHamiltonian& h, int substeps);

/// Integer powers of a unitary via its Schur form M = Q diag(exp(i phi)) Q^dag.
class UnitaryPower {
public:
  explicit UnitaryPower(const Operator& m);

  Operator pow(long long n) const;
  /// Eigenphases phi_k in (-pi, pi].
  const Eigen::VectorXd& phases() const { return phases_; }
  const Operator& basis() const { return q_; }

private:
  Operator q_;
  Eigen::VectorXd phases_;
};

/// Monodromy-based evaluation U(t) = U(0 -> t mod T) M^n. Partial-period
/// propagators at s T / P are cached; off-grid times integrate the remainder.
Propagator stroboscopic(const TimeDependentHamiltonian& h, std::span<const double> times,
                        int phases_per_period = 16, int substeps_per_phase = 16);

/// Qubit-specialised stroboscopic propagator on fixed-size 2x2 matrices.
class QubitStroboscopic {
public:
  QubitStroboscopic(std::function<Field3(double)> field, double period, int phases_per_period,
                    int substeps_per_phase);

  Eigen::Matrix2cd at(double t) const;
  /// U at t = n T + s T / P.
  Eigen::Matrix2cd at_grid(long long n, int s) const;
  const Eigen::Matrix2cd& monodromy() const { return partial_.back(); }
  double period() const { return period_; }
  int phases_per_period() const { return phases_; }
  /// U(0 -> s T / P) for s = 0..P.
  const Eigen::Matrix2cd& partial(int s) const { return partial_[static_cast<std::size_t>(s)]; }
  /// Monodromy = schur_basis() diag(exp(i eigenphases())) schur_basis()^dag.
  const Eigen::Matrix2cd& schur_basis() const { return q_; }
  const Eigen::Vector2d& eigenphases() const { return phi_; }

private:
  Eigen::Matrix2cd power(long long n) const;

  std::function<Field3(double)> field_;
  double period_;
  int phases_;
  int substeps_;
  std::vector<Eigen::Matrix2cd> partial_;
  Eigen::Matrix2cd q_;
  Eigen::Vector2d phi_;
};

} // namespace dressed
