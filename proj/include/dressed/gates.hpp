#pragma once

// Dressed-basis single-qubit gates and the two-ion entangling gate mediated by
// a shared motional mode.

#include "dressed/control.hpp"
#include "dressed/propagation.hpp"

#include <array>
#include <vector>

namespace dressed {

/// Average-gate infidelity of Y^(1/n) driven for t_g = (pi/n)/Omega2 at
/// Omega1/Omega2 = ratio, on resonance, evaluated in the second rotating frame.
/// variant is DoubleDrive or CircularDressed.
double gate1q_infidelity(double ratio, int n, Variant variant);

struct IonGateConfig {
  double nu = kTwoPi * 98.8e3; // motional frequency
  double eta = 0.033;          // Lamb-Dicke parameter
  double omega1 = 0.0;         // 0 selects nu - eta nu
  double omega2 = kTwoPi * 71e3;
  int s = 1;                   // 0: phase-modulated drive, 1: counter-rotating term removed
  double nbar = 0.6;
  Index n_fock = 30;
  double t_gate_hint = 0.0;    // 0 selects 2 pi / (eta nu)
  int steps_per_period = 100;  // Magnus steps per 2 pi / omega1

  double resolved_omega1() const { return omega1 > 0.0 ? omega1 : nu - eta * nu; }
  double resolved_t_gate() const { return t_gate_hint > 0.0 ? t_gate_hint : kTwoPi / (eta * nu); }
  void validate() const;
};

struct GateResult {
  double fidelity = 0.0;
  double infidelity = 1.0;
  double optimal_t_gate = 0.0;
  /// ZYZ Euler angles of R1 then R2.
  std::array<double, 6> optimizer_angles{};
  double purity = 0.0;
  /// Bell fidelity before the local-rotation optimization.
  double identity_fidelity = 0.0;
  /// Final two-qubit density matrix.
  Operator rho;
};

/// Time-dependent Hamiltonian on qubit (x) qubit (x) Fock space.
TimeDependentHamiltonian ion_gate_hamiltonian(const IonGateConfig& cfg);

/// Rz(a) Ry(b) Rz(c).
Eigen::Matrix2cd zyz_rotation(double a, double b, double c);

/// max over local rotations of <Phi+| R^dag rho R |Phi+>; fills fidelity, angles and identity_fidelity.
void maximize_bell_fidelity(const Operator& rho, GateResult& out);

GateResult gate2q_simulate(const IonGateConfig& cfg);

struct GateScanRow {
  double omega2 = 0.0;
  GateResult s0;
  GateResult s1;
};

/// Both drive variants at every grid point; cfg.omega2 and cfg.s are overridden.
std::vector<GateScanRow> gate2q_scan(const IonGateConfig& cfg, const std::vector<double>& omega2_grid,
                                     int threads = 0);

} // namespace dressed
