#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dressed/gates.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace dressed;

namespace {

// Same gate evaluated with the adaptive integrator.
double gate1q_oracle(double ratio, int n) {
  const ControlScheme c = ControlScheme::double_drive(ratio, 1.0, ratio);
  const double tg = kPi / n;
  const Operator u1 = propagate_direct(rotating_frame_hamiltonian(c), tg, 1e-12).at(tg);
  const Eigen::Matrix2cd u2 = expm(Complex(0, 0.5 * ratio * tg) * sigma_x()) * u1;
  const Eigen::Matrix2cd ideal = expm(Complex(0, -0.5 * tg) * sigma_y());
  return 1.0 - average_gate_fidelity(ideal, u2);
}

IonGateConfig small_config() {
  IonGateConfig c;
  c.omega2 = kTwoPi * 130e3;
  c.nbar = 0.0;
  c.n_fock = 12;
  return c;
}

} // namespace

TEST_CASE("circular dressed single-qubit gates are exact") {
  for (double ratio : {1.0, 2.5, 7.0, 13.3, 30.0}) {
    for (int n : {1, 2, 4}) {
      CHECK(gate1q_infidelity(ratio, n, Variant::CircularDressed) < 1e-9);
    }
  }
}

TEST_CASE("double-drive gate against the adaptive integrator") {
  for (double ratio : {2.0, 6.5, 11.0}) {
    for (int n : {1, 4}) {
      const double a = gate1q_infidelity(ratio, n, Variant::DoubleDrive);
      CHECK(std::abs(a - gate1q_oracle(ratio, n)) < 1e-9);
    }
  }
  CHECK(gate1q_infidelity(2.0, 1, Variant::DoubleDrive) > 1e-3);
}

TEST_CASE("counter-rotating error falls with the overhead ratio") {
  auto peak = [](double a, double b) {
    double m = 0.0;
    for (int k = 0; k <= 40; ++k) {
      m = std::max(m, gate1q_infidelity(a + (b - a) * k / 40.0, 1, Variant::DoubleDrive));
    }
    return m;
  };
  CHECK(peak(20.0, 30.0) < 0.5 * peak(4.0, 8.0));
}

TEST_CASE("single-qubit gate argument checks") {
  CHECK_THROWS_AS(gate1q_infidelity(0.5, 1, Variant::CircularDressed), ConfigError);
  CHECK_THROWS_AS(gate1q_infidelity(2.0, 0, Variant::CircularDressed), ConfigError);
  CHECK_THROWS_AS(gate1q_infidelity(2.0, 1, Variant::SingleDrive), ConfigError);
}

TEST_CASE("ZYZ rotations") {
  const Eigen::Matrix2cd r = zyz_rotation(0.3, 1.1, -0.7);
  CHECK(is_unitary(Operator(r), 1e-14));
  const Operator rz = expm(Complex(0, -0.15) * sigma_z());
  const Operator ry = expm(Complex(0, -0.55) * sigma_y());
  const Operator rz2 = expm(Complex(0, 0.35) * sigma_z());
  CHECK(max_abs_diff(Operator(r), rz * ry * rz2) < 1e-14);
}

TEST_CASE("Bell fidelity maximization") {
  Ket phi = Ket::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  GateResult g;
  maximize_bell_fidelity(phi * phi.adjoint(), g);
  CHECK(g.fidelity == doctest::Approx(1.0).epsilon(1e-12));

  const Eigen::Matrix4cd local = kron(zyz_rotation(0.4, 2.0, 1.0), zyz_rotation(-1.2, 0.7, 0.1));
  const Ket v = local * phi;
  GateResult h;
  maximize_bell_fidelity(v * v.adjoint(), h);
  CHECK(h.identity_fidelity < 0.9);
  CHECK(h.fidelity > 1.0 - 1e-9);
  CHECK(h.fidelity <= 1.0 + 1e-9);

  GateResult mixed;
  maximize_bell_fidelity(Operator::Identity(4, 4) / 4.0, mixed);
  CHECK(mixed.fidelity == doctest::Approx(0.25));
  CHECK_THROWS_AS(maximize_bell_fidelity(Operator::Identity(2, 2), mixed), ConfigError);
}

TEST_CASE("ion Hamiltonian structure") {
  IonGateConfig c;
  c.n_fock = 12;
  const auto h = ion_gate_hamiltonian(c);
  CHECK(h.dim == 48);
  CHECK(h.period == doctest::Approx(kTwoPi / (c.nu * (1 - c.eta))));
  for (double t : {0.0, 1.3e-6, 7.7e-6}) {
    CHECK(is_hermitian(h.eval(t), 1e-6));
  }
  IonGateConfig c0 = c;
  c0.s = 0;
  const auto h0 = ion_gate_hamiltonian(c0);
  const double t = 2.1e-6;
  const double o1 = c.resolved_omega1();
  const Operator i2 = Operator::Identity(2, 2), iff = Operator::Identity(12, 12);
  const Operator sy = kron_all({sigma_y(), i2, iff}) + kron_all({i2, sigma_y(), iff});
  CHECK(max_abs_diff(h.eval(t) - h0.eval(t), 0.5 * c.omega2 * std::sin(o1 * t) * sy) < 1e-6);
  CHECK(max_abs_diff(h.eval(0.0), h.eval(h.period)) < 1e-6);
}

TEST_CASE("ion gate configuration checks") {
  IonGateConfig c;
  c.eta = 1.2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = IonGateConfig{};
  c.s = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = IonGateConfig{};
  c.n_fock = 8;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = IonGateConfig{};
  CHECK_THROWS_AS(gate2q_scan(c, {kTwoPi * 300e3}), ConfigError);
}

TEST_CASE("Fock truncation leakage is reported") {
  IonGateConfig c;
  c.n_fock = 10;
  try {
    gate2q_simulate(c);
    FAIL("expected a truncation error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("n_fock") != std::string::npos);
  }
}

TEST_CASE("two-qubit gate against direct propagation") {
  IonGateConfig c = small_config();
  c.steps_per_period = 400;
  const GateResult r = gate2q_simulate(c);
  const auto h = ion_gate_hamiltonian(c);
  const Operator u = propagate_direct(h, r.optimal_t_gate, 1e-9).at(r.optimal_t_gate);
  Ket psi0 = Ket::Zero(48);
  for (Index q = 0; q < 4; ++q) {
    psi0(q * 12) = 0.5;
  }
  const Ket psi = u * psi0;
  const Operator rho = partial_trace(psi * psi.adjoint(), CompositeSpace{{2, 2, 12}}, {0, 1});
  CHECK(max_abs_diff(rho, r.rho) < 1e-6);
}

TEST_CASE("two-qubit gate invariants at the thermal default") {
  IonGateConfig c;
  c.omega2 = kTwoPi * 130e3;
  const GateResult r = gate2q_simulate(c);
  CHECK(std::abs(r.rho.trace().real() - 1.0) < 1e-8);
  CHECK(is_hermitian(r.rho, 1e-12));
  CHECK(is_valid_state(r.rho, 1e-8, 1e-10));
  CHECK(r.purity <= 1.0 + 1e-9);
  CHECK(r.fidelity <= 1.0 + 1e-9);
  CHECK(r.fidelity >= r.identity_fidelity);
  CHECK(r.infidelity == doctest::Approx(1.0 - r.fidelity));
  const double tg = c.resolved_t_gate();
  CHECK(std::abs(r.optimal_t_gate / tg - 1.0) <= 0.02);

  IonGateConfig c2 = c;
  c2.n_fock = 60;
  const GateResult r2 = gate2q_simulate(c2);
  CHECK(std::abs(r2.infidelity - r.infidelity) < 0.05 * r.infidelity);
}

TEST_CASE("single-point scan equals direct calls") {
  IonGateConfig c = small_config();
  const auto rows = gate2q_scan(c, {kTwoPi * 90e3}, 1);
  REQUIRE(rows.size() == 1);
  c.omega2 = kTwoPi * 90e3;
  c.s = 0;
  const GateResult a = gate2q_simulate(c);
  c.s = 1;
  const GateResult b = gate2q_simulate(c);
  CHECK(rows[0].omega2 == kTwoPi * 90e3);
  CHECK(rows[0].s0.infidelity == a.infidelity);
  CHECK(rows[0].s1.infidelity == b.infidelity);
  CHECK(rows[0].s1.optimal_t_gate == b.optimal_t_gate);
}
