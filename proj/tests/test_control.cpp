#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dressed/control.hpp"

#include <cmath>
#include <random>

using namespace dressed;

namespace {

// exp(+i w t sx/2) H exp(-i w t sx/2) - w sx/2
Operator second_frame(const Operator& h, double w, double t) {
  const Operator r = su2_exp(Field3(w, 0.0, 0.0), t);
  return r.adjoint() * h * r - 0.5 * w * sigma_x();
}

double spectral_norm(const Operator& a) { return Eigen::JacobiSVD<Operator>(a).singularValues()(0); }

} // namespace

TEST_CASE("omega vector examples") {
  const ControlScheme c = ControlScheme::circular(3.0, 1.5);
  CHECK((omega_vector(c, 0.0) - Field3(3.0, 1.5, 0.0)).norm() < 1e-15);
  const ControlScheme dd = ControlScheme::double_drive(3.0, 0.4);
  CHECK((omega_vector(dd, 0.0) - Field3(3.0, 0.8, 0.0)).norm() < 1e-15);
  const ControlScheme pm = ControlScheme::phase_modulated(3.0, 0.4);
  CHECK((omega_vector(pm, 0.0) - Field3(3.0, 0.0, -0.8)).norm() < 1e-15);
  const ControlScheme sd = ControlScheme::single_drive(2.0);
  for (double t : {0.0, 0.3, 17.1}) {
    CHECK((omega_vector(sd, t) - Field3(2.0, 0.0, 0.0)).norm() == 0.0);
  }
}

TEST_CASE("scheme validation") {
  CHECK_THROWS_AS(ControlScheme::single_drive(0.0), ConfigError);
  CHECK_THROWS_AS(ControlScheme::circular(1.0, -0.1), ConfigError);
  ControlScheme s = ControlScheme::single_drive(1.0);
  s.omega2 = 0.1;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  ControlScheme c = ControlScheme::circular(1.0, 0.5);
  c.mod_freq = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_variant("circular") == Variant::CircularDressed);
  CHECK(parse_variant("DoubleDrive") == Variant::DoubleDrive);
  CHECK_THROWS_AS(parse_variant("mixed"), ConfigError);
  CHECK_THROWS_AS(NoiseModel::from_t2_star(0.0, 0.01), ConfigError);
  CHECK(NoiseModel::from_t2_star(1.0, 0.005).sigma_delta == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("rotating frame Hamiltonian") {
  const ControlScheme sd = ControlScheme::single_drive(2.0);
  const TimeDependentHamiltonian h = rotating_frame_hamiltonian(sd);
  CHECK(h.period == 0.0);
  CHECK(max_abs_diff(h.eval(0.7), 0.5 * 2.0 * sigma_x()) < 1e-15);

  const ControlScheme c = ControlScheme::circular(2.0, 1.0, 0.0, 0.4);
  const TimeDependentHamiltonian hc = rotating_frame_hamiltonian(c);
  CHECK(hc.period == doctest::Approx(kTwoPi / c.mod_freq));
  const Operator hii = circular_second_frame_hamiltonian(c);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double t = 0.0137 * k * hc.period * 3.0;
    CHECK(is_hermitian(hc.eval(t), 1e-12));
    worst = std::max(worst, max_abs_diff(second_frame(hc.eval(t), c.mod_freq, t), hii));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("noise enters the documented components") {
  const ControlScheme c = ControlScheme::circular(2.0, 1.0);
  const NoiseRealization n{0.3, 0.02};
  const TimeDependentHamiltonian h0 = rotating_frame_hamiltonian(c);
  const TimeDependentHamiltonian h = rotating_frame_hamiltonian(c, n);
  for (double t : {0.0, 0.4, 1.9}) {
    const Field3 a = h0.field(t), b = h.field(t);
    CHECK(b.x() == doctest::Approx(1.02 * a.x()));
    CHECK(b.y() == doctest::Approx(1.02 * a.y()));
    CHECK(b.z() == doctest::Approx(a.z() + 0.3));
  }
  CHECK_THROWS_AS(rotating_frame_hamiltonian(c, {std::nan(""), 0.0}), NumericalError);
}

TEST_CASE("double drive keeps a counter-rotating residual") {
  const ControlScheme dd = ControlScheme::double_drive(2.0, 0.5);
  const TimeDependentHamiltonian h = rotating_frame_hamiltonian(dd);
  const int n = 256;
  std::vector<Operator> frames;
  Operator mean = Operator::Zero(2, 2);
  for (int k = 0; k < n; ++k) {
    const double t = h.period * k / n;
    frames.push_back(second_frame(h.eval(t), dd.mod_freq, t));
    mean += frames.back() / n;
  }
  double sup = 0.0;
  for (const Operator& f : frames) {
    sup = std::max(sup, spectral_norm(f - mean));
  }
  CHECK(sup >= 0.9 * dd.omega2 / 2.0);
}

TEST_CASE("doubly rotating Fourier decomposition") {
  const ControlScheme c = ControlScheme::circular(1.3, 0.8);
  const TimeDependentHamiltonian clean = doubly_rotating_fourier(c, {});
  REQUIRE(clean.fourier);
  CHECK(clean.fourier->components.empty());
  CHECK(max_abs_diff(clean.fourier->unperturbed, circular_second_frame_hamiltonian(c)) < 1e-15);

  const NoiseRealization n{0.21, 0.013};
  const TimeDependentHamiltonian h = doubly_rotating_fourier(c, n);
  const auto& f = *h.fourier;
  CHECK(f.max_harmonic() == 2);
  CHECK(max_abs_diff(f.components.at(0), 0.5 * n.eps * (c.omega1 * sigma_x() + 0.5 * c.omega2 * sigma_y())) < 1e-15);
  for (int m : {1, 2}) {
    CHECK(max_abs_diff(f.components.at(-m), f.components.at(m).adjoint()) < 1e-15);
  }
  const TimeDependentHamiltonian lab = rotating_frame_hamiltonian(c, n);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int k = 0; k < 20; ++k) {
    const double t = u(rng);
    const Operator oracle = second_frame(lab.eval(t), c.mod_freq, t);
    CHECK(max_abs_diff(f.evaluate(t), oracle) < 1e-10);
    CHECK(max_abs_diff(h.eval(t), oracle) < 1e-10);
  }
  CHECK_THROWS_AS(doubly_rotating_fourier(ControlScheme::double_drive(1.0, 0.2), n), ConfigError);
  CHECK_THROWS_AS(doubly_rotating_fourier(ControlScheme::circular(1.0, 0.2, 0.0, 0.1), n), ConfigError);
}

TEST_CASE("optimal detuning") {
  CHECK(optimal_detuning(Variant::CircularDressed, 2.0, 0.0) == 2.0);
  CHECK(optimal_detuning(Variant::CircularDressed, 2.0, std::sqrt(2.0) * 2.0) == doctest::Approx(4.0));
  CHECK(optimal_detuning(Variant::DoubleDrive, 2.0, 0.6) == doctest::Approx(2.0 + 1.25 * 0.36 / 2.0));
  CHECK(optimal_detuning(Variant::DoubleDrive, 2.0, 0.6, 0.5) == doctest::Approx(2.0 + 0.75 * 0.36 / 2.0));
  CHECK(optimal_detuning(Variant::PhaseModulated, 2.0, 0.6) == 2.0);
  CHECK(optimal_detuning(Variant::PhaseModulated, 2.0, 0.6, 1.0, true) == doctest::Approx(2.225));
  CHECK_THROWS_AS(optimal_detuning(Variant::SingleDrive, 2.0, 0.0), ConfigError);
  CHECK_THROWS_AS(optimal_detuning(Variant::CircularDressed, 0.0, 1.0), ConfigError);
}

TEST_CASE("lab waveform") {
  const double w0 = 200.0;
  const ControlScheme sd = ControlScheme::single_drive(2.0);
  for (double t : {0.0, 0.13, 2.7}) {
    CHECK(lab_waveform(sd, w0, t) == doctest::Approx(2.0 * std::cos(w0 * t)));
  }
  const ControlScheme c = ControlScheme::circular(2.0, 1.0);
  for (double t : {0.1, 1.7, 4.4}) {
    CHECK(integrated_omega_z(c, t) == doctest::Approx(c.omega2 / c.mod_freq * (1.0 - std::cos(c.mod_freq * t))));
    // trapezoid oracle for the integral
    const int n = 20000;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      acc += 0.5 * (omega_vector(c, t * k / n).z() + omega_vector(c, t * (k + 1) / n).z()) * t / n;
    }
    CHECK(integrated_omega_z(c, t) == doctest::Approx(acc).epsilon(1e-7));
  }
  // resonant PM against Omega1 cos(w0 t + (A/Omega1) sin(Omega1 t)) with A = 2 Omega2
  const ControlScheme pm = ControlScheme::phase_modulated(2.0, 0.3);
  for (double t : {0.05, 0.9, 3.3}) {
    const double ref = 2.0 * std::cos(w0 * t + (2.0 * 0.3 / 2.0) * std::sin(2.0 * t));
    CHECK(lab_waveform(pm, w0, t) == doctest::Approx(ref).epsilon(1e-12));
  }
}
