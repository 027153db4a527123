#pragma once

// Drive schemes Omega(t) = (Omega_x, Omega_y, Omega_z)(t) in the balanced-control
// form, and the noisy rotating-frame Hamiltonians built from them.
//
// Amplitude conventions (rad/s):
//   SingleDrive      (Omega1, 0, 0)
//   DoubleDrive      (Omega1, 2 Omega2 cos(w t + phi), 0)
//   PhaseModulated   (Omega1, 0, -2 Omega2 cos(w t + phi))
//   CircularDressed  (Omega1, Omega2 cos(w t + phi), Omega2 sin(w t + phi))
// with w = mod_freq. In every variant omega2 is the dressed Rabi frequency, so
// the linear schemes carry a 2 Omega2 peak amplitude, half of which is spent on
// the counter-rotating term.

#include "dressed/core.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace dressed {

enum class Variant { SingleDrive, DoubleDrive, PhaseModulated, CircularDressed };

std::string_view to_string(Variant v);
/// Accepts "single", "double", "pm", "circular" and the enumerator names.
Variant parse_variant(std::string_view name);

struct ControlScheme {
  Variant variant = Variant::SingleDrive;
  double omega1 = 0.0;     // dressed splitting Omega1
  double omega2 = 0.0;     // dressed Rabi frequency Omega2
  double mod_freq = 0.0;   // dressed-drive frequency
  double phase = 0.0;      // phi
  double cross_corr = 1.0; // c, only used by the DoubleDrive detuning

  static ControlScheme single_drive(double omega1);
  /// mod_freq <= 0 selects the variant's optimal detuning.
  static ControlScheme double_drive(double omega1, double omega2, double mod_freq = 0.0,
                                    double cross_corr = 1.0);
  static ControlScheme phase_modulated(double omega1, double omega2, double mod_freq = 0.0);
  static ControlScheme circular(double omega1, double omega2, double mod_freq = 0.0, double phase = 0.0);

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
  bool periodic() const { return omega2 > 0.0; }
  /// 2 pi / mod_freq when periodic, else 0.
  double period() const;
};

struct NoiseModel {
  double sigma_delta = 0.0; // rad/s, sqrt(2)/T2*
  double sigma_eps = 0.0;   // fractional amplitude noise
  int n_realizations = 2048;
  std::uint64_t seed = 0;

  static NoiseModel from_t2_star(double t2_star, double sigma_eps, int n_realizations = 2048,
                                 std::uint64_t seed = 0);
  void validate() const;
};

struct NoiseRealization {
  double delta = 0.0;
  double eps = 0.0;
};

/// Harmonic decomposition H(t) = unperturbed + sum_m exp(-i m frequency t) V^(m).
struct FourierDecomposition {
  double frequency = 0.0;
  Operator unperturbed;
  std::map<int, Operator> components;

  Operator evaluate(double t) const;
  int max_harmonic() const;
};

struct TimeDependentHamiltonian {
  Index dim = 0;
  /// Fundamental period in seconds, 0 when time independent.
  double period = 0.0;
  std::function<Operator(double)> eval;
  /// Bloch-field form H = 1/2 h(t).sigma, set for traceless qubit Hamiltonians.
  std::function<Field3(double)> field;
  std::optional<FourierDecomposition> fourier;

  bool is_qubit_field() const { return static_cast<bool>(field); }
};

/// Instantaneous balanced-control components (Omega_x, Omega_y, Omega_z).
Field3 omega_vector(const ControlScheme& scheme, double t);

/// H_I = 1/2 [Omega_x (1+eps) s_x + Omega_y (1+eps) s_y + (Omega_z + delta) s_z].
TimeDependentHamiltonian rotating_frame_hamiltonian(const ControlScheme& scheme,
                                                    const NoiseRealization& noise = {});

/// Second-frame Hamiltonian of the circular scheme (phi = 0) with its Fourier
/// components; components that vanish for the given noise are omitted.
TimeDependentHamiltonian doubly_rotating_fourier(const ControlScheme& scheme, const NoiseRealization& noise);

/// Constant H_II = 1/2 [(Omega1 - w) s_x + Omega2 (cos phi s_y + sin phi s_z)].
Operator circular_second_frame_hamiltonian(const ControlScheme& scheme);

/// Closed-form optimal dressed-drive frequency per variant. PhaseModulated is
/// resonant unless pm_as_double_drive is set.
double optimal_detuning(Variant variant, double omega1, double omega2, double cross_corr = 1.0,
                        bool pm_as_double_drive = false);

/// Lab-frame control waveform f(t) for export.
double lab_waveform(const ControlScheme& scheme, double omega0, double t);

/// Time integral of Omega_z from 0 to t in closed form.
double integrated_omega_z(const ControlScheme& scheme, double t);

} // namespace dressed
