#include "dressed/control.hpp"

#include <cmath>

namespace dressed {

std::string_view to_string(Variant v) {
  switch (v) {
  case Variant::SingleDrive:
    return "single";
  case Variant::DoubleDrive:
    return "double";
  case Variant::PhaseModulated:
    return "pm";
  case Variant::CircularDressed:
    return "circular";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "single" || name == "SingleDrive") {
    return Variant::SingleDrive;
  }
  if (name == "double" || name == "DoubleDrive") {
    return Variant::DoubleDrive;
  }
  if (name == "pm" || name == "PhaseModulated") {
    return Variant::PhaseModulated;
  }
  if (name == "circular" || name == "CircularDressed") {
    return Variant::CircularDressed;
  }
  throw ConfigError("unknown scheme variant '" + std::string(name) + "'");
}

ControlScheme ControlScheme::single_drive(double omega1) {
  ControlScheme s;
  s.variant = Variant::SingleDrive;
  s.omega1 = omega1;
  s.mod_freq = omega1;
  s.validate();
  return s;
}

ControlScheme ControlScheme::double_drive(double omega1, double omega2, double mod_freq, double cross_corr) {
  ControlScheme s;
  s.variant = Variant::DoubleDrive;
  s.omega1 = omega1;
  s.omega2 = omega2;
  s.cross_corr = cross_corr;
  s.mod_freq = mod_freq > 0.0 ? mod_freq : optimal_detuning(Variant::DoubleDrive, omega1, omega2, cross_corr);
  s.validate();
  return s;
}

ControlScheme ControlScheme::phase_modulated(double omega1, double omega2, double mod_freq) {
  ControlScheme s;
  s.variant = Variant::PhaseModulated;
  s.omega1 = omega1;
  s.omega2 = omega2;
  s.mod_freq = mod_freq > 0.0 ? mod_freq : optimal_detuning(Variant::PhaseModulated, omega1, omega2);
  s.validate();
  return s;
}

ControlScheme ControlScheme::circular(double omega1, double omega2, double mod_freq, double phase) {
  ControlScheme s;
  s.variant = Variant::CircularDressed;
  s.omega1 = omega1;
  s.omega2 = omega2;
  s.phase = phase;
  s.mod_freq = mod_freq > 0.0 ? mod_freq : optimal_detuning(Variant::CircularDressed, omega1, omega2);
  s.validate();
  return s;
}

void ControlScheme::validate() const {
  if (!(omega1 > 0.0) || !std::isfinite(omega1)) {
    throw ConfigError("ControlScheme: omega1 must be positive and finite");
  }
  if (!(omega2 >= 0.0) || !std::isfinite(omega2)) {
    throw ConfigError("ControlScheme: omega2 must be non-negative and finite");
  }
  if (variant == Variant::SingleDrive && omega2 != 0.0) {
    throw ConfigError("ControlScheme: SingleDrive requires omega2 = 0");
  }
  if (omega2 > 0.0 && !(mod_freq > 0.0)) {
    throw ConfigError("ControlScheme: mod_freq must be positive when omega2 > 0");
  }
  if (!std::isfinite(phase) || !std::isfinite(cross_corr)) {
    throw ConfigError("ControlScheme: phase and cross_corr must be finite");
  }
}

double ControlScheme::period() const { return periodic() ? kTwoPi / mod_freq : 0.0; }

NoiseModel NoiseModel::from_t2_star(double t2_star, double sigma_eps, int n_realizations, std::uint64_t seed) {
  if (!(t2_star > 0.0)) {
    throw ConfigError("NoiseModel: T2* must be positive");
  }
  NoiseModel m;
  m.sigma_delta = std::sqrt(2.0) / t2_star;
  m.sigma_eps = sigma_eps;
  m.n_realizations = n_realizations;
  m.seed = seed;
  m.validate();
  return m;
}

void NoiseModel::validate() const {
  if (!(sigma_delta >= 0.0) || !(sigma_eps >= 0.0) || !std::isfinite(sigma_delta) || !std::isfinite(sigma_eps)) {
    throw ConfigError("NoiseModel: noise strengths must be finite and non-negative");
  }
  if (n_realizations < 1) {
    throw ConfigError("NoiseModel: n_realizations must be >= 1");
  }
}

Operator FourierDecomposition::evaluate(double t) const {
  Operator h = unperturbed;
  for (const auto& [m, v] : components) {
    h += std::polar(1.0, -static_cast<double>(m) * frequency * t) * v;
  }
  return h;
}

int FourierDecomposition::max_harmonic() const {
  int h = 0;
  for (const auto& [m, v] : components) {
    h = std::max(h, std::abs(m));
  }
  return h;
}

Field3 omega_vector(const ControlScheme& s, double t) {
  const double arg = s.mod_freq * t + s.phase;
  switch (s.variant) {
  case Variant::SingleDrive:
    return {s.omega1, 0.0, 0.0};
  case Variant::DoubleDrive:
    return {s.omega1, 2.0 * s.omega2 * std::cos(arg), 0.0};
  case Variant::PhaseModulated:
    return {s.omega1, 0.0, -2.0 * s.omega2 * std::cos(arg)};
  case Variant::CircularDressed:
    return {s.omega1, s.omega2 * std::cos(arg), s.omega2 * std::sin(arg)};
  }
  return Field3::Zero();
}

TimeDependentHamiltonian rotating_frame_hamiltonian(const ControlScheme& scheme, const NoiseRealization& noise) {
  scheme.validate();
  if (!std::isfinite(noise.delta) || !std::isfinite(noise.eps)) {
    throw NumericalError("rotating_frame_hamiltonian: non-finite noise realization");
  }
  TimeDependentHamiltonian h;
  h.dim = 2;
  h.period = scheme.period();
  // Amplitude noise scales the transverse components only; delta enters Omega_z.
  h.field = [scheme, noise](double t) {
    const Field3 w = omega_vector(scheme, t);
    return Field3((1.0 + noise.eps) * w.x(), (1.0 + noise.eps) * w.y(), w.z() + noise.delta);
  };
  h.eval = [field = h.field](double t) { return qubit_operator(field(t)); };
  return h;
}

Operator circular_second_frame_hamiltonian(const ControlScheme& s) {
  return qubit_operator(Field3(s.omega1 - s.mod_freq, s.omega2 * std::cos(s.phase), s.omega2 * std::sin(s.phase)));
}

TimeDependentHamiltonian doubly_rotating_fourier(const ControlScheme& scheme, const NoiseRealization& noise) {
  scheme.validate();
  if (scheme.variant != Variant::CircularDressed) {
    throw ConfigError("doubly_rotating_fourier: only the circular scheme has this decomposition");
  }
  if (scheme.phase != 0.0) {
    throw ConfigError("doubly_rotating_fourier: requires phase = 0");
  }
  const double w1 = scheme.omega1;
  const double w2 = scheme.omega2;
  const double d = noise.delta;
  const double e = noise.eps;
  const Operator sx = sigma_x(), sy = sigma_y(), sz = sigma_z();
  const Complex i(0.0, 1.0);

  FourierDecomposition f;
  f.frequency = scheme.mod_freq;
  f.unperturbed = 0.5 * ((w1 - scheme.mod_freq) * sx + w2 * sy);
  if (e != 0.0) {
    f.components[0] = 0.5 * e * (w1 * sx + 0.5 * w2 * sy);
    f.components[2] = (e * w2 / 8.0) * (sy - i * sz);
    f.components[-2] = (e * w2 / 8.0) * (sy + i * sz);
  }
  if (d != 0.0) {
    f.components[1] = (d / 4.0) * (sz + i * sy);
    f.components[-1] = (d / 4.0) * (sz - i * sy);
  }

  TimeDependentHamiltonian h;
  h.dim = 2;
  h.period = scheme.period();
  const double w = scheme.mod_freq;
  h.field = [w1, w2, w, d, e](double t) {
    const double c1 = std::cos(w * t), s1 = std::sin(w * t);
    const double c2 = std::cos(2.0 * w * t), s2 = std::sin(2.0 * w * t);
    return Field3(w1 - w + e * w1, w2 + 0.5 * e * w2 + d * s1 + 0.5 * e * w2 * c2, d * c1 - 0.5 * e * w2 * s2);
  };
  h.eval = [field = h.field](double t) { return qubit_operator(field(t)); };
  h.fourier = std::move(f);
  return h;
}

double optimal_detuning(Variant variant, double omega1, double omega2, double cross_corr, bool pm_as_double_drive) {
  if (!(omega1 > 0.0)) {
    throw ConfigError("optimal_detuning: omega1 must be positive");
  }
  switch (variant) {
  case Variant::CircularDressed:
    return omega1 + 0.5 * omega2 * omega2 / omega1;
  case Variant::DoubleDrive:
    return omega1 + (cross_corr + 0.25) * omega2 * omega2 / omega1;
  case Variant::PhaseModulated:
    return pm_as_double_drive ? omega1 + (cross_corr + 0.25) * omega2 * omega2 / omega1 : omega1;
  case Variant::SingleDrive:
    break;
  }
  throw ConfigError("optimal_detuning: unsupported variant " + std::string(to_string(variant)));
}

double integrated_omega_z(const ControlScheme& s, double t) {
  const double w = s.mod_freq;
  switch (s.variant) {
  case Variant::SingleDrive:
  case Variant::DoubleDrive:
    return 0.0;
  case Variant::PhaseModulated:
    return -2.0 * s.omega2 / w * (std::sin(w * t + s.phase) - std::sin(s.phase));
  case Variant::CircularDressed:
    return s.omega2 / w * (std::cos(s.phase) - std::cos(w * t + s.phase));
  }
  return 0.0;
}

double lab_waveform(const ControlScheme& scheme, double omega0, double t) {
  const Field3 w = omega_vector(scheme, t);
  const double arg = omega0 * t - integrated_omega_z(scheme, t);
  return w.x() * std::cos(arg) - w.y() * std::sin(arg);
}

} // namespace dressed
