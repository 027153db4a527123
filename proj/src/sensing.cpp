#include "dressed/sensing.hpp"

#include "dressed/floquet.hpp"
#include "dressed/optimize.hpp"
#include "dressed/propagation.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace dressed {

namespace {

double rwa_splitting(const ControlScheme& s) {
  if (!s.periodic()) {
    return s.omega1;
  }
  return std::hypot(s.mod_freq - s.omega1, s.omega2);
}

void check_m(int m) {
  if (m < -1 || m > 1) {
    throw ConfigError("sensing: m must be -1, 0 or 1");
  }
}

// Period average of the second-frame field R^dag H_I R - w sigma_x / 2.
Field3 averaged_second_frame_field(const ControlScheme& s, const NoiseRealization& n) {
  const auto h = rotating_frame_hamiltonian(s, n);
  const double w = s.mod_freq;
  const int samples = 16;
  Operator acc = Operator::Zero(2, 2);
  for (int k = 0; k < samples; ++k) {
    const double t = s.period() * k / samples;
    const Operator r = Operator(su2_exp(Field3(w, 0, 0), t));
    acc += r.adjoint() * h.eval(t) * r;
  }
  acc /= static_cast<double>(samples);
  return Field3(2.0 * acc(0, 1).real() - w, -2.0 * acc(0, 1).imag(), 2.0 * acc(0, 0).real());
}

} // namespace

double matching_condition(const ControlScheme& scheme, int m) {
  scheme.validate();
  check_m(m);
  if (!scheme.periodic()) {
    return scheme.omega1;
  }
  return scheme.mod_freq + m * rwa_splitting(scheme);
}

double dressed_splitting(const ControlScheme& scheme) {
  scheme.validate();
  if (!scheme.periodic()) {
    return scheme.omega1;
  }
  const auto h = rotating_frame_hamiltonian(scheme);
  const double t = scheme.period();
  const double w = scheme.mod_freq;
  const double rate = std::abs(scheme.omega1) + 2.0 * scheme.omega2 + w;
  constexpr int kSamples = 64;
  const int per_sample = std::max(32, static_cast<int>(std::ceil(rate * t / 0.005 / kSamples)));
  std::vector<Eigen::Matrix2cd> u(kSamples + 1);
  u[0] = Eigen::Matrix2cd::Identity();
  for (int j = 0; j < kSamples; ++j) {
    u[j + 1] = magnus4_evolve(h.field, t * j / kSamples, t * (j + 1) / kSamples, per_sample) * u[j];
  }
  const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(u[kSamples]);
  const double ea = -std::arg(es.eigenvalues()(0)) / t;
  const double eb = -std::arg(es.eigenvalues()(1)) / t;
  const Eigen::Vector2cd va = es.eigenvectors().col(0), vb = es.eigenvectors().col(1);

  // Fourier components s_n of <phi_a(t)| sigma_z |phi_b(t)> over the periodic
  // Floquet modes; the probe resonance |ea - eb + n w| has weight |s_n|.
  constexpr int kHarmonics = 6;
  std::vector<Complex> sn(2 * kHarmonics + 1, Complex(0.0));
  for (int j = 0; j < kSamples; ++j) {
    const double tj = t * j / kSamples;
    const Eigen::Vector2cd pa = u[j] * va * std::polar(1.0, ea * tj);
    const Eigen::Vector2cd pb = u[j] * vb * std::polar(1.0, eb * tj);
    const Complex sz = std::conj(pa(0)) * pb(0) - std::conj(pa(1)) * pb(1);
    for (int n = -kHarmonics; n <= kHarmonics; ++n) {
      sn[static_cast<std::size_t>(n + kHarmonics)] += sz * std::polar(1.0, -n * w * tj) / double(kSamples);
    }
  }
  auto weight = [&](int n) {
    return std::abs(n) <= kHarmonics ? std::abs(sn[static_cast<std::size_t>(n + kHarmonics)]) : 0.0;
  };

  // The nearest positive member of each lattice +-(ea - eb) + k w to the
  // rotating-wave value; near splitting = w / 2 these are s and w - s, and the
  // one with the stronger probe coupling is the m = 1 partner of w.
  const double delta = ea - eb;
  const double target = rwa_splitting(scheme);
  double best = 0.0, best_weight = -1.0;
  for (double sign : {1.0, -1.0}) {
    double k = std::round((target - sign * delta) / w);
    if (sign * delta + k * w <= 0.0) {
      k = std::floor(-sign * delta / w) + 1.0;
    }
    const double cand = sign * delta + k * w;
    // w + cand = sign (delta + n w) with n = sign (k + 1)
    const double wt = weight(static_cast<int>(sign * (k + 1.0)));
    if (wt > best_weight) {
      best = cand;
      best_weight = wt;
    }
  }
  return best;
}

double resonance_frequency(const ControlScheme& scheme, int m) {
  check_m(m);
  if (!scheme.periodic()) {
    return scheme.omega1;
  }
  return scheme.mod_freq + m * dressed_splitting(scheme);
}

AlphaResult effective_coupling_alpha(const ControlScheme& scheme, int m, double g) {
  scheme.validate();
  check_m(m);
  AlphaResult out;
  out.g = g > 0.0 ? g : 1e-3 * (scheme.periodic() ? scheme.omega2 : scheme.omega1);
  const bool second_frame = scheme.periodic();
  const double w = second_frame ? scheme.mod_freq : 0.0;
  out.omega_s = resonance_frequency(scheme, m);
  if (!second_frame && m != 1) {
    throw ConfigError("effective_coupling_alpha: a single drive only has the m = 1 resonance");
  }

  // basis: eigenvectors of the averaged second-frame (or first-frame) Hamiltonian
  const Field3 hbar = second_frame ? averaged_second_frame_field(scheme, {}) : Field3(scheme.omega1, 0, 0);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(Eigen::Matrix2cd(qubit_operator(hbar)));
  const Eigen::Vector2cd lo = es.eigenvectors().col(0);
  const Eigen::Vector2cd hi = es.eigenvectors().col(1);

  const auto base = rotating_frame_hamiltonian(scheme).field;
  const double g_sig = out.g, ws = out.omega_s;
  const auto field = [&](double t) {
    Field3 f = base(t);
    f.z() += g_sig * std::cos(ws * t);
    return f;
  };
  const double rate = ws + w + scheme.omega1 + 2.0 * scheme.omega2;
  const double d0 = 6.0 * kPi / out.g; // three swings at alpha = 1
  const int per_window = 1024;
  const double sample_dt = d0 / per_window;
  const int sub = std::max(1, static_cast<int>(std::ceil(sample_dt * rate / 0.05)));
  const double dt = sample_dt / sub;

  std::vector<double> times{0.0}, pop{0.0};
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  double duration = 0.0;
  Eigen::FFT<double> fft;
  for (int doubling = 0; doubling <= 8; ++doubling) {
    const double target = d0 * std::pow(2.0, doubling);
    while (duration < target - 0.5 * sample_dt) {
      for (int k = 0; k < sub; ++k) {
        u = magnus4_step(field, duration + k * dt, dt) * u;
      }
      duration = times.back() + sample_dt;
      const Eigen::Matrix2cd u2 = second_frame ? Eigen::Matrix2cd(su2_exp(Field3(-w, 0, 0), duration) * u) : u;
      times.push_back(duration);
      pop.push_back(std::norm(lo.dot(u2 * hi)));
    }
    const double swing = *std::max_element(pop.begin(), pop.end());
    if (swing < 0.01) {
      throw NumericalError("effective_coupling_alpha: insufficient contrast (peak population " +
                           std::to_string(swing) + ") at omega_s = " + std::to_string(out.omega_s));
    }
    // coarse frequency from the FFT peak
    const std::size_t n = pop.size();
    double mean = 0.0;
    for (double p : pop) {
      mean += p;
    }
    mean /= static_cast<double>(n);
    std::vector<double> centred(n);
    for (std::size_t i = 0; i < n; ++i) {
      centred[i] = pop[i] - mean;
    }
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, centred);
    std::size_t peak = 1;
    for (std::size_t k = 1; k <= n / 2; ++k) {
      if (std::abs(spec[k]) > std::abs(spec[peak])) {
        peak = k;
      }
    }
    const double span = sample_dt * static_cast<double>(n);
    if (peak < 3 && doubling < 8) {
      continue;
    }
    // local least squares on A + B cos(W t) + C sin(W t)
    auto residual = [&](double omega, Eigen::Vector3d* coef) {
      Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
      Eigen::Vector3d atb = Eigen::Vector3d::Zero();
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d row(1.0, std::cos(omega * times[i]), std::sin(omega * times[i]));
        ata += row * row.transpose();
        atb += row * pop[i];
      }
      const Eigen::Vector3d c = ata.ldlt().solve(atb);
      double r = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double f = c(0) + c(1) * std::cos(omega * times[i]) + c(2) * std::sin(omega * times[i]);
        r += (pop[i] - f) * (pop[i] - f);
      }
      if (coef) {
        *coef = c;
      }
      return r;
    };
    const double coarse = kTwoPi * static_cast<double>(peak) / span;
    const double bin = kTwoPi / span;
    const ScalarMinimum best =
        golden_section([&](double om) { return residual(om, nullptr); }, coarse - bin, coarse + bin, 1e-10 * coarse);
    Eigen::Vector3d c;
    residual(best.x, &c);
    out.omega_induced = best.x;
    out.contrast = std::hypot(c(1), c(2));
    if (out.contrast < 0.05) {
      throw NumericalError("effective_coupling_alpha: insufficient contrast " + std::to_string(out.contrast) +
                           " at omega_s = " + std::to_string(out.omega_s));
    }
    out.alpha = out.omega_induced / out.g;
    return out;
  }
  throw NumericalError("effective_coupling_alpha: no slow oscillation found");
}

void SensitivityParams::validate() const {
  if (!(r > 0.0) || !(gamma > 0.0) || !(c > 0.0) || !(alpha > 0.0) || !(t2 > 0.0)) {
    throw ConfigError("SensitivityParams: all parameters must be positive");
  }
}

double SensitivityParams::sensitivity() const {
  validate();
  return r / (gamma * c) / (alpha * std::sqrt(t2));
}

double predicted_t2(const ControlScheme& scheme, const NoiseModel& noise) {
  scheme.validate();
  noise.validate();
  if (noise.sigma_delta == 0.0 && noise.sigma_eps == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  if (scheme.variant == Variant::CircularDressed && scheme.phase == 0.0 && scheme.periodic()) {
    try {
      return gap_variance(scheme, noise).t2_bar;
    } catch (const NumericalError&) {
      // near-degenerate Floquet levels; fall through to the static estimate
    }
  }
  const auto [x, wx] = gauss_hermite(21);
  std::vector<double> gaps;
  std::vector<double> weights;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = noise.sigma_delta * x[i];
      const double e = noise.sigma_eps * x[j];
      const double o1 = scheme.omega1 * (1.0 + e);
      // detuning dresses the first splitting at second order
      const double e1 = std::hypot(o1, d);
      double gap = e1;
      if (scheme.periodic()) {
        Field3 h = averaged_second_frame_field(scheme, {0.0, e});
        h.x() += e1 - o1;
        gap = h.norm();
      }
      gaps.push_back(gap);
      weights.push_back(wx[i] * wx[j]);
    }
  }
  double mean = 0.0;
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    mean += weights[k] * gaps[k];
  }
  double var = 0.0;
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    var += weights[k] * (gaps[k] - mean) * (gaps[k] - mean);
  }
  return var > 0.0 ? std::sqrt(2.0 / var) : std::numeric_limits<double>::infinity();
}

SensingPoint evaluate_sensing_point(const ControlScheme& scheme, const NoiseModel& noise, int m,
                                    const EnsembleOptions& options, int max_doublings) {
  SensingPoint p;
  p.scheme = scheme;
  p.m = m;
  p.omega_s = resonance_frequency(scheme, m);
  p.alpha = effective_coupling_alpha(scheme, m);
  double guess = predicted_t2(scheme, noise);
  if (!std::isfinite(guess)) {
    throw ConfigError("evaluate_sensing_point: noise model has zero strength, T2 is unbounded");
  }
  const CoherenceRun run = coherence_time(scheme, noise, 5.0 * guess, options, max_doublings);
  p.horizon = run.horizon;
  p.t2 = run.curve.t2;
  if (!p.t2) {
    p.t2_lower_bound = true;
    p.t2 = run.horizon;
  }
  p.params.alpha = p.alpha.alpha;
  p.params.t2 = *p.t2;
  return p;
}

GainResult sensitivity_gain(const SensingPoint& candidate, const SensingPoint& reference) {
  const double ws = reference.omega_s;
  if (std::abs(candidate.omega_s - ws) > 1e-9 * std::abs(ws)) {
    throw ConfigError("sensitivity_gain: schemes are matched to different signal frequencies (" +
                      std::to_string(candidate.omega_s) + " vs " + std::to_string(ws) + ")");
  }
  GainResult g;
  g.gain = reference.params.sensitivity() / candidate.params.sensitivity();
  g.lower_bound = candidate.t2_lower_bound;
  g.upper_bound = reference.t2_lower_bound;
  return g;
}

ControlScheme matched_scheme(Variant variant, double omega1, double omega_s) {
  if (!(omega1 > 0.0) || !(omega_s > 0.0)) {
    throw ConfigError("matched_scheme: frequencies must be positive");
  }
  if (variant == Variant::SingleDrive) {
    if (std::abs(omega1 - omega_s) > 1e-12 * omega_s) {
      throw ConfigError("matched_scheme: a single drive matches only at omega1 = omega_s");
    }
    return ControlScheme::single_drive(omega_s);
  }
  if (!(omega1 < omega_s)) {
    throw ConfigError("matched_scheme: two-tone schemes need omega1 < omega_s");
  }
  auto build = [&](double ratio) {
    switch (variant) {
    case Variant::CircularDressed:
      return ControlScheme::circular(omega1, ratio * omega1);
    case Variant::DoubleDrive:
      return ControlScheme::double_drive(omega1, ratio * omega1);
    case Variant::PhaseModulated:
      return ControlScheme::phase_modulated(omega1, ratio * omega1);
    default:
      break;
    }
    throw ConfigError("matched_scheme: unsupported variant");
  };
  double lo = 0.0, hi = 1.0;
  while (resonance_frequency(build(hi), 1) < omega_s) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) {
      throw ConfigError("matched_scheme: no amplitude ratio reaches omega_s");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (resonance_frequency(build(mid), 1) < omega_s ? lo : hi) = mid;
  }
  return build(0.5 * (lo + hi));
}

SensingScan sensing_scan(const std::vector<double>& omega1_grid, double omega_s, const NoiseModel& noise,
                         const EnsembleOptions& options) {
  SensingScan out;
  out.reference = evaluate_sensing_point(ControlScheme::single_drive(omega_s), noise, 1, options);
  for (double o1 : omega1_grid) {
    SensingRow row;
    row.omega1 = o1;
    row.circular = evaluate_sensing_point(matched_scheme(Variant::CircularDressed, o1, omega_s), noise, 1, options);
    row.double_drive = evaluate_sensing_point(matched_scheme(Variant::DoubleDrive, o1, omega_s), noise, 1, options);
    row.gain_circular = sensitivity_gain(row.circular, out.reference);
    row.gain_double_drive = sensitivity_gain(row.double_drive, out.reference);
    out.rows.push_back(std::move(row));
  }
  return out;
}

ClockConstraint ClockConstraint::double_drive_experimental() { return ClockConstraint{}; }

ClockConstraint ClockConstraint::double_drive_joint() {
  ClockConstraint c;
  c.amplitude_ratio = std::sqrt(8.0) / 5.0;
  return c;
}

ClockConstraint ClockConstraint::circular_joint() {
  ClockConstraint c;
  c.amplitude_ratio = std::sqrt(2.0);
  c.variant = Variant::CircularDressed;
  return c;
}

ControlScheme ClockConstraint::scheme(double omega1) const {
  if (!(amplitude_ratio > 0.0) || !(magic_ratio > 0.0)) {
    throw ConfigError("ClockConstraint: ratios must be positive");
  }
  const double o2 = amplitude_ratio * omega1;
  const double w = omega1 + magic_ratio * o2;
  switch (variant) {
  case Variant::DoubleDrive:
    return ControlScheme::double_drive(omega1, o2, w);
  case Variant::CircularDressed:
    return ControlScheme::circular(omega1, o2, w);
  default:
    break;
  }
  throw ConfigError("ClockConstraint: variant must be double or circular");
}

ClockResult clock_comparison(bool t2_star_scaled, const std::vector<double>& omega1_grid, const NoiseModel& noise,
                             const EnsembleOptions& options, const ClockConstraint& double_drive,
                             const ClockConstraint& circular) {
  noise.validate();
  if (omega1_grid.empty()) {
    throw ConfigError("clock_comparison: empty omega1 grid");
  }
  ClockResult out;
  if (t2_star_scaled) {
    if (!(noise.sigma_delta > 0.0)) {
      throw ConfigError("clock_comparison: T2* scaling needs sigma_delta > 0");
    }
    out.time_unit = std::sqrt(2.0) / noise.sigma_delta;
  }
  std::vector<std::vector<double>> grid;
  for (double g : omega1_grid) {
    if (!(g > 0.0)) {
      throw ConfigError("clock_comparison: omega1 grid values must be positive");
    }
    grid.push_back({g / out.time_unit});
  }
  const HorizonRule horizon = [&](const ControlScheme& s) { return 5.0 * predicted_t2(s, noise); };
  const ScanResult dd =
      t2_scan([&](const std::vector<double>& p) { return double_drive.scheme(p[0]); }, noise, grid, horizon, options);
  const ScanResult circ =
      t2_scan([&](const std::vector<double>& p) { return circular.scheme(p[0]); }, noise, grid, horizon, options);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ClockRow row;
    row.omega1 = omega1_grid[i];
    if (dd.entries[i].t2) {
      row.t2_double_drive = *dd.entries[i].t2 / out.time_unit;
    }
    if (circ.entries[i].t2) {
      row.t2_circular = *circ.entries[i].t2 / out.time_unit;
    }
    out.rows.push_back(row);
  }
  out.best_double_drive = dd.best;
  out.best_circular = circ.best;
  if (dd.best && circ.best) {
    out.ratio = *circ.entries[*circ.best].t2 / *dd.entries[*dd.best].t2;
  }
  return out;
}

} // namespace dressed
