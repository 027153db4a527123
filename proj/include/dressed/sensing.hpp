#pragma once

// Signal detection on dressed transitions and magic-angle constrained clocks.

#include "dressed/control.hpp"
#include "dressed/ensemble.hpp"

#include <optional>
#include <vector>

namespace dressed {

/// omega_s = w + m sqrt((w - Omega1)^2 + Omega2^2); Omega1 when Omega2 = 0.
double matching_condition(const ControlScheme& scheme, int m);

/// Quasi-energy splitting of the noiseless drive taken from the monodromy.
/// Of the two branches within w/2 of the rotating-wave value
/// sqrt((w - Omega1)^2 + Omega2^2), the one whose resonance w + splitting
/// couples more strongly to a sigma_z probe is returned.
double dressed_splitting(const ControlScheme& scheme);

/// Exact first-frame resonance w + m dressed_splitting(); equals
/// matching_condition() when the drive has no counter-rotating term.
double resonance_frequency(const ControlScheme& scheme, int m);

struct AlphaResult {
  double alpha = 0.0;
  double omega_induced = 0.0; // fitted slow oscillation frequency
  double omega_s = 0.0;       // signal frequency used for the probe
  double g = 0.0;
  double contrast = 0.0;      // fitted amplitude of the population swing
};

/// Probe signal (g/2) cos(omega_s t) sigma_z added in the first rotating frame
/// at the exact dressed resonance; alpha = fitted population-swing frequency / g.
/// g <= 0 picks 1e-3 Omega2 (Omega1 for a single drive).
AlphaResult effective_coupling_alpha(const ControlScheme& scheme, int m, double g = 0.0);

struct SensitivityParams {
  double r = 4.663287963194248; // sqrt(8 e)
  double gamma = kTwoPi * 28e9; // rad/s per tesla
  double c = 0.093;             // readout efficiency
  double alpha = 0.5;
  double t2 = 1.0;              // seconds

  void validate() const;
  /// r / (gamma C) / (alpha sqrt(T2)), in T sqrt(s).
  double sensitivity() const;
};

/// Static-gap estimate sqrt(2 / Var(gap)) used to size simulation horizons;
/// the circular scheme uses the Floquet perturbative gap.
double predicted_t2(const ControlScheme& scheme, const NoiseModel& noise);

struct SensingPoint {
  ControlScheme scheme;
  int m = 1;
  double omega_s = 0.0; // resonance_frequency(scheme, m)
  AlphaResult alpha;
  std::optional<double> t2;
  double horizon = 0.0;
  /// T2 beyond the last horizon; t2 then holds that horizon as a lower bound.
  bool t2_lower_bound = false;
  SensitivityParams params;
};

/// Alpha and simulated T2 at the matched signal frequency; the first horizon
/// is 5x predicted_t2 and doubles up to max_doublings.
SensingPoint evaluate_sensing_point(const ControlScheme& scheme, const NoiseModel& noise, int m = 1,
                                    const EnsembleOptions& options = {}, int max_doublings = 4);

struct GainResult {
  double gain = 0.0;
  /// candidate T2 was beyond its horizon: gain is a lower bound
  bool lower_bound = false;
  /// reference T2 was beyond its horizon: gain is an upper bound
  bool upper_bound = false;
};

/// eta_ref / eta = (alpha sqrt(T2)) / (alpha_ref sqrt(T2_ref)).
GainResult sensitivity_gain(const SensingPoint& candidate, const SensingPoint& reference);

/// Scheme of the given variant at its optimal detuning whose exact m = 1
/// resonance sits at omega_s for this Omega1; Omega2 is solved by bisection.
ControlScheme matched_scheme(Variant variant, double omega1, double omega_s);

struct SensingRow {
  double omega1 = 0.0;
  SensingPoint circular;
  SensingPoint double_drive;
  GainResult gain_circular;
  GainResult gain_double_drive;
};

struct SensingScan {
  SensingPoint reference; // single drive at Omega1 = omega_s
  std::vector<SensingRow> rows;
};

/// Gains of both two-tone schemes against a single drive at Omega1 = omega_s.
SensingScan sensing_scan(const std::vector<double>& omega1_grid, double omega_s, const NoiseModel& noise,
                         const EnsembleOptions& options = {});

struct ClockConstraint {
  double magic_ratio = 0.70710678118654752; // (w - Omega1) / Omega2
  double amplitude_ratio = 0.03;            // Omega2 / Omega1
  Variant variant = Variant::DoubleDrive;

  static ClockConstraint double_drive_experimental();
  /// Magic angle and the (c + 1/4) detuning together: ratio sqrt(8) / 5.
  static ClockConstraint double_drive_joint();
  /// Magic angle and the circular optimal detuning together: ratio sqrt(2).
  static ClockConstraint circular_joint();

  ControlScheme scheme(double omega1) const;
};

struct ClockRow {
  double omega1 = 0.0;
  std::optional<double> t2_double_drive;
  std::optional<double> t2_circular;
};

struct ClockResult {
  std::vector<ClockRow> rows;
  std::optional<std::size_t> best_double_drive;
  std::optional<std::size_t> best_circular;
  /// best circular T2 / best double-drive T2
  std::optional<double> ratio;
  /// T2* used for scaling; 1 when reported in physical units
  double time_unit = 1.0;
};

/// T2 scans of both clock protocols over Omega1. With t2_star_scaled the grid
/// is read in units of 1/T2* and T2 is reported in units of T2*.
ClockResult clock_comparison(bool t2_star_scaled, const std::vector<double>& omega1_grid, const NoiseModel& noise,
                             const EnsembleOptions& options = {},
                             const ClockConstraint& double_drive = ClockConstraint::double_drive_experimental(),
                             const ClockConstraint& circular = ClockConstraint::circular_joint());

} // namespace dressed
