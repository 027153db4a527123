#pragma once

// Extended-space Floquet Hamiltonian of the circular scheme's second frame,
// Rayleigh-Schroedinger corrections to fourth order, gap statistics and the
// scaling-ansatz coherence time.

#include "dressed/control.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace dressed {

struct FloquetConfig {
  int order = 4;
  int harmonic = 2;
  Index system_dim = 2;

  /// 1 + 2 h floor(K / 2) Fourier blocks.
  int blocks() const { return 1 + 2 * harmonic * (order / 2); }
  Index truncation_dim() const { return system_dim * blocks(); }
  void validate() const;
};

struct FloquetModel {
  Eigen::Matrix2cd u0;
  /// (w - Omega1) + i Omega2.
  Complex z;
  double frequency = 0.0;
  Operator h_f;
  /// Unperturbed diagonal energies E_n^(0).
  Eigen::VectorXd e0;
  /// 0-based indices of the lower and upper level of the m = 0 block.
  Index lower = 0;
  Index upper = 0;
};

/// Unitary diagonalizer with U0^dag H^(0) U0 = -|z|/2 sigma_z.
Eigen::Matrix2cd floquet_diagonalizer(Complex z);

/// Block (i, j) holds V'^(i - j); diagonal blocks carry H'^(0) + V'^(0) + (B/2 - i) w
/// for B + 1 blocks, so the top block sits at +(B/2) w.
FloquetModel build_floquet_hamiltonian(const TimeDependentHamiltonian& components, const FloquetConfig& cfg = {});

/// E_n^(k) for k = 0..order; unused orders are zero.
std::array<double, 5> level_corrections(const FloquetModel& model, Index n, int order = 4);

/// Gap between the m = 0 pair, E_upper - E_lower, to the configured order
/// (positive, equal to |z| without noise).
double perturbed_gap(const FloquetModel& model, const FloquetConfig& cfg = {});

/// Convenience: decompose, build and evaluate the gap for one realization.
double perturbed_gap(const ControlScheme& scheme, const NoiseRealization& noise, const FloquetConfig& cfg = {});

struct GapStatistics {
  double mean_gap = 0.0;
  double var_gap = 0.0;
  /// sqrt(2 / var_gap); infinite when the variance vanishes.
  double t2_bar = 0.0;
};

/// Nodes and weights for E[f(X)], X ~ N(0, 1) (probabilists' Hermite), via
/// the Golub-Welsch eigenproblem. Weights sum to one.
std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n);

/// Var(gap) over independent Gaussian (delta, eps) by tensor Gauss-Hermite quadrature.
GapStatistics gap_variance(const ControlScheme& scheme, const NoiseModel& noise, int quad_order = 21,
                           const FloquetConfig& cfg = {});

/// Scaling-ansatz coherence time; empty when the radicand is not positive.
std::optional<double> t2_app(double omega1, double omega2, double sigma_eps, double t2_star);

struct GlobalOptimum {
  double t2 = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  /// Single-drive references 1.25 T2* / sqrt(sigma_eps) and 0.6 / (T2* sqrt(sigma_eps)).
  double t2_single_drive = 0.0;
  double omega1_single_drive = 0.0;
};

/// Maximizes t2_app over (omega1, omega2): log-spaced grid, then simplex refinement.
GlobalOptimum global_optimum(double sigma_eps, double t2_star);

/// Maximizes t2_app along omega2 = ratio * omega1.
std::pair<double, double> constrained_optimum(double ratio, double sigma_eps, double t2_star);

} // namespace dressed
