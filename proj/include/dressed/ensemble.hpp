#pragma once

// Quasi-static noise ensembles, ensemble-averaged memory fidelity and T2.

#include "dressed/propagation.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace dressed {

/// (2 + 1/e) / 3, the fidelity of a fully 1/e-decayed memory.
inline constexpr double kT2Threshold = (2.0 + 0.36787944117144233) / 3.0;

struct SobolConfig {
  int n_points = 2048;
  std::uint64_t seed = 0;
  static constexpr int dims = 2;

  void validate() const;
};

/// Scrambled Sobol points mapped to independent Gaussians (delta, eps) with
/// standard deviations (sigma_delta, sigma_eps).
std::vector<NoiseRealization> sobol_gaussian_pairs(const SobolConfig& cfg, const NoiseModel& noise);

struct CoherenceCurve {
  std::vector<double> times;
  std::vector<double> fidelity;
  std::vector<double> envelope;
  /// Empty when the envelope stays above the threshold over the whole grid.
  std::optional<double> t2;
  bool multiple_crossings = false;

  bool beyond_horizon() const { return !t2.has_value(); }
};

struct EnsembleOptions {
  int phases_per_period = 16;
  /// Magnus steps per phase slot; 0 picks one from the drive strength.
  int substeps_per_phase = 0;
  int threads = 0;
  /// Envelope block width; 0 uses default_envelope_window().
  double envelope_window = 0.0;
};

/// F(t) = 1/3 sum_k Tr(rho_bar_k(t) rho_k^ideal(t)) for k = x, y, z, where the
/// reference co-rotates with the noiseless evolution of the same scheme.
CoherenceCurve memory_fidelity(const ControlScheme& scheme, const NoiseModel& noise, std::span<const double> times,
                               const EnsembleOptions& options = {});
CoherenceCurve memory_fidelity(const ControlScheme& scheme, std::span<const NoiseRealization> realizations,
                               std::span<const double> times, const EnsembleOptions& options = {});

/// Fidelity of a single realization against the ideal evolution,
/// (2 + |Tr(U_ideal^dag U)|^2) / 6.
double realization_fidelity(const Eigen::Matrix2cd& ideal, const Eigen::Matrix2cd& actual);

/// 2 pi / |z| of the ideal dressed splitting, 2 pi / Omega1 for a single drive.
double default_envelope_window(const ControlScheme& scheme);

/// Forward sliding maximum env(t) = max F over [t, t + window]. Bounds the
/// curve from above, equals it on monotone decays and is non-increasing
/// wherever the oscillation peaks decay.
std::vector<double> upper_envelope(std::span<const double> times, std::span<const double> values, double window);

struct T2Estimate {
  std::optional<double> t2;
  bool multiple_crossings = false;
};

/// First downward crossing of kT2Threshold, linearly interpolated.
T2Estimate extract_t2(std::span<const double> times, std::span<const double> envelope);
T2Estimate extract_t2(const CoherenceCurve& curve);

/// Multiples of T / P up to `horizon`, thinned by a constant stride so that at
/// most max_points remain. Aperiodic schemes use T = 2 pi / Omega1.
std::vector<double> stroboscopic_grid(const ControlScheme& scheme, double horizon, int phases_per_period = 16,
                                      std::size_t max_points = 20000);

struct CoherenceRun {
  CoherenceCurve curve;
  double horizon = 0.0;
  int doublings = 0;
};

/// memory_fidelity on a stroboscopic grid; the horizon doubles until the
/// envelope crosses or max_doublings is exhausted.
CoherenceRun coherence_time(const ControlScheme& scheme, const NoiseModel& noise, double horizon,
                            const EnsembleOptions& options = {}, int max_doublings = 4,
                            std::size_t max_points = 20000);

using SchemeFamily = std::function<ControlScheme(const std::vector<double>&)>;
using HorizonRule = std::function<double(const ControlScheme&)>;

struct ScanEntry {
  std::vector<double> params;
  ControlScheme scheme;
  std::optional<double> t2;
  double horizon = 0.0;
  bool multiple_crossings = false;
};

struct ScanResult {
  std::vector<ScanEntry> entries;
  /// Index of the largest finite T2.
  std::optional<std::size_t> best;
};

ScanResult t2_scan(const SchemeFamily& family, const NoiseModel& noise, const std::vector<std::vector<double>>& grid,
                   const HorizonRule& horizon, const EnsembleOptions& options = {}, int max_doublings = 4,
                   std::size_t max_points = 20000);

/// time_s, fidelity, envelope.
void write_coherence_csv(const std::filesystem::path& path, const CoherenceCurve& curve);
nlohmann::json scheme_json(const ControlScheme& scheme);
nlohmann::json noise_json(const NoiseModel& noise);
nlohmann::json coherence_metadata(const ControlScheme& scheme, const NoiseModel& noise, const CoherenceCurve& curve);

} // namespace dressed
