#include "dressed/ensemble.hpp"

#include "dressed/io.hpp"
#include "dressed/parallel.hpp"
#include "dressed/sobol.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace dressed {

void SobolConfig::validate() const {
  if (n_points < 1) {
    throw ConfigError("SobolConfig: n_points must be >= 1");
  }
}

std::vector<NoiseRealization> sobol_gaussian_pairs(const SobolConfig& cfg, const NoiseModel& noise) {
  cfg.validate();
  noise.validate();
  const ScrambledSobol2D sobol(cfg.seed);
  std::vector<NoiseRealization> out(static_cast<std::size_t>(cfg.n_points));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto u = sobol.point(static_cast<std::uint32_t>(i));
    out[i].delta = noise.sigma_delta == 0.0 ? 0.0 : noise.sigma_delta * inverse_normal_cdf(u[0]);
    out[i].eps = noise.sigma_eps == 0.0 ? 0.0 : noise.sigma_eps * inverse_normal_cdf(u[1]);
  }
  return out;
}

double realization_fidelity(const Eigen::Matrix2cd& ideal, const Eigen::Matrix2cd& actual) {
  return (2.0 + std::norm((ideal.adjoint() * actual).trace())) / 6.0;
}

double default_envelope_window(const ControlScheme& scheme) {
  scheme.validate();
  if (!scheme.periodic()) {
    return kTwoPi / scheme.omega1;
  }
  const double z = std::hypot(scheme.mod_freq - scheme.omega1, scheme.omega2);
  return kTwoPi / z;
}

namespace {

constexpr std::size_t kChunk = 32;

int auto_substeps(const ControlScheme& scheme, std::span<const NoiseRealization> realizations, int phases) {
  double max_delta = 0.0, max_eps = 0.0;
  for (const auto& r : realizations) {
    max_delta = std::max(max_delta, std::abs(r.delta));
    max_eps = std::max(max_eps, std::abs(r.eps));
  }
  const double field = std::hypot(scheme.omega1, 2.0 * scheme.omega2) * (1.0 + max_eps) + max_delta;
  const double slot = scheme.period() / phases;
  return std::max(4, static_cast<int>(std::ceil(slot * field / 0.02)));
}

struct GridPoint {
  bool on_grid = false;
  long long n = 0;
  int s = 0;
};

} // namespace

CoherenceCurve memory_fidelity(const ControlScheme& scheme, const NoiseModel& noise, std::span<const double> times,
                               const EnsembleOptions& options) {
  const auto realizations = sobol_gaussian_pairs(SobolConfig{noise.n_realizations, noise.seed}, noise);
  return memory_fidelity(scheme, realizations, times, options);
}

CoherenceCurve memory_fidelity(const ControlScheme& scheme, std::span<const NoiseRealization> realizations,
                               std::span<const double> times, const EnsembleOptions& options) {
  scheme.validate();
  if (realizations.empty()) {
    throw ConfigError("memory_fidelity: no realizations");
  }
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0)) {
    throw ConfigError("memory_fidelity: times must be non-negative and ascending");
  }
  const std::size_t nt = times.size();
  const std::size_t nr = realizations.size();
  const std::size_t n_chunks = (nr + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> partial_sums(n_chunks, std::vector<double>(nt, 0.0));

  if (!scheme.periodic()) {
    const Field3 ideal_field = rotating_frame_hamiltonian(scheme).field(0.0);
    parallel_for(n_chunks, resolve_threads(options.threads), [&](std::size_t c) {
      auto& acc = partial_sums[c];
      for (std::size_t r = c * kChunk; r < std::min(nr, (c + 1) * kChunk); ++r) {
        const Field3 f = rotating_frame_hamiltonian(scheme, realizations[r]).field(0.0);
        for (std::size_t i = 0; i < nt; ++i) {
          acc[i] += realization_fidelity(su2_exp(ideal_field, times[i]), su2_exp(f, times[i]));
        }
      }
    });
  } else {
    const int phases = options.phases_per_period;
    if (phases < 1) {
      throw ConfigError("memory_fidelity: phases_per_period must be >= 1");
    }
    const int sub = options.substeps_per_phase > 0 ? options.substeps_per_phase
                                                   : auto_substeps(scheme, realizations, phases);
    const double period = scheme.period();
    const double slot = period / phases;
    const QubitStroboscopic ideal(rotating_frame_hamiltonian(scheme).field, period, phases, sub);

    std::vector<GridPoint> grid(nt);
    std::vector<Eigen::Matrix2cd> ideal_u(nt);
    for (std::size_t i = 0; i < nt; ++i) {
      const double q = times[i] / slot;
      const double k = std::round(q);
      if (std::abs(q - k) <= 1e-9 * std::max(1.0, q)) {
        const auto kk = static_cast<long long>(k);
        grid[i] = {true, kk / phases, static_cast<int>(kk % phases)};
        ideal_u[i] = ideal.at_grid(grid[i].n, grid[i].s);
      } else {
        ideal_u[i] = ideal.at(times[i]);
      }
    }

    parallel_for(n_chunks, resolve_threads(options.threads), [&](std::size_t c) {
      auto& acc = partial_sums[c];
      std::vector<Eigen::Matrix2cd> b(static_cast<std::size_t>(phases));
      for (std::size_t r = c * kChunk; r < std::min(nr, (c + 1) * kChunk); ++r) {
        try {
          const QubitStroboscopic u(rotating_frame_hamiltonian(scheme, realizations[r]).field, period, phases, sub);
          const Eigen::Matrix2cd& q = u.schur_basis();
          const Eigen::Vector2d& phi = u.eigenphases();
          for (int s = 0; s < phases; ++s) {
            b[static_cast<std::size_t>(s)] = u.partial(s) * q;
          }
          for (std::size_t i = 0; i < nt; ++i) {
            if (!grid[i].on_grid) {
              acc[i] += realization_fidelity(ideal_u[i], u.at(times[i]));
              continue;
            }
            // U = B_s diag(d) Q^dag, so Tr(U0^dag U) = sum_k [(U0 Q)^dag B_s]_kk d_k.
            const Eigen::Matrix2cd x = ideal_u[i] * q;
            const Eigen::Matrix2cd& bs = b[static_cast<std::size_t>(grid[i].s)];
            const double n = static_cast<double>(grid[i].n);
            const Complex t0 = std::conj(x(0, 0)) * bs(0, 0) + std::conj(x(1, 0)) * bs(1, 0);
            const Complex t1 = std::conj(x(0, 1)) * bs(0, 1) + std::conj(x(1, 1)) * bs(1, 1);
            const Complex tr = t0 * std::polar(1.0, n * phi(0)) + t1 * std::polar(1.0, n * phi(1));
            acc[i] += (2.0 + std::norm(tr)) / 6.0;
          }
        } catch (const NumericalError& e) {
          throw NumericalError("realization " + std::to_string(r) + ": " + e.what());
        }
      }
    });
  }

  CoherenceCurve curve;
  curve.times.assign(times.begin(), times.end());
  curve.fidelity.assign(nt, 0.0);
  for (const auto& chunk : partial_sums) {
    for (std::size_t i = 0; i < nt; ++i) {
      curve.fidelity[i] += chunk[i];
    }
  }
  for (double& f : curve.fidelity) {
    f /= static_cast<double>(nr);
  }
  const double window = options.envelope_window > 0.0 ? options.envelope_window : default_envelope_window(scheme);
  curve.envelope = upper_envelope(curve.times, curve.fidelity, window);
  const T2Estimate est = extract_t2(curve);
  curve.t2 = est.t2;
  curve.multiple_crossings = est.multiple_crossings;
  return curve;
}

std::vector<double> upper_envelope(std::span<const double> times, std::span<const double> values, double window) {
  if (times.size() != values.size()) {
    throw ConfigError("upper_envelope: size mismatch");
  }
  if (!(window > 0.0)) {
    throw ConfigError("upper_envelope: window must be positive");
  }
  // Forward sliding maximum over [t, t + w] with a monotone deque: the curve
  // counts as coherent at t if it gets back above a level within one window.
  const std::size_t n = times.size();
  std::vector<double> env(n);
  std::deque<std::size_t> dq;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (next < n && times[next] <= times[i] + window) {
      while (!dq.empty() && values[dq.back()] <= values[next]) {
        dq.pop_back();
      }
      dq.push_back(next++);
    }
    while (dq.front() < i) {
      dq.pop_front();
    }
    env[i] = values[dq.front()];
  }
  return env;
}

T2Estimate extract_t2(std::span<const double> times, std::span<const double> envelope) {
  if (times.size() != envelope.size()) {
    throw ConfigError("extract_t2: size mismatch");
  }
  T2Estimate out;
  int crossings = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double a = envelope[i - 1], b = envelope[i];
    if (a >= kT2Threshold && b < kT2Threshold) {
      if (crossings == 0) {
        out.t2 = times[i - 1] + (a - kT2Threshold) / (a - b) * (times[i] - times[i - 1]);
      }
      ++crossings;
    }
  }
  out.multiple_crossings = crossings > 1;
  return out;
}

T2Estimate extract_t2(const CoherenceCurve& curve) { return extract_t2(curve.times, curve.envelope); }

std::vector<double> stroboscopic_grid(const ControlScheme& scheme, double horizon, int phases_per_period,
                                      std::size_t max_points) {
  scheme.validate();
  if (!(horizon > 0.0) || phases_per_period < 1 || max_points < 2) {
    throw ConfigError("stroboscopic_grid: invalid horizon, phases or point budget");
  }
  const double period = scheme.periodic() ? scheme.period() : kTwoPi / scheme.omega1;
  const double slot = period / phases_per_period;
  const auto total = static_cast<std::size_t>(std::ceil(horizon / slot));
  const std::size_t stride = std::max<std::size_t>(1, (total + max_points - 2) / (max_points - 1));
  std::vector<double> times;
  times.reserve(total / stride + 2);
  for (std::size_t k = 0; k <= total; k += stride) {
    times.push_back(static_cast<double>(k) * slot);
  }
  return times;
}

CoherenceRun coherence_time(const ControlScheme& scheme, const NoiseModel& noise, double horizon,
                            const EnsembleOptions& options, int max_doublings, std::size_t max_points) {
  noise.validate();
  const auto realizations = sobol_gaussian_pairs(SobolConfig{noise.n_realizations, noise.seed}, noise);
  CoherenceRun run;
  run.horizon = horizon;
  for (;;) {
    const auto times = stroboscopic_grid(scheme, run.horizon, options.phases_per_period, max_points);
    run.curve = memory_fidelity(scheme, realizations, times, options);
    if (!run.curve.beyond_horizon() || run.doublings >= max_doublings) {
      return run;
    }
    run.horizon *= 2.0;
    ++run.doublings;
  }
}

ScanResult t2_scan(const SchemeFamily& family, const NoiseModel& noise, const std::vector<std::vector<double>>& grid,
                   const HorizonRule& horizon, const EnsembleOptions& options, int max_doublings,
                   std::size_t max_points) {
  if (grid.empty()) {
    throw ConfigError("t2_scan: empty grid");
  }
  ScanResult result;
  for (const auto& params : grid) {
    ScanEntry entry;
    entry.params = params;
    entry.scheme = family(params);
    const CoherenceRun run = coherence_time(entry.scheme, noise, horizon(entry.scheme), options, max_doublings,
                                            max_points);
    entry.t2 = run.curve.t2;
    entry.horizon = run.horizon;
    entry.multiple_crossings = run.curve.multiple_crossings;
    result.entries.push_back(std::move(entry));
  }
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const auto& e = result.entries[i];
    if (e.t2 && (!result.best || *e.t2 > *result.entries[*result.best].t2)) {
      result.best = i;
    }
  }
  return result;
}

void write_coherence_csv(const std::filesystem::path& path, const CoherenceCurve& curve) {
  CsvWriter csv(path, {"time_s", "fidelity", "envelope"});
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    csv.row(std::vector<double>{curve.times[i], curve.fidelity[i], curve.envelope[i]});
  }
}

nlohmann::json scheme_json(const ControlScheme& s) {
  return {{"variant", std::string(to_string(s.variant))},
          {"omega1_rad_s", s.omega1},
          {"omega2_rad_s", s.omega2},
          {"mod_freq_rad_s", s.mod_freq},
          {"phase_rad", s.phase},
          {"cross_corr", s.cross_corr}};
}

nlohmann::json noise_json(const NoiseModel& n) {
  return {{"sigma_delta_rad_s", n.sigma_delta},
          {"sigma_eps", n.sigma_eps},
          {"n_realizations", n.n_realizations},
          {"seed", n.seed}};
}

nlohmann::json coherence_metadata(const ControlScheme& scheme, const NoiseModel& noise, const CoherenceCurve& curve) {
  nlohmann::json j;
  j["scheme"] = scheme_json(scheme);
  j["noise"] = noise_json(noise);
  j["seed"] = noise.seed;
  j["t2_seconds"] = curve.t2 ? nlohmann::json(*curve.t2) : nlohmann::json(nullptr);
  j["beyond_horizon"] = curve.beyond_horizon();
  j["multiple_crossings"] = curve.multiple_crossings;
  j["horizon_seconds"] = curve.times.empty() ? 0.0 : curve.times.back();
  return j;
}

} // namespace dressed
