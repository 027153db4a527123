#include "dressed/scenario.hpp"

#include "dressed/ensemble.hpp"
#include "dressed/floquet.hpp"
#include "dressed/gates.hpp"
#include "dressed/io.hpp"
#include "dressed/sensing.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dressed {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

} // namespace

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    }
    if (cfg.values_.count(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ScenarioConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("missing required key '" + key + "'");
  }
  return it->second;
}

std::string ScenarioConfig::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double ScenarioConfig::number(const std::string& key) const {
  const std::string v = text(key);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a finite number");
  }
  return out;
}

double ScenarioConfig::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long ScenarioConfig::integer(const std::string& key) const {
  const std::string v = text(key);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  }
  return out;
}

long long ScenarioConfig::integer(const std::string& key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool ScenarioConfig::flag(const std::string& key, bool fallback) const {
  if (!has(key)) {
    return fallback;
  }
  const std::string v = lower(text(key));
  if (v == "true" || v == "1" || v == "yes") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no") {
    return false;
  }
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<long long> ScenarioConfig::integer_list(const std::string& key,
                                                    const std::vector<long long>& fallback) const {
  if (!has(key)) {
    return fallback;
  }
  std::vector<long long> out;
  std::stringstream ss(text(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    ScenarioConfig one;
    one.values_[key] = trim(item);
    out.push_back(one.integer(key));
  }
  if (out.empty()) {
    throw ConfigError("key '" + key + "': empty list");
  }
  return out;
}

void ScenarioConfig::reject_unknown(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    if (!allowed.count(k)) {
      throw ConfigError("unknown key '" + k + "'");
    }
  }
}

namespace {

using json = nlohmann::json;

const std::set<std::string> kCommonKeys{"scenario", "seed", "output_dir", "threads", "budget"};
const std::set<std::string> kSchemeKeys{"scheme.variant", "scheme.omega1", "scheme.omega2",
                                        "scheme.mod_freq", "scheme.phase",  "scheme.cross_corr"};
const std::set<std::string> kNoiseKeys{"noise.t2_star", "noise.sigma_delta", "noise.sigma_eps",
                                       "noise.n_realizations"};

std::set<std::string> keys_for(const std::string& scenario) {
  std::set<std::string> k = kCommonKeys;
  auto add = [&](const std::set<std::string>& more) { k.insert(more.begin(), more.end()); };
  if (scenario == "coherence") {
    add(kSchemeKeys);
    add(kNoiseKeys);
    add({"coherence.horizon", "coherence.phases_per_period", "coherence.substeps_per_phase",
         "coherence.max_doublings", "coherence.max_points"});
  } else if (scenario == "floquet") {
    add(kSchemeKeys);
    add(kNoiseKeys);
    add({"floquet.order", "floquet.harmonic", "floquet.quad_order"});
  } else if (scenario == "optimum") {
    add(kNoiseKeys);
    add({"optimum.grid_points", "optimum.simulate", "optimum.max_doublings"});
  } else if (scenario == "gate1q") {
    add({"gate1q.variant", "gate1q.ratio_min", "gate1q.ratio_max", "gate1q.ratio_points", "gate1q.n"});
  } else if (scenario == "gate2q") {
    add({"gate2q.nu", "gate2q.eta", "gate2q.omega1", "gate2q.nbar", "gate2q.n_fock", "gate2q.steps_per_period",
         "gate2q.omega2_min", "gate2q.omega2_max", "gate2q.omega2_points"});
  } else if (scenario == "sensing") {
    add(kNoiseKeys);
    add({"sensing.omega_s", "sensing.omega1_min", "sensing.omega1_max", "sensing.omega1_points"});
  } else if (scenario == "clock") {
    add(kNoiseKeys);
    add({"clock.t2_star_scaled", "clock.omega1_min", "clock.omega1_max", "clock.omega1_points",
         "clock.dd_ratio", "clock.magic_ratio"});
  } else {
    throw ConfigError("key 'scenario': unknown scenario '" + scenario + "'");
  }
  return k;
}

double positive(const ScenarioConfig& c, const std::string& key, double fallback) {
  const double v = c.number(key, fallback);
  if (!(v > 0.0)) {
    throw ConfigError("key '" + key + "' must be positive");
  }
  return v;
}

double positive(const ScenarioConfig& c, const std::string& key) {
  const double v = c.number(key);
  if (!(v > 0.0)) {
    throw ConfigError("key '" + key + "' must be positive");
  }
  return v;
}

long long at_least(const ScenarioConfig& c, const std::string& key, long long fallback, long long min) {
  const long long v = c.integer(key, fallback);
  if (v < min) {
    throw ConfigError("key '" + key + "' must be >= " + std::to_string(min));
  }
  return v;
}

ControlScheme read_scheme(const ScenarioConfig& c) {
  const Variant v = [&] {
    try {
      return parse_variant(c.text("scheme.variant"));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("key 'scheme.variant': ") + e.what());
    }
  }();
  const double o1 = positive(c, "scheme.omega1");
  const double o2 = c.number("scheme.omega2", 0.0);
  const double w = c.number("scheme.mod_freq", 0.0);
  if (o2 < 0.0) {
    throw ConfigError("key 'scheme.omega2' must be non-negative");
  }
  if (w < 0.0) {
    throw ConfigError("key 'scheme.mod_freq' must be non-negative (0 selects the optimal detuning)");
  }
  switch (v) {
  case Variant::SingleDrive:
    if (o2 != 0.0) {
      throw ConfigError("key 'scheme.omega2' must be 0 for a single drive");
    }
    return ControlScheme::single_drive(o1);
  case Variant::DoubleDrive:
    return ControlScheme::double_drive(o1, positive(c, "scheme.omega2"), w, c.number("scheme.cross_corr", 1.0));
  case Variant::PhaseModulated:
    return ControlScheme::phase_modulated(o1, positive(c, "scheme.omega2"), w);
  case Variant::CircularDressed:
    return ControlScheme::circular(o1, positive(c, "scheme.omega2"), w, c.number("scheme.phase", 0.0));
  }
  throw ConfigError("key 'scheme.variant': unsupported");
}

NoiseModel read_noise(const ScenarioConfig& c, const RunSettings* s, double t2_star_default = -1.0,
                      double sigma_eps_default = -1.0) {
  NoiseModel n;
  if (c.has("noise.t2_star") && c.has("noise.sigma_delta")) {
    throw ConfigError("keys 'noise.t2_star' and 'noise.sigma_delta' are mutually exclusive");
  }
  if (c.has("noise.sigma_delta")) {
    n.sigma_delta = c.number("noise.sigma_delta");
    if (n.sigma_delta < 0.0) {
      throw ConfigError("key 'noise.sigma_delta' must be non-negative");
    }
  } else if (c.has("noise.t2_star") || t2_star_default < 0.0) {
    n.sigma_delta = std::sqrt(2.0) / positive(c, "noise.t2_star");
  } else {
    n.sigma_delta = std::sqrt(2.0) / t2_star_default;
  }
  n.sigma_eps = sigma_eps_default < 0.0 ? c.number("noise.sigma_eps") : c.number("noise.sigma_eps", sigma_eps_default);
  if (n.sigma_eps < 0.0) {
    throw ConfigError("key 'noise.sigma_eps' must be non-negative");
  }
  n.n_realizations = static_cast<int>(at_least(c, "noise.n_realizations", 2048, 1));
  const long long seed = c.integer("seed", 0);
  if (seed < 0) {
    throw ConfigError("key 'seed' must be non-negative");
  }
  n.seed = static_cast<std::uint64_t>(seed);
  if (s && s->seed) {
    n.seed = *s->seed;
  }
  return n;
}

std::vector<double> linear_grid(double lo, double hi, long long n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

struct GridSpec {
  double lo, hi;
  long long n;
};

GridSpec read_grid(const ScenarioConfig& c, const std::string& prefix, double lo, double hi, long long n) {
  GridSpec g{positive(c, prefix + "_min", lo), positive(c, prefix + "_max", hi),
             at_least(c, prefix + "_points", n, 1)};
  if (g.hi < g.lo) {
    throw ConfigError("key '" + prefix + "_max' must be >= '" + prefix + "_min'");
  }
  return g;
}

const double kGate2qNu = kTwoPi * 98.8e3;

IonGateConfig read_gate2q(const ScenarioConfig& c) {
  IonGateConfig g;
  g.nu = positive(c, "gate2q.nu", kGate2qNu);
  g.eta = positive(c, "gate2q.eta", 0.033);
  g.omega1 = c.number("gate2q.omega1", 0.0);
  g.nbar = c.number("gate2q.nbar", 0.6);
  g.n_fock = at_least(c, "gate2q.n_fock", 30, 10);
  g.steps_per_period = static_cast<int>(at_least(c, "gate2q.steps_per_period", 100, 8));
  g.validate();
  return g;
}

struct Prepared {
  std::string scenario;
  double cost = 0.0;
};

// Range checks shared by validate and run; returns the cost estimate.
Prepared prepare(const ScenarioConfig& c) {
  Prepared p;
  p.scenario = c.text("scenario");
  c.reject_unknown(keys_for(p.scenario));
  at_least(c, "threads", 0, 0);
  const std::string& s = p.scenario;
  if (s == "coherence") {
    const ControlScheme scheme = read_scheme(c);
    const NoiseModel n = read_noise(c, nullptr);
    const double horizon = positive(c, "coherence.horizon");
    const long long ppp = at_least(c, "coherence.phases_per_period", 16, 1);
    at_least(c, "coherence.substeps_per_phase", 0, 0);
    const long long doublings = at_least(c, "coherence.max_doublings", 4, 0);
    const long long max_points = at_least(c, "coherence.max_points", 20000, 2);
    const double period = scheme.periodic() ? scheme.period() : kTwoPi / scheme.omega1;
    const double points = std::min<double>(static_cast<double>(max_points), horizon / period * ppp);
    p.cost = n.n_realizations * points * std::pow(2.0, static_cast<double>(doublings));
  } else if (s == "floquet") {
    const ControlScheme scheme = read_scheme(c);
    read_noise(c, nullptr);
    FloquetConfig fc;
    fc.order = static_cast<int>(c.integer("floquet.order", 4));
    fc.harmonic = static_cast<int>(c.integer("floquet.harmonic", 2));
    fc.validate();
    const long long q = at_least(c, "floquet.quad_order", 21, 9);
    if (scheme.variant != Variant::CircularDressed) {
      throw ConfigError("key 'scheme.variant': the floquet scenario needs the circular scheme");
    }
    p.cost = static_cast<double>(q * q) * std::pow(fc.truncation_dim(), 3);
  } else if (s == "optimum") {
    read_noise(c, nullptr, 1.0);
    if (!(c.number("noise.sigma_eps") > 0.0)) {
      throw ConfigError("key 'noise.sigma_eps' must be positive");
    }
    const long long g = at_least(c, "optimum.grid_points", 41, 2);
    at_least(c, "optimum.max_doublings", 4, 0);
    p.cost = static_cast<double>(g * g);
    if (c.flag("optimum.simulate", false)) {
      p.cost += c.integer("noise.n_realizations", 2048) * 20000.0;
    }
  } else if (s == "gate1q") {
    const Variant v = parse_variant(c.text("gate1q.variant", "double"));
    if (v != Variant::DoubleDrive && v != Variant::CircularDressed) {
      throw ConfigError("key 'gate1q.variant' must be double or circular");
    }
    const GridSpec g = read_grid(c, "gate1q.ratio", 1.0, 30.0, 291);
    if (g.lo < 1.0) {
      throw ConfigError("key 'gate1q.ratio_min' must be >= 1");
    }
    const auto ns = c.integer_list("gate1q.n", {1, 2, 4});
    for (long long n : ns) {
      if (n < 1) {
        throw ConfigError("key 'gate1q.n' entries must be positive");
      }
    }
    p.cost = static_cast<double>(g.n * static_cast<long long>(ns.size())) * g.hi * 1e3;
  } else if (s == "gate2q") {
    const IonGateConfig g = read_gate2q(c);
    const GridSpec grid = read_grid(c, "gate2q.omega2", kTwoPi * 45e3, kTwoPi * 185e3, 29);
    if (!(grid.hi < g.nu + g.resolved_omega1())) {
      throw ConfigError("key 'gate2q.omega2_max' must lie below nu + omega1");
    }
    p.cost = 2.0 * static_cast<double>(grid.n) * g.steps_per_period * std::pow(4.0 * g.n_fock, 3);
  } else if (s == "sensing") {
    const NoiseModel n = read_noise(c, nullptr, 1e-6, 0.005);
    const double ws = positive(c, "sensing.omega_s", kTwoPi * 200e6);
    const GridSpec g = read_grid(c, "sensing.omega1", kTwoPi * 60e6, kTwoPi * 190e6, 14);
    if (!(g.hi < ws)) {
      throw ConfigError("key 'sensing.omega1_max' must lie below sensing.omega_s");
    }
    p.cost = (2.0 * static_cast<double>(g.n) + 1.0) * n.n_realizations * 20000.0;
  } else if (s == "clock") {
    const NoiseModel n = read_noise(c, nullptr, 1.0, 0.005);
    c.flag("clock.t2_star_scaled", true);
    const GridSpec g = read_grid(c, "clock.omega1", 1.0, 1000.0, 16);
    positive(c, "clock.dd_ratio", 0.03);
    positive(c, "clock.magic_ratio", 1.0 / std::sqrt(2.0));
    p.cost = 2.0 * static_cast<double>(g.n) * n.n_realizations * 20000.0;
  }
  return p;
}

std::vector<double> log_grid(const GridSpec& g) {
  std::vector<double> out(static_cast<std::size_t>(g.n));
  for (long long i = 0; i < g.n; ++i) {
    out[static_cast<std::size_t>(i)] =
        g.n == 1 ? g.lo : g.lo * std::pow(g.hi / g.lo, static_cast<double>(i) / static_cast<double>(g.n - 1));
  }
  return out;
}

double or_nan(const std::optional<double>& v) { return v ? *v : std::nan(""); }

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out << j.dump(2) << "\n";
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream ss;
  ss.precision(prec);
  ss << v;
  return ss.str();
}

} // namespace

ValidationReport validate_scenario(const ScenarioConfig& cfg) {
  const Prepared p = prepare(cfg);
  ValidationReport r;
  r.scenario = p.scenario;
  r.cost = p.cost;
  r.budget = cfg.number("budget", 1e12);
  return r;
}

RunReport run_scenario(const ScenarioConfig& c, const RunSettings& settings) {
  const Prepared p = prepare(c);
  RunReport rep;
  rep.scenario = p.scenario;
  std::filesystem::create_directories(settings.output_dir);
  rep.csv = settings.output_dir / (p.scenario + ".csv");
  rep.meta = settings.output_dir / (p.scenario + ".meta.json");
  const int threads = settings.threads > 0 ? settings.threads : static_cast<int>(c.integer("threads", 0));
  json meta;
  meta["scenario"] = p.scenario;
  meta["config"] = c.values();
  const std::string& s = p.scenario;

  if (s == "coherence") {
    const ControlScheme scheme = read_scheme(c);
    const NoiseModel noise = read_noise(c, &settings);
    EnsembleOptions opts;
    opts.phases_per_period = static_cast<int>(c.integer("coherence.phases_per_period", 16));
    opts.substeps_per_phase = static_cast<int>(c.integer("coherence.substeps_per_phase", 0));
    opts.threads = threads;
    const CoherenceRun run =
        coherence_time(scheme, noise, c.number("coherence.horizon"), opts,
                       static_cast<int>(c.integer("coherence.max_doublings", 4)),
                       static_cast<std::size_t>(c.integer("coherence.max_points", 20000)));
    write_coherence_csv(rep.csv, run.curve);
    rep.rows = run.curve.times.size();
    meta.update(coherence_metadata(scheme, noise, run.curve));
    meta["doublings"] = run.doublings;
    rep.summary = run.curve.t2 ? "T2 = " + fmt(*run.curve.t2) + " s"
                               : "T2 beyond horizon " + fmt(run.horizon) + " s";
  } else if (s == "floquet") {
    const ControlScheme scheme = read_scheme(c);
    const NoiseModel noise = read_noise(c, &settings);
    FloquetConfig fc;
    fc.order = static_cast<int>(c.integer("floquet.order", 4));
    fc.harmonic = static_cast<int>(c.integer("floquet.harmonic", 2));
    const int q = static_cast<int>(c.integer("floquet.quad_order", 21));
    const GapStatistics stats = gap_variance(scheme, noise, q, fc);
    const auto [x, w] = gauss_hermite(q);
    CsvWriter csv(rep.csv, {"delta_rad_s", "eps", "weight", "gap_rad_s"});
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        const NoiseRealization r{noise.sigma_delta * x[i], noise.sigma_eps * x[j]};
        csv.row(std::vector<double>{r.delta, r.eps, w[i] * w[j], perturbed_gap(scheme, r, fc)});
        ++rep.rows;
      }
    }
    meta["scheme"] = scheme_json(scheme);
    meta["noise"] = noise_json(noise);
    meta["truncation_dim"] = fc.truncation_dim();
    meta["mean_gap"] = stats.mean_gap;
    meta["var_gap"] = stats.var_gap;
    meta["t2_bar"] = std::isfinite(stats.t2_bar) ? json(stats.t2_bar) : json(nullptr);
    meta["t2_app"] = json(nullptr);
    if (scheme.omega2 > 0.0 && noise.sigma_delta > 0.0) {
      if (const auto a = t2_app(scheme.omega1, scheme.omega2, noise.sigma_eps, std::sqrt(2.0) / noise.sigma_delta)) {
        meta["t2_app"] = *a;
      }
    }
    rep.summary = "T2bar = " + fmt(stats.t2_bar) + " s, Var(gap) = " + fmt(stats.var_gap);
  } else if (s == "optimum") {
    const NoiseModel noise = read_noise(c, &settings, 1.0);
    const double t2s = std::sqrt(2.0) / noise.sigma_delta;
    const GlobalOptimum opt = global_optimum(noise.sigma_eps, t2s);
    const long long g = c.integer("optimum.grid_points", 41);
    CsvWriter csv(rep.csv, {"omega1_rad_s", "omega2_rad_s", "t2_app_s"});
    const auto o1s = log_grid({0.1 * opt.omega1, 10.0 * opt.omega1, g});
    const auto o2s = log_grid({0.1 * opt.omega2, 10.0 * opt.omega2, g});
    for (double o1 : o1s) {
      for (double o2 : o2s) {
        csv.row(std::vector<double>{o1, o2, or_nan(t2_app(o1, o2, noise.sigma_eps, t2s))});
        ++rep.rows;
      }
    }
    meta["noise"] = noise_json(noise);
    meta["t2_star"] = t2s;
    meta["optimum"] = {{"t2_app", opt.t2},
                       {"omega1", opt.omega1},
                       {"omega2", opt.omega2},
                       {"t2_single_drive", opt.t2_single_drive},
                       {"omega1_single_drive", opt.omega1_single_drive}};
    rep.summary = "T2/T2* = " + fmt(opt.t2 / t2s) + " at Omega1 T2* = " + fmt(opt.omega1 * t2s) +
                  ", Omega2 T2* = " + fmt(opt.omega2 * t2s);
    if (c.flag("optimum.simulate", false)) {
      EnsembleOptions opts;
      opts.threads = threads;
      const ControlScheme scheme = ControlScheme::circular(opt.omega1, opt.omega2);
      const CoherenceRun run = coherence_time(scheme, noise, 4.0 * opt.t2, opts,
                                              static_cast<int>(c.integer("optimum.max_doublings", 4)));
      meta["simulated"] = coherence_metadata(scheme, noise, run.curve);
      rep.summary += run.curve.t2 ? ", simulated T2/T2* = " + fmt(*run.curve.t2 / t2s)
                                  : ", simulated T2 beyond horizon";
    }
  } else if (s == "gate1q") {
    const Variant v = parse_variant(c.text("gate1q.variant", "double"));
    const GridSpec g = read_grid(c, "gate1q.ratio", 1.0, 30.0, 291);
    const auto ns = c.integer_list("gate1q.n", {1, 2, 4});
    std::vector<std::string> header{"ratio"};
    for (long long n : ns) {
      header.push_back("infidelity_n" + std::to_string(n));
    }
    CsvWriter csv(rep.csv, header);
    double worst_above_10 = 0.0;
    for (double ratio : linear_grid(g.lo, g.hi, g.n)) {
      std::vector<double> row{ratio};
      for (long long n : ns) {
        row.push_back(gate1q_infidelity(ratio, static_cast<int>(n), v));
        if (ratio >= 10.0) {
          worst_above_10 = std::max(worst_above_10, row.back());
        }
      }
      csv.row(row);
      ++rep.rows;
    }
    meta["variant"] = std::string(to_string(v));
    rep.summary = "max infidelity at ratio >= 10: " + fmt(worst_above_10);
  } else if (s == "gate2q") {
    const IonGateConfig g = read_gate2q(c);
    const GridSpec grid = read_grid(c, "gate2q.omega2", kTwoPi * 45e3, kTwoPi * 185e3, 29);
    const auto rows = gate2q_scan(g, linear_grid(grid.lo, grid.hi, grid.n), threads);
    CsvWriter csv(rep.csv, {"omega2_rad_s", "infidelity_s0", "infidelity_s1"});
    std::size_t b0 = 0, b1 = 0;
    json points = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      csv.row(std::vector<double>{rows[i].omega2, rows[i].s0.infidelity, rows[i].s1.infidelity});
      ++rep.rows;
      b0 = rows[i].s0.infidelity < rows[b0].s0.infidelity ? i : b0;
      b1 = rows[i].s1.infidelity < rows[b1].s1.infidelity ? i : b1;
      points.push_back({{"omega2", rows[i].omega2},
                        {"t_gate_s0", rows[i].s0.optimal_t_gate},
                        {"t_gate_s1", rows[i].s1.optimal_t_gate},
                        {"purity_s0", rows[i].s0.purity},
                        {"purity_s1", rows[i].s1.purity}});
    }
    meta["gate"] = {{"nu", g.nu},         {"eta", g.eta},         {"omega1", g.resolved_omega1()},
                    {"nbar", g.nbar},     {"n_fock", g.n_fock},   {"steps_per_period", g.steps_per_period},
                    {"t_gate_hint", g.resolved_t_gate()}};
    meta["points"] = points;
    meta["minimum_s0"] = {{"omega2", rows[b0].omega2}, {"infidelity", rows[b0].s0.infidelity}};
    meta["minimum_s1"] = {{"omega2", rows[b1].omega2}, {"infidelity", rows[b1].s1.infidelity}};
    rep.summary = "min infidelity s=0 " + fmt(rows[b0].s0.infidelity) + " at " +
                  fmt(rows[b0].omega2 / kTwoPi / 1e3) + " kHz, s=1 " + fmt(rows[b1].s1.infidelity) + " at " +
                  fmt(rows[b1].omega2 / kTwoPi / 1e3) + " kHz, ratio " +
                  fmt(rows[b0].s0.infidelity / rows[b1].s1.infidelity);
  } else if (s == "sensing") {
    const NoiseModel noise = read_noise(c, &settings, 1e-6, 0.005);
    const double ws = c.number("sensing.omega_s", kTwoPi * 200e6);
    const GridSpec g = read_grid(c, "sensing.omega1", kTwoPi * 60e6, kTwoPi * 190e6, 14);
    EnsembleOptions opts;
    opts.threads = threads;
    const SensingScan scan = sensing_scan(linear_grid(g.lo, g.hi, g.n), ws, noise, opts);
    CsvWriter csv(rep.csv, {"omega1_rad_s", "gain_circular", "gain_doubledrive"});
    json points = json::array();
    double best_c = 0.0, best_d = 0.0;
    for (const SensingRow& r : scan.rows) {
      csv.row(std::vector<double>{r.omega1, r.gain_circular.gain, r.gain_double_drive.gain});
      ++rep.rows;
      best_c = std::max(best_c, r.gain_circular.gain);
      best_d = std::max(best_d, r.gain_double_drive.gain);
      points.push_back({{"omega1", r.omega1},
                        {"omega2_circular", r.circular.scheme.omega2},
                        {"omega2_double", r.double_drive.scheme.omega2},
                        {"alpha_circular", r.circular.alpha.alpha},
                        {"alpha_double", r.double_drive.alpha.alpha},
                        {"t2_circular", *r.circular.t2},
                        {"t2_double", *r.double_drive.t2},
                        {"t2_circular_lower_bound", r.circular.t2_lower_bound},
                        {"t2_double_lower_bound", r.double_drive.t2_lower_bound}});
    }
    meta["noise"] = noise_json(noise);
    meta["omega_s"] = ws;
    meta["reference"] = {{"alpha", scan.reference.alpha.alpha},
                         {"t2", *scan.reference.t2},
                         {"t2_lower_bound", scan.reference.t2_lower_bound}};
    meta["points"] = points;
    rep.summary = "max gain circular " + fmt(best_c) + ", double drive " + fmt(best_d);
  } else if (s == "clock") {
    const NoiseModel noise = read_noise(c, &settings, 1.0, 0.005);
    const bool scaled = c.flag("clock.t2_star_scaled", true);
    const GridSpec g = read_grid(c, "clock.omega1", 1.0, 1000.0, 16);
    ClockConstraint dd = ClockConstraint::double_drive_experimental();
    dd.amplitude_ratio = c.number("clock.dd_ratio", 0.03);
    dd.magic_ratio = c.number("clock.magic_ratio", 1.0 / std::sqrt(2.0));
    ClockConstraint circ = ClockConstraint::circular_joint();
    EnsembleOptions opts;
    opts.threads = threads;
    const ClockResult r = clock_comparison(scaled, log_grid(g), noise, opts, dd, circ);
    CsvWriter csv(rep.csv, {"omega1_scaled", "t2_scaled_dd", "t2_scaled_circ"});
    for (const ClockRow& row : r.rows) {
      csv.row(std::vector<double>{row.omega1, or_nan(row.t2_double_drive), or_nan(row.t2_circular)});
      ++rep.rows;
    }
    meta["noise"] = noise_json(noise);
    meta["t2_star_scaled"] = scaled;
    meta["time_unit_s"] = r.time_unit;
    meta["double_drive"] = {{"amplitude_ratio", dd.amplitude_ratio}, {"magic_ratio", dd.magic_ratio}};
    meta["ratio"] = r.ratio ? json(*r.ratio) : json(nullptr);
    rep.summary = r.ratio ? "T2 ratio circular / double drive = " + fmt(*r.ratio) : "no finite T2 optimum";
  }
  write_json(rep.meta, meta);
  return rep;
}

} // namespace dressed
