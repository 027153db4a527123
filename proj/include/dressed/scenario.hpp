#pragma once

// Flat key = value scenario files and the batch drivers behind the CLI.

#include "dressed/control.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dressed {

/// Parsed `key = value` lines; '#' starts a comment. Accessors name the
/// offending key in every error.
class ScenarioConfig {
public:
  static ScenarioConfig parse(const std::string& text);
  static ScenarioConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<long long> integer_list(const std::string& key, const std::vector<long long>& fallback) const;

  /// Throws ConfigError naming the first key outside `allowed`.
  void reject_unknown(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

inline const std::vector<std::string> kScenarios{"coherence", "floquet", "optimum", "gate1q",
                                                 "gate2q",    "sensing", "clock"};

struct RunSettings {
  std::filesystem::path output_dir = ".";
  std::optional<std::uint64_t> seed; // overrides the config
  int threads = 0;
  bool quiet = false;
};

struct ValidationReport {
  std::string scenario;
  /// Abstract work units, roughly propagator steps.
  double cost = 0.0;
  double budget = 0.0;
  bool over_budget() const { return cost > budget; }
};

struct RunReport {
  std::string scenario;
  std::string summary;
  std::filesystem::path csv;
  std::filesystem::path meta;
  std::size_t rows = 0;
};

/// Schema and range checks plus a cost estimate without running anything.
ValidationReport validate_scenario(const ScenarioConfig& cfg);

/// Runs the scenario, writing <scenario>.csv and <scenario>.meta.json.
RunReport run_scenario(const ScenarioConfig& cfg, const RunSettings& settings);

/// Command-line front end; returns the process exit code (0 ok, 2 config, 3 numerical).
int run_cli(int argc, const char* const* argv);

} // namespace dressed
