#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dressed/scenario.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace dressed;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dressed_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "scenario.cfg";
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Captured {
  int code = 0;
  std::string out, err;
};

Captured cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dressedsim");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  Captured c;
  c.code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  c.out = out.str();
  c.err = err.str();
  return c;
}

std::size_t data_rows(const fs::path& csv) {
  std::istringstream in(slurp(csv));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
  }
  return n - 1;
}

const char* kGate1q = "scenario = gate1q\n"
                      "gate1q.variant = double\n"
                      "gate1q.ratio_min = 2\n"
                      "gate1q.ratio_max = 6\n"
                      "gate1q.ratio_points = 5\n"
                      "gate1q.n = 1,2\n";

} // namespace

TEST_CASE("config parser handles comments, blanks and typed accessors") {
  const auto c = ScenarioConfig::parse("# header\n\nscenario = optimum  # trailing\n"
                                       "noise.sigma_eps=0.005\nseed = 7\nflag = yes\nlist = 1, 2,4\n");
  CHECK(c.text("scenario") == "optimum");
  CHECK(c.number("noise.sigma_eps") == 0.005);
  CHECK(c.integer("seed") == 7);
  CHECK(c.flag("flag", false));
  CHECK(c.integer_list("list", {}) == std::vector<long long>{1, 2, 4});
  CHECK(c.number("missing", 3.5) == 3.5);
  CHECK_THROWS_WITH_AS(c.number("missing"), doctest::Contains("'missing'"), ConfigError);
  CHECK_THROWS_WITH_AS(c.integer("noise.sigma_eps"), doctest::Contains("'noise.sigma_eps'"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse("a = 1\na = 2\n"), ConfigError);
}

TEST_CASE("validation names missing, unknown and out-of-range keys") {
  auto expect = [](const std::string& body, const std::string& needle) {
    CHECK_THROWS_WITH_AS(validate_scenario(ScenarioConfig::parse(body)), doctest::Contains(needle.c_str()), ConfigError);
  };
  expect("seed = 1\n", "'scenario'");
  expect("scenario = nope\n", "'scenario'");
  expect("scenario = coherence\nscheme.variant = circular\nscheme.omega1 = -5\nscheme.omega2 = 1\n"
         "noise.t2_star = 1\nnoise.sigma_eps = 0\ncoherence.horizon = 10\n",
         "'scheme.omega1'");
  expect("scenario = coherence\nscheme.variant = circular\nscheme.omega1 = 5\nscheme.omega2 = 1\n"
         "noise.t2_star = 1\nnoise.sigma_eps = 0\n",
         "'coherence.horizon'");
  expect("scenario = optimum\nnoise.sigma_eps = 0.005\nbogus.key = 1\n", "'bogus.key'");
  expect("scenario = gate2q\ngate2q.n_fock = 4\n", "n_fock");
  expect("scenario = gate1q\ngate1q.ratio_min = 5\ngate1q.ratio_max = 2\n", "'gate1q.ratio_max'");
}

TEST_CASE("exit codes: missing key is 2 and names the key") {
  const fs::path dir = scratch("exit");
  const fs::path cfg = write_config(dir, "scenario = optimum\n");
  const Captured r = cli({"run", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("'noise.sigma_eps'") != std::string::npos);

  const fs::path neg = write_config(dir, "scenario = coherence\nscheme.variant = single\nscheme.omega1 = -1\n"
                                         "noise.t2_star = 1\nnoise.sigma_eps = 0\ncoherence.horizon = 1\n");
  const Captured r2 = cli({"validate", "--config", neg.string()});
  CHECK(r2.code == 2);
  CHECK(r2.err.find("'scheme.omega1'") != std::string::npos);

  CHECK(cli({"run"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"validate", "--config", (dir / "absent.cfg").string()}).code == 2);
}

TEST_CASE("oversize grid warns but exits 0") {
  const fs::path dir = scratch("budget");
  const fs::path cfg = write_config(dir, "scenario = gate2q\ngate2q.omega2_points = 5000\nbudget = 1e6\n");
  const Captured r = cli({"validate", "--config", cfg.string()});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK(r.out.find("gate2q: ok") != std::string::npos);

  const Captured quiet = cli({"validate", "--config", write_config(dir, kGate1q).string()});
  CHECK(quiet.code == 0);
  CHECK(quiet.err.empty());
}

TEST_CASE("gate1q run writes one row per grid point and reruns byte-identically") {
  const fs::path a = scratch("gate1q_a"), b = scratch("gate1q_b");
  const fs::path cfg = write_config(a, kGate1q);
  const Captured r = cli({"run", "--config", cfg.string(), "--out", a.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("gate1q:") != std::string::npos);
  REQUIRE(cli({"run", "-q", "--config", cfg.string(), "--out", b.string()}).code == 0);
  CHECK(data_rows(a / "gate1q.csv") == 5);
  CHECK(slurp(a / "gate1q.csv") == slurp(b / "gate1q.csv"));
  CHECK(slurp(a / "gate1q.meta.json") == slurp(b / "gate1q.meta.json"));
  CHECK(slurp(a / "gate1q.csv").rfind("ratio,infidelity_n1,infidelity_n2\r\n", 0) == 0);
}

TEST_CASE("coherence run is seeded and reproducible") {
  const fs::path a = scratch("coh_a"), b = scratch("coh_b"), c = scratch("coh_c");
  const std::string body = "scenario = coherence\nscheme.variant = circular\nscheme.omega1 = 50\n"
                           "scheme.omega2 = 20\nnoise.t2_star = 1\nnoise.sigma_eps = 0.01\n"
                           "noise.n_realizations = 64\ncoherence.horizon = 20\nseed = 3\n";
  const fs::path cfg = write_config(a, body);
  REQUIRE(cli({"run", "-q", "--config", cfg.string(), "--out", a.string()}).code == 0);
  REQUIRE(cli({"run", "-q", "--config", cfg.string(), "--out", b.string()}).code == 0);
  REQUIRE(cli({"run", "-q", "--config", cfg.string(), "--out", c.string(), "--seed", "4"}).code == 0);
  CHECK(slurp(a / "coherence.csv") == slurp(b / "coherence.csv"));
  CHECK(slurp(a / "coherence.csv") != slurp(c / "coherence.csv"));
  const auto meta = nlohmann::json::parse(slurp(a / "coherence.meta.json"));
  CHECK(meta["scenario"] == "coherence");
  CHECK(slurp(a / "coherence.csv").rfind("time_s,fidelity,envelope\r\n", 0) == 0);
}

TEST_CASE("optimum and floquet scenarios report grid-sized outputs") {
  const fs::path dir = scratch("opt");
  RunSettings s;
  s.output_dir = dir;
  const RunReport opt = run_scenario(
      ScenarioConfig::parse("scenario = optimum\nnoise.sigma_eps = 0.005\noptimum.grid_points = 7\n"), s);
  CHECK(opt.rows == 49);
  CHECK(data_rows(opt.csv) == 49);
  const auto meta = nlohmann::json::parse(slurp(opt.meta));
  CHECK(meta["optimum"]["t2_app"].get<double>() > 0.0);

  const RunReport fl = run_scenario(
      ScenarioConfig::parse("scenario = floquet\nscheme.variant = circular\nscheme.omega1 = 22\n"
                            "scheme.omega2 = 2.35\nnoise.t2_star = 1\nnoise.sigma_eps = 0.005\n"
                            "floquet.quad_order = 9\n"),
      s);
  CHECK(fl.rows == 81);
  const auto fm = nlohmann::json::parse(slurp(fl.meta));
  CHECK(fm["truncation_dim"] == 18);
  CHECK(fm["t2_bar"].get<double>() > 0.0);
}
