#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swh/error.hpp"
#include "swh/io.hpp"
#include "swh/scenario.hpp"

using namespace swh;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "swhrec_test_scenario" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json manifest(const fs::path& dir) { return json::parse(slurp(dir / "manifest.json")); }

ScenarioConfig small_simulation(const fs::path& dir) {
  ScenarioConfig c = preset("theorem41");
  c.integrator.t_end = 5.0;
  c.integrator.dt = 1e-3;
  c.integrator.record_every = 20;
  c.analyses.burn_in = 1.0;
  c.seeds = {SeedSpec::parse("zero", 1), SeedSpec::parse("random:3,0.4", 1), SeedSpec::parse("mode:1,0.5", 1)};
  c.output.directory = dir.string();
  c.validate();
  return c;
}

void expect_header(const fs::path& p, const std::vector<std::string>& cols) {
  ASSERT_TRUE(fs::exists(p)) << p;
  EXPECT_EQ(io::read_csv(p).header, cols) << p;
}

}  // namespace

TEST(Config, RoundTrip) {
  for (const char* name : {"zero", "decay", "theorem41", "chafee"}) {
    const ScenarioConfig c = preset(name);
    const json j = c.to_json();
    const ScenarioConfig back = ScenarioConfig::from_json(j);
    EXPECT_EQ(back.to_json(), j) << name;
    EXPECT_EQ(back.hash(), c.hash());
  }
  ScenarioConfig c = preset("theorem41");
  const std::string h = c.hash();
  c.model.b = 0.04;
  EXPECT_NE(c.hash(), h);
}

TEST(Config, ParsesLengthsAndDefaults) {
  const json j = json::parse(R"({
    "domain": {"dimension": 2, "lengths": ["pi", "2pi"], "modes": [16, 32]},
    "model": {"a": 0.25},
    "seeds": ["mode:1,2,0.1", "random:7,0.2"]
  })");
  const ScenarioConfig c = ScenarioConfig::from_json(j);
  EXPECT_DOUBLE_EQ(c.model.domain.lengths[0], std::numbers::pi);
  EXPECT_DOUBLE_EQ(c.model.domain.lengths[1], 2 * std::numbers::pi);
  EXPECT_EQ(c.model.domain.modes[1], 32);
  EXPECT_EQ(c.model.kind, ModelKind::modified_swift_hohenberg);
  EXPECT_EQ(c.forcing.kind, ForcingKind::zero);
  EXPECT_EQ(c.seeds[0].mode[1], 2);
  EXPECT_EQ(c.seeds[1].seed, 7u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  const char* bad[] = {
      R"({"modle": {}})",
      R"({"model": {"a": 0, "c": 1}})",
      R"({"model": {"a": "zero"}})",
      R"({"model": {"kind": "kuramoto"}})",
      R"({"domain": {"dimension": 3}})",
      R"({"domain": {"lengths": ["e"]}})",
      R"({"domain": {"modes": [12]}})",
      R"({"integrator": {"scheme": "rk45"}})",
      R"({"integrator": {"dt": -1}})",
      R"({"analyses": {"b_tilde": 2.0}})",
      R"({"analyses": {"eps": []}})",
      R"({"analyses": {"r0_variant": "sharp"}})",
      R"({"output": {"formats": ["parquet"]}})",
      R"({"seeds": ["mode:0,1"]})",
      R"({"seeds": ["fourier:1"]})",
      R"({"seeds": []})",
      R"({"forcing": {"kind": "zero", "components": [{"amplitude": 1, "profile": {"mode": [1]}}]}})",
      R"({"forcing": {"kind": "periodic", "components": [{"amplitude": 1, "frequency": 1, "profile": {"mode": [999]}}]}})",
      R"({"forcing": {"kind": "periodic", "components": [{"amplitude": 1, "frequency": 1, "profile": {"mode": [1], "coeffs": [1]}}]}})",
      R"({"sweep": {"axis": "q", "grid": [1]}})",
  };
  for (const char* text : bad) EXPECT_THROW(ScenarioConfig::from_json(json::parse(text)), ConfigError) << text;
  EXPECT_THROW(ScenarioConfig::load("/nonexistent/config.json"), ConfigError);
  EXPECT_THROW(preset("nope"), ConfigError);
}

TEST(Config, SeedSyntax) {
  EXPECT_EQ(SeedSpec::parse("zero", 1).kind, SeedSpec::Kind::zero);
  const auto e = SeedSpec::parse("equilibrium:e2", 1);
  EXPECT_EQ(e.kind, SeedSpec::Kind::equilibrium);
  EXPECT_EQ(e.equilibrium_id, "e2");
  const auto m = SeedSpec::parse("mode:3,-0.25", 1);
  EXPECT_EQ(m.mode[0], 3);
  EXPECT_DOUBLE_EQ(m.amplitude, -0.25);
  const auto r = SeedSpec::parse("random:11,0.5", 1);
  EXPECT_EQ(r.seed, 11u);
  EXPECT_DOUBLE_EQ(r.scale, 0.5);
  for (const auto& s : {m, r, e}) EXPECT_EQ(SeedSpec::parse(s.to_string(1), 1).to_string(1), s.to_string(1));
  for (const char* text : {"zero:1", "mode:1", "mode:1,2,3", "random:x,1", "equilibrium:", "", "Zero"}) {
    EXPECT_THROW(SeedSpec::parse(text, 1), ConfigError) << text;
  }
  EXPECT_NO_THROW(SeedSpec::parse("mode:1,2,3", 2));
}

TEST(Config, ForcingRescale) {
  ScenarioConfig c = preset("theorem41");
  EXPECT_NEAR(sup_bound(build_forcing(c)).bound, 0.05, 1e-12);
  set_forcing_sup(c, 0.2);
  EXPECT_NEAR(sup_bound(build_forcing(c)).bound, 0.2, 1e-12);
  ScenarioConfig z = preset("zero");
  EXPECT_NO_THROW(set_forcing_sup(z, 0.0));
  EXPECT_THROW(set_forcing_sup(z, 0.1), ConfigError);
}

TEST(Simulate, WritesColumnContracts) {
  const fs::path dir = scratch("simulate");
  ScenarioConfig c = small_simulation(dir);
  c.analyses.duhamel = true;
  c.analyses.duhamel_stride = 5;
  std::ostringstream log;
  const RunResult r = run_command("simulate", c, 1, log);
  ASSERT_EQ(r.exit_code, kExitOk) << r.message;
  for (int i = 0; i < 3; ++i) {
    const fs::path o = dir / ("orbit_" + std::to_string(i));
    expect_header(o / "trajectory.csv", {"t", "l2", "l4", "h2", "V", "fingerprint"});
    expect_header(o / "bounds.csv", {"inequality", "max_violation", "margin_min", "applicable"});
    expect_header(o / "recurrence.csv", {"eps", "ell", "max_gap", "witness_count"});
    expect_header(o / "duhamel.csv", {"stride", "residual"});
    const auto traj = io::read_csv(o / "trajectory.csv");
    EXPECT_EQ(traj.rows.size(), 251u);
    const auto t = traj.numbers("t");
    EXPECT_DOUBLE_EQ(t.back(), 5.0);
    const auto bounds = io::read_csv(o / "bounds.csv");
    ASSERT_EQ(bounds.rows.size(), 3u);
    EXPECT_EQ(bounds.rows[0][0], "energy");
    EXPECT_EQ(bounds.rows[1][0], "absorbing");
    EXPECT_EQ(bounds.rows[2][0], "h2_regularization");
    EXPECT_EQ(io::read_csv(o / "recurrence.csv").numbers("eps"), (std::vector<double>{0.05, 0.1}));
    EXPECT_LT(io::read_csv(o / "duhamel.csv").numbers("residual")[0], 1e-6);
    // One JSON object per recorded sample.
    std::ifstream nd(o / "coeffs.ndjson");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(nd, line)) {
      const json row = json::parse(line);
      EXPECT_EQ(row["coeffs"].size(), c.model.domain.mode_count());
      ++lines;
    }
    EXPECT_EQ(lines, 251u);
  }
  const json m = manifest(dir);
  EXPECT_EQ(m["exit_code"], 0);
  EXPECT_EQ(m["exit_status"], "ok");
  EXPECT_EQ(m["config_hash"], c.hash());
  EXPECT_EQ(ScenarioConfig::from_json(m["config"]).hash(), c.hash());
  for (const auto& key : {"swhrec", "fftw", "eigen", "fmt", "nlohmann_json"}) EXPECT_TRUE(m["versions"].contains(key));
  EXPECT_EQ(m["files"].size(), 3u * 5u);
  for (const auto& f : m["files"]) EXPECT_TRUE(fs::exists(dir / f.get<std::string>()));
  EXPECT_FALSE(fs::exists(dir / "manifest.json.tmp"));
  EXPECT_FALSE(m["summary"].empty());
}

TEST(Simulate, ManifestIsWrittenLast) {
  const fs::path dir = scratch("order");
  const ScenarioConfig c = small_simulation(dir);
  std::ostringstream log;
  ASSERT_EQ(run_command("simulate", c, 1, log).exit_code, kExitOk);
  const auto stamp = fs::last_write_time(dir / "manifest.json");
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) EXPECT_LE(e.last_write_time(), stamp) << e.path();
  }
}

TEST(Simulate, Deterministic) {
  const fs::path d1 = scratch("det1"), d2 = scratch("det2");
  ScenarioConfig c = small_simulation(d1);
  std::ostringstream log;
  ASSERT_EQ(run_command("simulate", c, 1, log).exit_code, kExitOk);
  c.output.directory = d2.string();
  ASSERT_EQ(run_command("simulate", c, 1, log).exit_code, kExitOk);
  for (const auto& e : fs::recursive_directory_iterator(d1)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    const fs::path rel = fs::relative(e.path(), d1);
    EXPECT_EQ(slurp(e.path()), slurp(d2 / rel)) << rel;
  }
  // Different base seed, different random orbit.
  c.seed = 5;
  c.output.directory = scratch("det3").string();
  ASSERT_EQ(run_command("simulate", c, 1, log).exit_code, kExitOk);
  EXPECT_NE(slurp(d1 / "orbit_1/trajectory.csv"), slurp(fs::path(c.output.directory) / "orbit_1/trajectory.csv"));
  EXPECT_EQ(slurp(d1 / "orbit_0/trajectory.csv"), slurp(fs::path(c.output.directory) / "orbit_0/trajectory.csv"));
}

TEST(Simulate, EquilibriumSeedsAndInventory) {
  const fs::path dir = scratch("equilibria");
  ScenarioConfig c = preset("zero");
  c.model.a = 0.5;
  c.integrator.t_end = 1.0;
  c.seeds = {SeedSpec::parse("equilibrium:e0", 1)};
  c.output.directory = dir.string();
  std::ostringstream log;
  ASSERT_EQ(run_command("simulate", c, 1, log).exit_code, kExitOk);
  std::ifstream nd(dir / "equilibria.ndjson");
  std::vector<json> rows;
  for (std::string line; std::getline(nd, line);) rows.push_back(json::parse(line));
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    for (const auto& key : {"id", "kind", "a", "b", "V", "residual", "l2", "unstable_dim", "marginal_dim", "spectrum",
                            "coeffs"}) {
      EXPECT_TRUE(row.contains(key)) << key;
    }
    EXPECT_LT(row["residual"].get<double>(), 1e-9);
  }
  EXPECT_EQ(rows[0]["id"], "e0");
  EXPECT_LT(rows[0]["V"].get<double>(), 0.0);
  // A stable equilibrium stays put.
  const auto l2 = io::read_csv(dir / "orbit_0/trajectory.csv").numbers("l2");
  EXPECT_NEAR(l2.back(), rows[0]["l2"].get<double>(), 1e-8);

  c.seeds = {SeedSpec::parse("equilibrium:e9", 1)};
  c.output.directory = scratch("equilibria_bad").string();
  EXPECT_EQ(run_command("simulate", c, 1, log).exit_code, kExitConfig);
}

TEST(ExitCodes, Divergence) {
  const fs::path dir = scratch("diverge");
  ScenarioConfig c = preset("zero");
  c.integrator.scheme = Scheme::imex_cn;
  c.integrator.dt = 0.05;
  c.seeds = {SeedSpec::parse("random:1,50", 1)};
  c.output.directory = dir.string();
  std::ostringstream log;
  const RunResult r = run_command("simulate", c, 1, log);
  EXPECT_EQ(r.exit_code, kExitDivergence);
  const json err = json::parse(slurp(dir / "error.json"));
  EXPECT_EQ(err["exit_code"], kExitDivergence);
  EXPECT_EQ(err["status"], "diverged");
  const json m = manifest(dir);
  EXPECT_EQ(m["exit_code"], kExitDivergence);
  EXPECT_TRUE(fs::exists(dir / "orbit_0/trajectory.csv"));
}

TEST(ExitCodes, PreconditionAndConfig) {
  std::ostringstream log;
  ScenarioConfig c = preset("theorem41");
  c.model.a = 1.5;  // a >= -lambda0 = 1
  c.output.directory = scratch("pre_a").string();
  EXPECT_EQ(run_command("theorem41", c, 1, log).exit_code, kExitPrecondition);
  EXPECT_EQ(manifest(c.output.directory)["exit_status"], "precondition_failed");

  c = preset("theorem41");
  c.model.b = 0.9;
  c.output.directory = scratch("pre_b").string();
  EXPECT_EQ(run_command("theorem41", c, 1, log).exit_code, kExitPrecondition);

  c = preset("theorem41");
  set_forcing_sup(c, 0.8);
  c.output.directory = scratch("pre_M").string();
  EXPECT_EQ(run_command("theorem41", c, 1, log).exit_code, kExitPrecondition);

  c = preset("theorem41");
  c.output.directory = scratch("wrong_model").string();
  EXPECT_EQ(run_command("chafee", c, 1, log).exit_code, kExitConfig);
  EXPECT_EQ(run_command("bogus", c, 1, log).exit_code, kExitConfig);
  EXPECT_TRUE(fs::exists(fs::path(c.output.directory) / "error.json"));

  c = preset("chafee");
  c.model.a = 0.5;  // below mu_1 = 1
  c.output.directory = scratch("pre_chafee").string();
  EXPECT_EQ(run_command("chafee", c, 1, log).exit_code, kExitPrecondition);
}

TEST(Spectrum, LadderOutput) {
  const fs::path dir = scratch("spectrum");
  ScenarioConfig c = preset("zero");
  c.output.directory = dir.string();
  std::ostringstream log;
  const RunResult r = run_command("spectrum", c, 1, log);
  ASSERT_EQ(r.exit_code, kExitOk);
  EXPECT_NE(log.str().find("lambda0 = -1"), std::string::npos);
  EXPECT_NE(log.str().find("r = 1"), std::string::npos);
  const auto t = io::read_csv(dir / "spectrum.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"mu", "lambda", "multiplicity"}));
  EXPECT_EQ(t.numbers("mu")[2], 9.0);
  EXPECT_EQ(t.numbers("lambda")[2], 63.0);
}

TEST(Sweep, IndexAndEquilibriaAlongA) {
  const fs::path dir = scratch("sweep");
  ScenarioConfig c = preset("zero");
  c.sweep = SweepSpec{"a", {1.5, 1.2, 0.8, 0.5}};
  c.output.directory = dir.string();
  std::ostringstream log;
  const RunResult r = run_command("sweep", c, 2, log);
  ASSERT_EQ(r.exit_code, kExitOk) << r.message;
  const auto t = io::read_csv(dir / "sweep.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"axis", "value", "r_zero", "marginal", "equilibrium_count", "count_K0",
                                                "min_V", "v_monotone_failure_fraction", "verdict", "status",
                                                "message"}));
  EXPECT_EQ(t.numbers("r_zero"), (std::vector<double>{0, 0, 1, 1}));
  EXPECT_EQ(t.numbers("equilibrium_count"), (std::vector<double>{1, 1, 3, 3}));
  const auto min_v = t.numbers("min_V");
  EXPECT_EQ(min_v[0], 0.0);
  EXPECT_LT(min_v[3], min_v[2]);
  expect_header(dir / "summary.csv", {"a", "b", "r_zero", "count_K0", "min_V"});
  EXPECT_EQ(io::read_csv(dir / "summary.csv").numbers("count_K0"), (std::vector<double>{0, 0, 2, 2}));

  // Same answer single-threaded.
  c.output.directory = scratch("sweep_serial").string();
  ASSERT_EQ(run_command("sweep", c, 1, log).exit_code, kExitOk);
  EXPECT_EQ(slurp(dir / "sweep.csv"), slurp(fs::path(c.output.directory) / "sweep.csv"));

  c.sweep.reset();
  c.output.directory = scratch("sweep_empty").string();
  EXPECT_EQ(run_command("sweep", c, 1, log).exit_code, kExitConfig);
}

TEST(Paired, ShortRunWritesSeparation) {
  const fs::path dir = scratch("paired");
  ScenarioConfig c = preset("theorem41");
  c.integrator.t_end = 40.0;
  c.analyses.burn_in = 10.0;
  c.output.directory = dir.string();
  std::ostringstream log;
  const RunResult r = run_command("theorem41", c, 1, log);
  ASSERT_EQ(r.exit_code, kExitOk) << r.message;
  expect_header(dir / "separation.csv",
                {"first", "second", "min_shift_distance", "best_shift", "threshold", "separated"});
  const auto sep = io::read_csv(dir / "separation.csv");
  ASSERT_EQ(sep.rows.size(), 1u);
  EXPECT_EQ(sep.rows[0][0], "zero_basin");
  EXPECT_EQ(sep.rows[0][1], "u0_basin");
  expect_header(dir / "summary.csv", {"a", "b", "r_zero", "count_K0", "min_V"});
  for (int i = 0; i < 2; ++i) {
    const fs::path o = dir / ("orbit_" + std::to_string(i));
    EXPECT_EQ(io::read_csv(o / "trajectory.csv").rows.size(), 401u);
    EXPECT_TRUE(fs::exists(o / "recurrence.csv"));
  }
  EXPECT_NE(log.str().find("distinct recurrent-evidence orbits"), std::string::npos);

  c.integrator.t_end = 40.05;
  c.output.directory = scratch("paired_grid").string();
  EXPECT_EQ(run_command("theorem41", c, 1, log).exit_code, kExitConfig);
}
