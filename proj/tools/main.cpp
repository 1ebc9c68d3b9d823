// swhrec: scenario runner for the forced modified Swift-Hohenberg toolkit.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "swh/error.hpp"
#include "swh/scenario.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string preset;
  std::string out;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> a, b, M, t_end;
  std::optional<int> dimension;
  std::vector<double> lengths;
  std::vector<int> modes;
  std::string axis;
  std::vector<double> grid;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "scenario file (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--preset", o.preset, "built-in scenario: zero, decay, theorem41, chafee");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--jobs", o.jobs, "concurrent sweep points")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "base seed for random initial data");
  cmd->add_option("--a", o.a, "linear coefficient a");
  cmd->add_option("--b", o.b, "gradient coefficient b");
  cmd->add_option("--M", o.M, "rescale the forcing to sup ||g(t)|| = M");
  cmd->add_option("--t-end", o.t_end, "final time");
  cmd->add_option("--dimension", o.dimension, "1 or 2");
  cmd->add_option("--length", o.lengths, "domain length per axis");
  cmd->add_option("--modes", o.modes, "retained modes per axis (powers of two)");
}

swh::ScenarioConfig resolve(const std::string& command, const Overrides& o) {
  swh::ScenarioConfig cfg;
  if (!o.config.empty()) {
    cfg = swh::ScenarioConfig::load(o.config);
  } else if (!o.preset.empty()) {
    cfg = swh::preset(o.preset);
  } else if (command == "theorem41" || command == "chafee") {
    cfg = swh::preset(command);
  }
  if (o.dimension) {
    cfg.model.domain.dimension = *o.dimension;
    if (*o.dimension == 2 && o.modes.size() < 2) cfg.model.domain.modes[1] = cfg.model.domain.modes[0];
  }
  for (std::size_t i = 0; i < o.lengths.size() && i < 2; ++i) cfg.model.domain.lengths[i] = o.lengths[i];
  for (std::size_t i = 0; i < o.modes.size() && i < 2; ++i) cfg.model.domain.modes[i] = o.modes[i];
  if (o.modes.size() == 1) cfg.model.domain.modes[1] = o.modes[0];
  if (o.a) cfg.model.a = *o.a;
  if (o.b) cfg.model.b = *o.b;
  if (o.t_end) cfg.integrator.t_end = *o.t_end;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output.directory = o.out;
  if (!o.axis.empty() || !o.grid.empty()) {
    swh::SweepSpec sw = cfg.sweep.value_or(swh::SweepSpec{});
    if (!o.axis.empty()) sw.axis = o.axis;
    if (!o.grid.empty()) sw.grid = o.grid;
    cfg.sweep = sw;
  }
  cfg.validate();
  if (o.M) {
    swh::set_forcing_sup(cfg, *o.M);
    cfg.validate();
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forced modified Swift-Hohenberg simulator and recurrence toolkit"};
  app.set_version_flag("--version", swh::library_version());
  app.require_subcommand(1);

  Overrides o;
  std::vector<std::pair<std::string, CLI::App*>> commands = {
      {"spectrum", app.add_subcommand("spectrum", "eigenvalue ladder, lambda0 and the index at 0")},
      {"simulate", app.add_subcommand("simulate", "integrate the configured seeds and run the analyses")},
      {"theorem41", app.add_subcommand("theorem41", "paired forced runs near 0 and near u0")},
      {"chafee", app.add_subcommand("chafee", "three forced runs for u_t - Laplacian u - a u + u^3 = g")},
      {"sweep", app.add_subcommand("sweep", "parameter sweep over a, b or M")},
  };
  for (auto& [name, cmd] : commands) add_common(cmd, o);
  commands.back().second->add_option("--axis", o.axis, "a, b or M")->check(CLI::IsMember({"a", "b", "M"}));
  commands.back().second->add_option("--grid", o.grid, "grid values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : swh::kExitConfig;
  }

  std::string command;
  for (auto& [name, cmd] : commands) {
    if (cmd->parsed()) command = name;
  }

  swh::ScenarioConfig cfg;
  try {
    cfg = resolve(command, o);
  } catch (const swh::Error& e) {
    const nlohmann::json err = {{"exit_code", swh::kExitConfig}, {"status", "config_error"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return swh::kExitConfig;
  }

  const swh::RunResult r = swh::run_command(command, cfg, o.jobs, std::cout);
  if (r.exit_code != swh::kExitOk) {
    const nlohmann::json err = {{"exit_code", r.exit_code}, {"status", r.status}, {"message", r.message}};
    std::cerr << err.dump() << '\n';
  }
  return r.exit_code;
}
