#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swh/bounds.hpp"
#include "swh/forcing.hpp"
#include "swh/gradient.hpp"
#include "swh/recurrence.hpp"
#include "swh/tracker.hpp"

namespace swh {

struct ProfileSpec {
  std::optional<std::array<int, 2>> mode;  // unit-L2-norm basis function times `scale`
  double scale = 1.0;
  std::vector<double> coeffs;  // used when `mode` is empty

  SpectralField build(const DomainSpec& domain) const;
};

struct ComponentSpec {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
  ProfileSpec profile;
};

struct ForcingSpec {
  ForcingKind kind = ForcingKind::zero;
  double phase_offset = 0.0;
  std::vector<ComponentSpec> components;
};

struct AnalysesSpec {
  bool bounds = true;
  bool recurrence = false;
  bool morse = false;
  bool duhamel = false;
  std::vector<double> eps{0.1, 0.05};
  double burn_in = 0.0;
  double b_tilde = 1.0;
  R0Variant r0_variant = R0Variant::cauchy_schwarz;
  DistanceNorm norm = DistanceNorm::l2;
  double separation_fraction = 0.5;  // of ||u0||
  double b_max = 0.5;                // parameter gates of the paired experiments
  double M_max = 0.5;
  int morse_samples = 4;
  int duhamel_stride = 10;
  double tracker_pad = 60.0;
};

/// zero | equilibrium:<id> | mode:<k,amp> (mode:<k1,k2,amp> in 2-D) | random:<seed,scale>
struct SeedSpec {
  enum class Kind { zero, equilibrium, mode, random };
  Kind kind = Kind::zero;
  std::string equilibrium_id;
  std::array<int, 2> mode{1, 1};
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  double scale = 0.0;

  static SeedSpec parse(const std::string& text, int dimension);
  std::string to_string(int dimension) const;
};

struct OutputSpec {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "ndjson"};

  bool wants(const std::string& format) const;
};

struct SweepSpec {
  std::string axis = "a";  // a | b | M
  std::vector<double> grid;
};

struct ScenarioConfig {
  ModelSpec model{};
  ForcingSpec forcing{};
  IntegratorConfig integrator{};
  AnalysesSpec analyses{};
  std::vector<SeedSpec> seeds{SeedSpec{}};
  OutputSpec output{};
  std::optional<SweepSpec> sweep;
  std::uint64_t seed = 0;

  /// Strict: unknown keys and wrong types raise ConfigError.
  static ScenarioConfig from_json(const nlohmann::json& j);
  static ScenarioConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  /// Re-runs every module-level precondition; throws ConfigError.
  void validate() const;
  std::string hash() const;
};

ForcingModel build_forcing(const ScenarioConfig& cfg);
/// Rescales the amplitudes so that sup_bound(g).bound == M.
void set_forcing_sup(ScenarioConfig& cfg, double M);

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitPrecondition = 3, kExitDivergence = 4, kExitInternal = 5 };

struct RunResult {
  int exit_code = kExitOk;
  std::string status = "ok";
  std::string message;
  std::vector<std::string> files;  // relative to the output directory
  std::vector<std::string> summary;
};

struct PairedOrbit {
  std::string label;  // "zero_basin", "u0_basin", ...
  Trajectory trajectory;
  RecurrenceReport recurrence;
  std::vector<BoundReport> bounds;
  bool tracker_converged = true;
};

struct PairedExperiment {
  std::vector<Equilibrium> equilibria;
  std::vector<PairedOrbit> orbits;
  std::vector<SeparationReport> separations;
  double u0_norm = 0.0;
  double threshold = 0.0;
  bool verdict = false;
  std::string verdict_line;
};

/// Equilibrium inventory, forced runs near 0 and near the stable nonzero
/// equilibria, recurrence reports and pairwise separations. `chafee`
/// selects the three-orbit variant. Throws PreconditionError on gate failure.
PairedExperiment paired_experiment(const ScenarioConfig& cfg, bool chafee);

/// The CLI subcommands. Each writes into cfg.output.directory (created),
/// manifest.json last, and maps errors to exit codes.
RunResult run_spectrum(const ScenarioConfig& cfg, std::ostream& log, bool write_files = true);
RunResult run_simulate(const ScenarioConfig& cfg, std::ostream& log);
RunResult run_theorem41(const ScenarioConfig& cfg, std::ostream& log);
RunResult run_chafee(const ScenarioConfig& cfg, std::ostream& log);
RunResult run_sweep(const ScenarioConfig& cfg, int jobs, std::ostream& log);

/// Dispatches by name, converts exceptions to exit codes, writes the error
/// record and the manifest.
RunResult run_command(const std::string& command, const ScenarioConfig& cfg, int jobs, std::ostream& log);

/// Built-in desk scenarios: zero, decay, theorem41, chafee.
ScenarioConfig preset(const std::string& name);

std::string library_version();

}  // namespace swh
