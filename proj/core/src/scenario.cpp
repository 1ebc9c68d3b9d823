#include "swh/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <regex>
#include <set>
#include <thread>

#include <Eigen/Core>
#include <fftw3.h>
#include <fmt/format.h>

#include "swh/error.hpp"
#include "swh/io.hpp"
#include "swh/mild.hpp"

#ifndef SWHREC_VERSION
#define SWHREC_VERSION "0.0.0"
#endif

namespace swh {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- parsing

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(fmt::format("'{}' must be an object", where));
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
    if (!known) throw ConfigError(fmt::format("unknown key '{}.{}'", where, it.key()));
  }
}

template <class T>
T get_or(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("'{}.{}' has the wrong type: {}", where, key, e.what()));
  }
}

// A number, or a multiple of pi written as "pi", "2pi", "0.5*pi".
double parse_length(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    static const std::regex re(R"(^\s*([0-9]*\.?[0-9]*)\s*\*?\s*pi\s*$)");
    std::smatch m;
    const std::string s = v.get<std::string>();
    if (std::regex_match(s, m, re)) {
      const double factor = m[1].str().empty() ? 1.0 : std::stod(m[1].str());
      return factor * std::numbers::pi;
    }
  }
  throw ConfigError(fmt::format("'{}' must be a number or a multiple of pi", where));
}

template <class E>
E parse_enum(const json& j, const char* key, const std::string& where, E fallback,
             const std::function<E(const std::string&)>& conv) {
  if (!j.contains(key)) return fallback;
  const std::string s = get_or<std::string>(j, key, where, "");
  try {
    return conv(s);
  } catch (const InvalidArgument& e) {
    throw ConfigError(fmt::format("'{}.{}': {}", where, key, e.what()));
  }
}

ProfileSpec parse_profile(const json& j, const std::string& where) {
  check_keys(j, {"mode", "scale", "coeffs"}, where);
  ProfileSpec p;
  if (j.contains("mode") == j.contains("coeffs")) {
    throw ConfigError(fmt::format("'{}' needs exactly one of 'mode' or 'coeffs'", where));
  }
  if (j.contains("mode")) {
    const auto k = get_or<std::vector<int>>(j, "mode", where, {});
    if (k.empty() || k.size() > 2) throw ConfigError(fmt::format("'{}.mode' needs one or two indices", where));
    p.mode = std::array<int, 2>{k[0], k.size() > 1 ? k[1] : 1};
    p.scale = get_or<double>(j, "scale", where, 1.0);
  } else {
    if (j.contains("scale")) throw ConfigError(fmt::format("'{}.scale' only applies to 'mode'", where));
    p.coeffs = get_or<std::vector<double>>(j, "coeffs", where, {});
  }
  return p;
}

json profile_json(const ProfileSpec& p, int dimension) {
  if (p.mode) {
    json k = json::array({(*p.mode)[0]});
    if (dimension == 2) k.push_back((*p.mode)[1]);
    return {{"mode", k}, {"scale", p.scale}};
  }
  return {{"coeffs", p.coeffs}};
}

// ---------------------------------------------------------------- helpers

std::string hex64(std::size_t h) { return fmt::format("{:016x}", static_cast<std::uint64_t>(h)); }

struct OutputDir {
  fs::path root;
  RunResult* result;

  fs::path file(const std::string& rel) {
    result->files.push_back(rel);
    const fs::path p = root / rel;
    fs::create_directories(p.parent_path());
    return p;
  }
};

void say(std::ostream& log, RunResult& r, const std::string& line) {
  log << line << '\n';
  r.summary.push_back(line);
}

std::vector<BoundReport> bound_reports(const ScenarioConfig& cfg, const ForcingModel& g, const Trajectory& traj) {
  const SupBound sup = sup_bound(g);
  const AprioriConstants consts = compute_R0(cfg.model.a, cfg.analyses.b_tilde, sup.bound,
                                             cfg.model.domain.measure(), cfg.analyses.r0_variant);
  BoundContext ctx;
  ctx.b = cfg.model.b;
  ctx.forcing_sup = sup.bound;
  ctx.swift_hohenberg = cfg.model.kind == ModelKind::modified_swift_hohenberg;
  return {verify_energy_inequality(traj, consts, ctx), verify_absorbing(traj, consts, ctx),
          verify_h2_regularization(traj, 1.0)};
}

void write_orbit(OutputDir& out, const std::string& prefix, const ScenarioConfig& cfg, const Trajectory& traj) {
  if (cfg.output.wants("csv")) io::write_trajectory_csv(out.file(prefix + "/trajectory.csv"), traj);
  if (cfg.output.wants("ndjson")) io::write_coeffs_ndjson(out.file(prefix + "/coeffs.ndjson"), traj);
}

std::string bound_line(const std::string& label, const BoundReport& b) {
  if (!b.applicable) return fmt::format("{} {}: inapplicable ({})", label, b.id, b.note);
  return fmt::format("{} {}: {} (max violation {:.3g}, slack {:.3g})", label, b.id, b.passed ? "pass" : "FAIL",
                     b.max_violation, b.slack);
}

EquilibriumSearch inventory(const ScenarioConfig& cfg) {
  return find_equilibria(cfg.model, default_seeds(cfg.model, 4, cfg.seed));
}

SpectralField resolve_seed(const SeedSpec& s, const ScenarioConfig& cfg, const std::vector<Equilibrium>& eqs) {
  const DomainSpec& d = cfg.model.domain;
  switch (s.kind) {
    case SeedSpec::Kind::zero:
      return SpectralField(d);
    case SeedSpec::Kind::mode:
      return SpectralField::mode(d, s.mode, s.amplitude);
    case SeedSpec::Kind::random:
      return random_smooth_field(d, s.seed + cfg.seed, s.scale);
    case SeedSpec::Kind::equilibrium:
      for (const auto& e : eqs) {
        if (e.id == s.equilibrium_id) return e.state;
      }
      throw ConfigError(fmt::format("seed references unknown equilibrium '{}'", s.equilibrium_id));
  }
  return SpectralField(d);
}

}  // namespace

// ---------------------------------------------------------------- config

SpectralField ProfileSpec::build(const DomainSpec& domain) const {
  if (mode) {
    SpectralField f = SpectralField::mode(domain, *mode, 1.0);
    f *= scale / l2_norm(f);
    return f;
  }
  if (coeffs.size() != domain.mode_count()) {
    throw ConfigError(fmt::format("profile has {} coefficients, domain needs {}", coeffs.size(), domain.mode_count()));
  }
  return SpectralField(domain, coeffs);
}

SeedSpec SeedSpec::parse(const std::string& text, int dimension) {
  SeedSpec s;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  std::vector<std::string> parts;
  if (!tail.empty()) {
    std::size_t pos = 0;
    while (true) {
      const auto comma = tail.find(',', pos);
      parts.push_back(tail.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  try {
    if (head == "zero" && colon == std::string::npos) {
      s.kind = Kind::zero;
    } else if (head == "equilibrium" && parts.size() == 1 && !parts[0].empty()) {
      s.kind = Kind::equilibrium;
      s.equilibrium_id = parts[0];
    } else if (head == "mode" && parts.size() == static_cast<std::size_t>(dimension) + 1) {
      s.kind = Kind::mode;
      s.mode[0] = std::stoi(parts[0]);
      if (dimension == 2) s.mode[1] = std::stoi(parts[1]);
      s.amplitude = std::stod(parts.back());
    } else if (head == "random" && parts.size() == 2) {
      s.kind = Kind::random;
      s.seed = std::stoull(parts[0]);
      s.scale = std::stod(parts[1]);
    } else {
      throw ConfigError("");
    }
  } catch (const std::exception&) {
    throw ConfigError(fmt::format(
        "bad seed '{}' (expected zero | equilibrium:<id> | mode:<k,amp> | random:<seed,scale>)", text));
  }
  return s;
}

std::string SeedSpec::to_string(int dimension) const {
  switch (kind) {
    case Kind::zero:
      return "zero";
    case Kind::equilibrium:
      return "equilibrium:" + equilibrium_id;
    case Kind::mode:
      return dimension == 2 ? fmt::format("mode:{},{},{}", mode[0], mode[1], amplitude)
                            : fmt::format("mode:{},{}", mode[0], amplitude);
    case Kind::random:
      return fmt::format("random:{},{}", seed, scale);
  }
  return "zero";
}

bool OutputSpec::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
  check_keys(j, {"model", "domain", "forcing", "integrator", "analyses", "seeds", "output", "sweep", "seed"},
             "config");
  ScenarioConfig c;
  try {
    if (j.contains("domain")) {
      const json& d = j["domain"];
      check_keys(d, {"dimension", "lengths", "modes"}, "domain");
      c.model.domain.dimension = get_or<int>(d, "dimension", "domain", 1);
      const int dim = c.model.domain.dimension;
      if (dim != 1 && dim != 2) throw ConfigError("'domain.dimension' must be 1 or 2");
      if (d.contains("lengths")) {
        if (!d["lengths"].is_array() || d["lengths"].size() != static_cast<std::size_t>(dim)) {
          throw ConfigError("'domain.lengths' needs one entry per axis");
        }
        for (int i = 0; i < dim; ++i) c.model.domain.lengths[i] = parse_length(d["lengths"][i], "domain.lengths");
      }
      if (d.contains("modes")) {
        const auto m = get_or<std::vector<int>>(d, "modes", "domain", {});
        if (m.size() != static_cast<std::size_t>(dim)) throw ConfigError("'domain.modes' needs one entry per axis");
        for (int i = 0; i < dim; ++i) c.model.domain.modes[i] = m[i];
      }
    }
    if (j.contains("model")) {
      const json& m = j["model"];
      check_keys(m, {"kind", "a", "b"}, "model");
      c.model.kind = parse_enum<ModelKind>(m, "kind", "model", ModelKind::modified_swift_hohenberg,
                                           model_kind_from_string);
      c.model.a = get_or<double>(m, "a", "model", 0.0);
      c.model.b = get_or<double>(m, "b", "model", 0.0);
    }
    if (j.contains("forcing")) {
      const json& f = j["forcing"];
      check_keys(f, {"kind", "phase_offset", "components"}, "forcing");
      c.forcing.kind = parse_enum<ForcingKind>(f, "kind", "forcing", ForcingKind::zero, forcing_kind_from_string);
      c.forcing.phase_offset = get_or<double>(f, "phase_offset", "forcing", 0.0);
      if (f.contains("components")) {
        if (!f["components"].is_array()) throw ConfigError("'forcing.components' must be an array");
        for (std::size_t i = 0; i < f["components"].size(); ++i) {
          const json& cj = f["components"][i];
          const std::string where = fmt::format("forcing.components[{}]", i);
          check_keys(cj, {"amplitude", "frequency", "phase", "profile"}, where);
          ComponentSpec comp;
          comp.amplitude = get_or<double>(cj, "amplitude", where, 0.0);
          comp.frequency = get_or<double>(cj, "frequency", where, 0.0);
          comp.phase = get_or<double>(cj, "phase", where, 0.0);
          if (!cj.contains("profile")) throw ConfigError(fmt::format("'{}.profile' is required", where));
          comp.profile = parse_profile(cj["profile"], where + ".profile");
          c.forcing.components.push_back(comp);
        }
      }
    }
    if (j.contains("integrator")) {
      const json& i = j["integrator"];
      check_keys(i, {"dt", "scheme", "t_end", "record_every", "padded"}, "integrator");
      c.integrator.dt = get_or<double>(i, "dt", "integrator", c.integrator.dt);
      c.integrator.scheme = parse_enum<Scheme>(i, "scheme", "integrator", c.integrator.scheme, scheme_from_string);
      c.integrator.t_end = get_or<double>(i, "t_end", "integrator", c.integrator.t_end);
      c.integrator.record_every = get_or<int>(i, "record_every", "integrator", c.integrator.record_every);
      c.integrator.padded = get_or<bool>(i, "padded", "integrator", c.integrator.padded);
    }
    if (j.contains("analyses")) {
      const json& a = j["analyses"];
      check_keys(a,
                 {"bounds", "recurrence", "morse", "duhamel", "eps", "burn_in", "b_tilde", "r0_variant", "norm",
                  "separation_fraction", "b_max", "M_max", "morse_samples", "duhamel_stride", "tracker_pad"},
                 "analyses");
      AnalysesSpec& s = c.analyses;
      s.bounds = get_or<bool>(a, "bounds", "analyses", s.bounds);
      s.recurrence = get_or<bool>(a, "recurrence", "analyses", s.recurrence);
      s.morse = get_or<bool>(a, "morse", "analyses", s.morse);
      s.duhamel = get_or<bool>(a, "duhamel", "analyses", s.duhamel);
      s.eps = get_or<std::vector<double>>(a, "eps", "analyses", s.eps);
      s.burn_in = get_or<double>(a, "burn_in", "analyses", s.burn_in);
      s.b_tilde = get_or<double>(a, "b_tilde", "analyses", s.b_tilde);
      s.r0_variant = parse_enum<R0Variant>(a, "r0_variant", "analyses", s.r0_variant, r0_variant_from_string);
      s.norm = parse_enum<DistanceNorm>(a, "norm", "analyses", s.norm, distance_norm_from_string);
      s.separation_fraction = get_or<double>(a, "separation_fraction", "analyses", s.separation_fraction);
      s.b_max = get_or<double>(a, "b_max", "analyses", s.b_max);
      s.M_max = get_or<double>(a, "M_max", "analyses", s.M_max);
      s.morse_samples = get_or<int>(a, "morse_samples", "analyses", s.morse_samples);
      s.duhamel_stride = get_or<int>(a, "duhamel_stride", "analyses", s.duhamel_stride);
      s.tracker_pad = get_or<double>(a, "tracker_pad", "analyses", s.tracker_pad);
    }
    if (j.contains("seeds")) {
      const auto texts = get_or<std::vector<std::string>>(j, "seeds", "config", {});
      c.seeds.clear();
      for (const auto& t : texts) c.seeds.push_back(SeedSpec::parse(t, c.model.domain.dimension));
    }
    if (j.contains("output")) {
      const json& o = j["output"];
      check_keys(o, {"directory", "formats"}, "output");
      c.output.directory = get_or<std::string>(o, "directory", "output", c.output.directory);
      c.output.formats = get_or<std::vector<std::string>>(o, "formats", "output", c.output.formats);
    }
    if (j.contains("sweep")) {
      const json& s = j["sweep"];
      check_keys(s, {"axis", "grid"}, "sweep");
      SweepSpec sw;
      sw.axis = get_or<std::string>(s, "axis", "sweep", sw.axis);
      sw.grid = get_or<std::vector<double>>(s, "grid", "sweep", {});
      c.sweep = sw;
    }
    c.seed = get_or<std::uint64_t>(j, "seed", "config", 0);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return from_json(j);
}

json ScenarioConfig::to_json() const {
  const int dim = model.domain.dimension;
  json lengths = json::array(), modes = json::array();
  for (int i = 0; i < dim; ++i) {
    lengths.push_back(model.domain.lengths[i]);
    modes.push_back(model.domain.modes[i]);
  }
  json comps = json::array();
  for (const auto& c : forcing.components) {
    comps.push_back({{"amplitude", c.amplitude},
                     {"frequency", c.frequency},
                     {"phase", c.phase},
                     {"profile", profile_json(c.profile, dim)}});
  }
  json seed_list = json::array();
  for (const auto& s : seeds) seed_list.push_back(s.to_string(dim));
  json j = {
      {"model", {{"kind", swh::to_string(model.kind)}, {"a", model.a}, {"b", model.b}}},
      {"domain", {{"dimension", dim}, {"lengths", lengths}, {"modes", modes}}},
      {"forcing",
       {{"kind", swh::to_string(forcing.kind)}, {"phase_offset", forcing.phase_offset}, {"components", comps}}},
      {"integrator",
       {{"dt", integrator.dt},
        {"scheme", swh::to_string(integrator.scheme)},
        {"t_end", integrator.t_end},
        {"record_every", integrator.record_every},
        {"padded", integrator.padded}}},
      {"analyses",
       {{"bounds", analyses.bounds},
        {"recurrence", analyses.recurrence},
        {"morse", analyses.morse},
        {"duhamel", analyses.duhamel},
        {"eps", analyses.eps},
        {"burn_in", analyses.burn_in},
        {"b_tilde", analyses.b_tilde},
        {"r0_variant", swh::to_string(analyses.r0_variant)},
        {"norm", swh::to_string(analyses.norm)},
        {"separation_fraction", analyses.separation_fraction},
        {"b_max", analyses.b_max},
        {"M_max", analyses.M_max},
        {"morse_samples", analyses.morse_samples},
        {"duhamel_stride", analyses.duhamel_stride},
        {"tracker_pad", analyses.tracker_pad}}},
      {"seeds", seed_list},
      {"output", {{"directory", output.directory}, {"formats", output.formats}}},
      {"seed", seed},
  };
  if (sweep) j["sweep"] = {{"axis", sweep->axis}, {"grid", sweep->grid}};
  return j;
}

void ScenarioConfig::validate() const {
  try {
    model.validate();
    integrator.validate();
    (void)build_forcing(*this);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const AnalysesSpec& a = analyses;
  if (a.eps.empty()) throw ConfigError("'analyses.eps' must not be empty");
  for (double e : a.eps) {
    if (!(e > 0.0)) throw ConfigError("'analyses.eps' entries must be positive");
  }
  if (!(a.burn_in >= 0.0)) throw ConfigError("'analyses.burn_in' must be >= 0");
  if (!(a.b_tilde >= 0.0 && a.b_tilde < 2.0)) throw ConfigError("'analyses.b_tilde' must lie in [0, 2)");
  if (!(a.separation_fraction > 0.0)) throw ConfigError("'analyses.separation_fraction' must be positive");
  if (!(a.b_max >= 0.0) || !(a.M_max >= 0.0)) throw ConfigError("'analyses' gates must be >= 0");
  if (a.morse_samples < 0) throw ConfigError("'analyses.morse_samples' must be >= 0");
  if (a.duhamel_stride < 1) throw ConfigError("'analyses.duhamel_stride' must be >= 1");
  if (!(a.tracker_pad >= 0.0)) throw ConfigError("'analyses.tracker_pad' must be >= 0");
  if (!(integrator.t_end > 0.0)) throw ConfigError("'integrator.t_end' must be positive");
  if (seeds.empty()) throw ConfigError("'seeds' must not be empty");
  for (const auto& s : seeds) {
    if (s.kind == SeedSpec::Kind::random && !(s.scale >= 0.0)) throw ConfigError("random seed scale must be >= 0");
    if (s.kind == SeedSpec::Kind::mode) {
      for (int i = 0; i < model.domain.dimension; ++i) {
        if (s.mode[i] < 1 || s.mode[i] > model.domain.modes[i]) throw ConfigError("seed mode index out of range");
      }
    }
  }
  for (const auto& f : output.formats) {
    if (f != "csv" && f != "ndjson") throw ConfigError(fmt::format("unknown output format '{}'", f));
  }
  if (output.directory.empty()) throw ConfigError("'output.directory' must not be empty");
  if (sweep) {
    if (sweep->axis != "a" && sweep->axis != "b" && sweep->axis != "M") {
      throw ConfigError("'sweep.axis' must be one of a, b, M");
    }
    for (double v : sweep->grid) {
      if (!std::isfinite(v)) throw ConfigError("'sweep.grid' must be finite");
    }
  }
}

std::string ScenarioConfig::hash() const { return hex64(std::hash<std::string>{}(to_json().dump())); }

ForcingModel build_forcing(const ScenarioConfig& cfg) {
  const DomainSpec& d = cfg.model.domain;
  if (cfg.forcing.kind == ForcingKind::zero) {
    if (!cfg.forcing.components.empty()) throw InvalidArgument("zero forcing cannot carry components");
    return ForcingModel::zero(d);
  }
  std::vector<ForcingComponent> comps;
  for (const auto& c : cfg.forcing.components) {
    ProfileSpec p = c.profile;
    if (p.mode) {
      for (int i = 0; i < d.dimension; ++i) {
        if ((*p.mode)[i] < 1 || (*p.mode)[i] > d.modes[i]) throw InvalidArgument("forcing profile mode out of range");
      }
    }
    comps.push_back({c.amplitude, c.frequency, c.phase, p.build(d)});
  }
  return ForcingModel(cfg.forcing.kind, d, std::move(comps), cfg.forcing.phase_offset);
}

void set_forcing_sup(ScenarioConfig& cfg, double M) {
  if (!(M >= 0.0) || !std::isfinite(M)) throw ConfigError("M must be finite and >= 0");
  const double bound = sup_bound(build_forcing(cfg)).bound;
  if (bound == 0.0) {
    if (M == 0.0) return;
    throw ConfigError("cannot rescale a zero forcing to a positive M");
  }
  for (auto& c : cfg.forcing.components) c.amplitude *= M / bound;
}

std::string library_version() { return SWHREC_VERSION; }

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  c.output.directory = "out/" + name;
  if (name == "zero") {
    c.integrator.t_end = 10.0;
    return c;
  }
  if (name == "decay") {
    c.model.a = 6.0;
    c.integrator.t_end = 20.0;
    c.seeds = {SeedSpec::parse("random:1,0.5", 1)};
    return c;
  }
  if (name == "theorem41" || name == "chafee") {
    const bool ci = name == "chafee";
    c.model.kind = ci ? ModelKind::chafee_infante : ModelKind::modified_swift_hohenberg;
    c.model.a = ci ? 2.0 : 0.5;
    c.model.b = ci ? 0.0 : 0.05;
    c.forcing.kind = ForcingKind::quasiperiodic;
    ComponentSpec c1, c2;
    c1.amplitude = 0.025;
    c1.frequency = 1.0;
    c1.profile.mode = std::array<int, 2>{1, 1};
    c2.amplitude = 0.025;
    c2.frequency = std::numbers::sqrt2;
    c2.profile.mode = std::array<int, 2>{2, 1};
    c.forcing.components = {c1, c2};
    c.integrator.t_end = 500.0;
    c.integrator.dt = 2e-3;
    c.integrator.record_every = 50;
    c.analyses.recurrence = true;
    c.analyses.burn_in = 100.0;
    c.analyses.eps = {0.1, 0.05};
    return c;
  }
  throw ConfigError(fmt::format("unknown preset '{}'", name));
}

// ---------------------------------------------------------------- pipelines

RunResult run_spectrum(const ScenarioConfig& cfg, std::ostream& log, bool write_files) {
  RunResult r;
  const OperatorSpectrum s = build_spectrum(cfg.model.domain);
  const LambdaLadder ladder = lambda_ladder(s, cfg.model.a);
  const IndexAtZero idx = morse_index_zero(cfg.model.a, s);
  OutputDir out{cfg.output.directory, &r};
  std::ofstream csv;
  if (write_files) {
    csv.open(out.file("spectrum.csv"), std::ios::binary | std::ios::trunc);
    csv << "mu,lambda,multiplicity\n";
  }
  log << fmt::format("{:>24} {:>24} {:>4}\n", "mu", "lambda", "r");
  for (std::size_t k = 0; k < s.mu.size(); ++k) {
    log << fmt::format("{:>24.17g} {:>24.17g} {:>4}\n", s.mu[k], ladder.lambda[k], s.multiplicity[k]);
    if (write_files) {
      csv << io::format_double(s.mu[k]) << ',' << io::format_double(ladder.lambda[k]) << ',' << s.multiplicity[k]
          << '\n';
    }
  }
  say(log, r, fmt::format("lambda0 = {:.17g}", ladder.lambda0));
  say(log, r, fmt::format("r = {}", idx.r));
  say(log, r, fmt::format("marginal = {}", idx.marginal));
  return r;
}

RunResult run_simulate(const ScenarioConfig& cfg, std::ostream& log) {
  RunResult r;
  OutputDir out{cfg.output.directory, &r};
  const ForcingModel g = build_forcing(cfg);

  std::vector<Equilibrium> eqs;
  const bool need_eq = cfg.analyses.morse || std::any_of(cfg.seeds.begin(), cfg.seeds.end(), [](const SeedSpec& s) {
                         return s.kind == SeedSpec::Kind::equilibrium;
                       });
  if (cfg.analyses.morse) {
    MorseConfig mc;
    mc.seed = cfg.seed + 1;
    const MorseReport rep = morse_decomposition(cfg.model, cfg.analyses.morse_samples, mc);
    eqs = rep.equilibria;
    io::write_morse_summary_csv(
        out.file("summary.csv"),
        {{cfg.model.a, cfg.model.b, rep.r_zero, rep.K0_members.size(), rep.min_V()}});
    say(log, r,
        fmt::format("morse: r_zero = {}, equilibria = {}, K0 = {}, connections = {}, ordered = {}, unclassified = {}",
                    rep.r_zero, rep.equilibria.size(), rep.K0_members.size(), rep.connections.size(),
                    rep.ordered ? "yes" : "no", rep.unclassified));
  } else if (need_eq) {
    eqs = inventory(cfg).equilibria;
  }
  if (need_eq) io::write_equilibria_ndjson(out.file("equilibria.ndjson"), eqs);

  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    const std::string prefix = fmt::format("orbit_{}", i);
    const SpectralField init = resolve_seed(cfg.seeds[i], cfg, eqs);
    const Trajectory traj = integrate(cfg.model, g, init, 0.0, cfg.integrator);
    write_orbit(out, prefix, cfg, traj);
    const std::string label = fmt::format("{} [{}]", prefix, cfg.seeds[i].to_string(cfg.model.domain.dimension));
    if (!traj.ok()) {
      r.exit_code = kExitDivergence;
      r.status = "diverged";
      r.message = traj.error;
      say(log, r, fmt::format("{}: {}", label, traj.error));
      return r;
    }
    say(log, r, fmt::format("{}: final t = {:.17g}, l2 = {:.17g}", label, traj.times.back(), traj.norms.back().l2));
    if (cfg.analyses.bounds) {
      const auto reports = bound_reports(cfg, g, traj);
      io::write_bounds_csv(out.file(prefix + "/bounds.csv"), reports);
      for (const auto& b : reports) say(log, r, bound_line(label, b));
    }
    if (cfg.analyses.recurrence) {
      const RecurrenceReport rep = epsilon_ell_table(traj, cfg.analyses.eps, cfg.analyses.burn_in, cfg.analyses.norm);
      io::write_recurrence_csv(out.file(prefix + "/recurrence.csv"), rep);
      say(log, r, io::verdict_line(rep, label));
    }
    if (cfg.analyses.duhamel) {
      const double res = duhamel_residual(traj, g, cfg.model, cfg.analyses.duhamel_stride);
      std::ofstream d(out.file(prefix + "/duhamel.csv"), std::ios::binary | std::ios::trunc);
      d << "stride,residual\n" << cfg.analyses.duhamel_stride << ',' << io::format_double(res) << '\n';
      say(log, r, fmt::format("{} duhamel residual: {:.3g}", label, res));
    }
  }
  return r;
}

PairedExperiment paired_experiment(const ScenarioConfig& cfg, bool chafee) {
  const ModelSpec& model = cfg.model;
  const OperatorSpectrum spectrum = build_spectrum(model.domain);
  if (!chafee) {
    if (model.kind != ModelKind::modified_swift_hohenberg) {
      throw ConfigError("theorem41 runs the modified Swift-Hohenberg model");
    }
    const double lambda0 = lambda_ladder(spectrum, model.a).lambda0;
    if (!(model.a < -lambda0)) {
      throw PreconditionError(
          fmt::format("a = {} violates a < -lambda0 = {} (lambda0 = {})", model.a, -lambda0, lambda0));
    }
    if (std::abs(model.b) > cfg.analyses.b_max) {
      throw PreconditionError(fmt::format("|b| = {} exceeds the gate b_max = {}", std::abs(model.b), cfg.analyses.b_max));
    }
  } else {
    if (model.kind != ModelKind::chafee_infante) throw ConfigError("chafee runs the chafee_infante model");
    if (!(model.a > spectrum.mu.front())) {
      throw PreconditionError(fmt::format("a = {} must exceed mu_1 = {}", model.a, spectrum.mu.front()));
    }
  }
  const ForcingModel g = build_forcing(cfg);
  const double M = sup_bound(g).bound;
  if (M > cfg.analyses.M_max) {
    throw PreconditionError(fmt::format("forcing sup {} exceeds the gate M_max = {}", M, cfg.analyses.M_max));
  }

  const IntegratorConfig& icfg = cfg.integrator;
  const double spacing = icfg.dt * icfg.record_every;
  const double samples = icfg.t_end / spacing;
  if (std::abs(samples - std::round(samples)) > 1e-6) {
    throw ConfigError("t_end must be a multiple of dt * record_every for paired runs");
  }

  PairedExperiment px;
  px.equilibria = inventory(cfg).equilibria;
  std::vector<const Equilibrium*> stable;
  for (const auto& e : px.equilibria) {
    if (e.unstable_dim == 0 && e.marginal_dim == 0 && l2_norm(e.state) > 1e-8) stable.push_back(&e);
  }
  std::stable_sort(stable.begin(), stable.end(),
                   [](const Equilibrium* x, const Equilibrium* y) { return x->state[0] > y->state[0]; });
  const std::size_t need = chafee ? 2 : 1;
  if (stable.size() < need) {
    throw Error(fmt::format("expected {} stable nonzero equilibria, found {}", need, stable.size()));
  }
  px.u0_norm = l2_norm(stable.front()->state);
  px.threshold = cfg.analyses.separation_fraction * px.u0_norm;

  TrackerConfig tc;
  const int per_sample = static_cast<int>(std::ceil(spacing / 0.01 - 1e-9));
  tc.node_dt = spacing / per_sample;
  tc.record_every = per_sample;
  tc.pad = cfg.analyses.tracker_pad;
  tc.padded = icfg.padded;
  const TrackedOrbit tracked = track_hyperbolic_orbit(model, g, 0.0, icfg.t_end, tc);

  PairedOrbit zero;
  zero.label = "zero_basin";
  zero.trajectory = tracked.trajectory;
  zero.tracker_converged = tracked.converged;
  px.orbits.push_back(std::move(zero));

  std::vector<std::pair<std::string, const Equilibrium*>> starts;
  if (chafee) {
    starts = {{"plus_u0_basin", stable.front()}, {"minus_u0_basin", stable.back()}};
  } else {
    starts = {{"u0_basin", stable.front()}};
  }
  for (const auto& [label, eq] : starts) {
    PairedOrbit o;
    o.label = label;
    o.trajectory = integrate(model, g, eq->state, 0.0, icfg);
    if (!o.trajectory.ok()) {
      throw DivergenceError(fmt::format("{}: {}", label, o.trajectory.error), o.trajectory.error_time.value_or(0.0));
    }
    px.orbits.push_back(std::move(o));
  }

  bool all_recurrent = true;
  for (auto& o : px.orbits) {
    if (o.trajectory.size() < 2) throw Error(fmt::format("{}: no samples recorded", o.label));
    o.recurrence = epsilon_ell_table(o.trajectory, cfg.analyses.eps, cfg.analyses.burn_in, cfg.analyses.norm);
    if (cfg.analyses.bounds) o.bounds = bound_reports(cfg, g, o.trajectory);
    all_recurrent = all_recurrent && o.tracker_converged && o.recurrence.verdict == Verdict::recurrent_evidence;
  }
  bool separated = true;
  for (std::size_t i = 0; i < px.orbits.size(); ++i) {
    for (std::size_t k = i + 1; k < px.orbits.size(); ++k) {
      px.separations.push_back(separation(px.orbits[i].trajectory, px.orbits[k].trajectory, cfg.analyses.burn_in,
                                          -1.0, px.orbits[i].label, px.orbits[k].label));
      separated = separated && px.separations.back().min_shift_distance >= px.threshold;
    }
  }
  px.verdict = all_recurrent && separated;
  px.verdict_line = fmt::format("{} distinct recurrent-evidence orbits: {}", chafee ? "three" : "two",
                                px.verdict ? "yes" : "no");
  return px;
}

namespace {

RunResult run_paired(const ScenarioConfig& cfg, std::ostream& log, bool chafee) {
  RunResult r;
  const PairedExperiment px = paired_experiment(cfg, chafee);
  OutputDir out{cfg.output.directory, &r};
  io::write_equilibria_ndjson(out.file("equilibria.ndjson"), px.equilibria);
  const Model model(cfg.model);
  const IndexAtZero idx = morse_index_zero(model);
  std::size_t k0 = 0;
  double min_v = 0.0;
  for (const auto& e : px.equilibria) {
    if (e.V < 0.0) ++k0;
    min_v = std::min(min_v, e.V);
  }
  io::write_morse_summary_csv(out.file("summary.csv"), {{cfg.model.a, cfg.model.b, idx.r, k0, min_v}});
  say(log, r, fmt::format("equilibria: {} (index at 0: r = {}), |u0| = {:.17g}", px.equilibria.size(), idx.r,
                          px.u0_norm));
  for (std::size_t i = 0; i < px.orbits.size(); ++i) {
    const PairedOrbit& o = px.orbits[i];
    const std::string prefix = fmt::format("orbit_{}", i);
    write_orbit(out, prefix, cfg, o.trajectory);
    io::write_recurrence_csv(out.file(prefix + "/recurrence.csv"), o.recurrence);
    if (!o.bounds.empty()) io::write_bounds_csv(out.file(prefix + "/bounds.csv"), o.bounds);
    if (!o.tracker_converged) say(log, r, fmt::format("{}: {}", o.label, o.trajectory.error));
    say(log, r, io::verdict_line(o.recurrence, o.label));
    for (const auto& b : o.bounds) say(log, r, bound_line(o.label, b));
  }
  io::write_separation_csv(out.file("separation.csv"), px.separations, px.threshold);
  for (const auto& s : px.separations) {
    say(log, r, fmt::format("separation {} / {}: {:.6g} (threshold {:.6g})", s.first_id, s.second_id,
                            s.min_shift_distance, px.threshold));
  }
  say(log, r, px.verdict_line);
  return r;
}

struct SweepRow {
  double value = 0.0;
  int r_zero = 0;
  int marginal = 0;
  std::size_t equilibria = 0;
  std::size_t k0 = 0;
  double min_V = 0.0;
  double v_failure = std::nan("");
  std::string verdict = "n/a";
  std::string status = "ok";
  std::string message;
};

SweepRow sweep_point(const ScenarioConfig& base, std::size_t index, double value) {
  SweepRow row;
  row.value = value;
  try {
    ScenarioConfig pc = base;
    pc.sweep.reset();
    const std::string axis = base.sweep->axis;
    if (axis == "a") pc.model.a = value;
    if (axis == "b") pc.model.b = value;
    if (axis == "M") set_forcing_sup(pc, value);
    pc.output.directory = (fs::path(base.output.directory) / fmt::format("point_{}", index)).string();
    pc.validate();

    const Model model(pc.model);
    const IndexAtZero idx = morse_index_zero(model);
    row.r_zero = idx.r;
    row.marginal = idx.marginal;
    const auto eqs = inventory(pc).equilibria;
    row.equilibria = eqs.size();
    for (const auto& e : eqs) {
      if (e.V < 0.0) ++row.k0;
      row.min_V = std::min(row.min_V, e.V);
    }
    if (axis == "b" || pc.analyses.morse) {
      std::size_t pairs = 0, failures = 0;
      IntegratorConfig ic = pc.integrator;
      ic.record_lyapunov = true;
      for (int s = 0; s < pc.analyses.morse_samples; ++s) {
        const SpectralField init =
            random_smooth_field(pc.model.domain, pc.seed + 1000 + static_cast<std::uint64_t>(s), 1.0);
        const Trajectory traj = integrate(pc.model, ForcingModel::zero(pc.model.domain), init, 0.0, ic);
        for (std::size_t i = 1; i < traj.lyapunov.size(); ++i, ++pairs) {
          if (traj.lyapunov[i] > traj.lyapunov[i - 1] + 1e-8 * (1.0 + std::abs(traj.lyapunov[i - 1]))) ++failures;
        }
      }
      if (pairs > 0) row.v_failure = static_cast<double>(failures) / static_cast<double>(pairs);
    }
    if (pc.analyses.recurrence) {
      try {
        const PairedExperiment px = paired_experiment(pc, pc.model.kind == ModelKind::chafee_infante);
        row.verdict = px.verdict ? "yes" : "no";
      } catch (const PreconditionError& e) {
        row.verdict = "refused";
        row.message = e.what();
      }
    }
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
  }
  return row;
}

std::string csv_text(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

RunResult run_theorem41(const ScenarioConfig& cfg, std::ostream& log) { return run_paired(cfg, log, false); }

RunResult run_chafee(const ScenarioConfig& cfg, std::ostream& log) { return run_paired(cfg, log, true); }

RunResult run_sweep(const ScenarioConfig& cfg, int jobs, std::ostream& log) {
  if (!cfg.sweep || cfg.sweep->grid.empty()) throw ConfigError("sweep needs 'sweep.axis' and a non-empty 'sweep.grid'");
  RunResult r;
  const auto& grid = cfg.sweep->grid;
  std::vector<SweepRow> rows(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) rows[i] = sweep_point(cfg, i, grid[i]);
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(grid.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  OutputDir out{cfg.output.directory, &r};
  std::ofstream csv(out.file("sweep.csv"), std::ios::binary | std::ios::trunc);
  csv << "axis,value,r_zero,marginal,equilibrium_count,count_K0,min_V,v_monotone_failure_fraction,verdict,status,"
         "message\n";
  std::vector<io::MorseSummaryRow> summary;
  std::size_t failed = 0;
  for (const auto& row : rows) {
    csv << cfg.sweep->axis << ',' << io::format_double(row.value) << ',' << row.r_zero << ',' << row.marginal << ','
        << row.equilibria << ',' << row.k0 << ',' << io::format_double(row.min_V) << ','
        << (std::isnan(row.v_failure) ? "" : io::format_double(row.v_failure)) << ',' << row.verdict << ','
        << row.status << ',' << csv_text(row.message) << '\n';
    if (row.status != "ok") ++failed;
    const double a = cfg.sweep->axis == "a" ? row.value : cfg.model.a;
    const double b = cfg.sweep->axis == "b" ? row.value : cfg.model.b;
    summary.push_back({a, b, row.r_zero, row.k0, row.min_V});
    say(log, r,
        fmt::format("{} = {:g}: r = {}, equilibria = {}, verdict = {}{}", cfg.sweep->axis, row.value, row.r_zero,
                    row.equilibria, row.verdict, row.status == "ok" ? "" : " [" + row.message + "]"));
  }
  csv.close();
  io::write_morse_summary_csv(out.file("summary.csv"), summary);
  if (failed > 0) r.message = fmt::format("{} sweep point(s) failed", failed);
  return r;
}

RunResult run_command(const std::string& command, const ScenarioConfig& cfg, int jobs, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  RunResult r;
  auto fail = [&](int code, const std::string& status, const std::string& msg) {
    r.exit_code = code;
    r.status = status;
    r.message = msg;
  };
  double error_time = std::nan("");
  try {
    fs::create_directories(cfg.output.directory);
    if (command == "spectrum") {
      r = run_spectrum(cfg, log);
    } else if (command == "simulate") {
      r = run_simulate(cfg, log);
    } else if (command == "theorem41") {
      r = run_theorem41(cfg, log);
    } else if (command == "chafee") {
      r = run_chafee(cfg, log);
    } else if (command == "sweep") {
      r = run_sweep(cfg, jobs, log);
    } else {
      throw ConfigError(fmt::format("unknown command '{}'", command));
    }
  } catch (const ConfigError& e) {
    fail(kExitConfig, "config_error", e.what());
  } catch (const InvalidArgument& e) {
    fail(kExitConfig, "config_error", e.what());
  } catch (const PreconditionError& e) {
    fail(kExitPrecondition, "precondition_failed", e.what());
  } catch (const DivergenceError& e) {
    fail(kExitDivergence, "diverged", e.what());
    error_time = e.time();
  } catch (const std::exception& e) {
    fail(kExitInternal, "internal_error", e.what());
  }
  if (r.exit_code != kExitOk) log << "error: " << r.message << '\n';

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    const fs::path root(cfg.output.directory);
    fs::create_directories(root);
    if (r.exit_code != kExitOk) {
      json err = {{"exit_code", r.exit_code}, {"status", r.status}, {"message", r.message}, {"command", command}};
      if (std::isfinite(error_time)) err["time"] = error_time;
      std::ofstream(root / "error.json", std::ios::binary | std::ios::trunc) << err.dump(2) << '\n';
      r.files.push_back("error.json");
    }
    json files = json::array();
    for (const auto& f : r.files) {
      if (fs::exists(root / f)) files.push_back(f);
    }
    const json manifest = {
        {"command", command},
        {"config_hash", cfg.hash()},
        {"config", cfg.to_json()},
        {"versions",
         {{"swhrec", library_version()},
          {"fftw", std::string(fftw_version)},
          {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
          {"fmt", FMT_VERSION},
          {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                        NLOHMANN_JSON_VERSION_PATCH)}}},
        {"wall_time_s", wall},
        {"files", files},
        {"summary", r.summary},
        {"exit_status", r.status},
        {"exit_code", r.exit_code},
        {"message", r.message},
    };
    const fs::path tmp = root / "manifest.json.tmp";
    std::ofstream(tmp, std::ios::binary | std::ios::trunc) << manifest.dump(2) << '\n';
    fs::rename(tmp, root / "manifest.json");
  } catch (const std::exception& e) {
    log << "error: cannot write manifest: " << e.what() << '\n';
    if (r.exit_code == kExitOk) fail(kExitInternal, "internal_error", e.what());
  }
  return r;
}

}  // namespace swh
