#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swh/forcing.hpp"
#include "swh/model.hpp"
#include "swh/operators.hpp"

namespace swh {

enum class Scheme { etd1, etd_rk4, imex_cn };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct IntegratorConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::etd_rk4;
  double t_end = 200.0;
  int record_every = 10;
  bool padded = true;
  Splitting splitting = Splitting::principal;
  bool linear_only = false;  // drop f entirely; test harness for the exact linear substep
  bool record_lyapunov = true;

  void validate() const;
};

/// Recorded samples of one run. On divergence the samples up to the last
/// finite state are kept and `status` is set.
struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  std::vector<NormBundle> norms;
  std::vector<double> lyapunov;     // empty unless requested
  std::vector<double> fingerprint;  // phase offset of theta_t g
  double sample_dt = 0.0;
  double step_dt = 0.0;             // integration step behind the samples
  std::string status = "ok";        // "ok" or "diverged"
  std::string error;
  std::optional<double> error_time;

  std::size_t size() const noexcept { return times.size(); }
  bool ok() const noexcept { return status == "ok"; }
  double horizon() const noexcept { return times.empty() ? 0.0 : times.back() - times.front(); }
};

/// Grid max |u| above this aborts the run.
inline constexpr double kDivergenceThreshold = 1e8;

/// One-step map of an exponential (or IMEX) scheme for u_t + L u + f(u) = g(t).
/// Coefficient tables depend only on (model, dt, scheme) and are built once.
class Stepper {
 public:
  Stepper(const Model& model, const ForcingModel& forcing, const IntegratorConfig& cfg);

  /// Advances from t to t + dt. Throws DivergenceError("step diverged").
  SpectralField step(const SpectralField& u, double t) const;

  const Model& model() const noexcept { return model_; }
  double dt() const noexcept { return dt_; }

 private:
  SpectralField rhs(const SpectralField& u, double t) const;  // g(t) - f(u)
  void check(const SpectralField& u, double t) const;

  Model model_;
  ForcingModel forcing_;
  double dt_;
  Scheme scheme_;
  bool padded_;
  bool linear_only_;
  std::vector<double> e_full_, e_half_, phi_half_;  // exp(-c h), exp(-c h/2), h/2 phi1(-c h/2)
  std::vector<double> w1_, w2_, w3_;               // ETDRK4 (or ETD1 / CN) weights
};

/// Convenience wrapper for a single step.
SpectralField step(const SpectralField& state, double t, const ForcingModel& g, const ModelSpec& model,
                   double dt, Scheme scheme);

/// Integrates from (tau, initial) to cfg.t_end, recording every
/// cfg.record_every steps (the initial state is always recorded).
Trajectory integrate(const ModelSpec& model, const ForcingModel& g, const SpectralField& initial, double tau,
                     const IntegratorConfig& cfg);

/// Diagnostics for one state (norms, V if requested, fingerprint).
void append_sample(Trajectory& traj, const Model& model, const ForcingModel& g, double t,
                   const SpectralField& u, bool with_lyapunov);

/// Grid max |u|.
double max_abs(const SpectralField& u);

}  // namespace swh
