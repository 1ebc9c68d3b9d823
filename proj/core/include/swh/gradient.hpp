#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swh/integrator.hpp"

namespace swh {

/// V(u) = 1/2 (L(a) u, u) + 1/4 int u^4 for the Swift-Hohenberg operator.
double lyapunov(const SpectralField& u, double a);
/// -||L(a) u + P u^3||^2, the rate of change of V along b = 0 solutions.
double dissipation(const SpectralField& u, double a);

struct SpectrumEntry {
  double value = 0.0;
  int multiplicity = 1;
};

struct Equilibrium {
  std::string id;
  ModelSpec model;
  SpectralField state;
  double residual = 0.0;  // ||F(state)||
  double V = 0.0;
  std::vector<SpectrumEntry> spectrum;  // linearization, ascending real parts
  int unstable_dim = 0;                 // multiplicity-weighted negative count
  int marginal_dim = 0;                 // |eigenvalue| <= marginal_tol, not in unstable_dim
  std::vector<SpectralField> unstable_directions;
};

struct NewtonConfig {
  double tol = 1e-10;
  int max_iter = 50;
  int max_halvings = 20;
  double marginal_tol = 1e-9;
  bool padded = true;

  void validate() const;
};

struct SeedFailure {
  std::size_t seed_index = 0;
  std::string reason;
};

struct EquilibriumSearch {
  std::vector<Equilibrium> equilibria;  // sorted by V, then by first coefficient (descending)
  std::vector<SeedFailure> failures;
};

/// Damped Newton on F(u) = Lambda u + N(u) from each seed; roots closer than
/// 10 tol are merged. Non-converging seeds are reported, not fatal.
EquilibriumSearch find_equilibria(const ModelSpec& model, const std::vector<SpectralField>& seeds,
                                  const NewtonConfig& cfg = {});
EquilibriumSearch find_equilibria(double a, double b, const std::vector<SpectralField>& seeds,
                                  double newton_tol = 1e-10);

/// 0, then +/- the one-mode amplitude c^2 = -Lambda_k / gamma_k for every
/// mode with Lambda_k < 0 (gamma_k = int phi^4 / int phi^2), then
/// `random_count` smooth random fields.
std::vector<SpectralField> default_seeds(const ModelSpec& model, int random_count, std::uint64_t seed);

/// Dense Jacobian of F at u (coefficient space).
std::vector<double> jacobian(const Model& model, const SpectralField& u, bool padded = true);

/// Linearized spectrum data for a converged state.
void classify(Equilibrium& e, const Model& model, const NewtonConfig& cfg);

struct IndexAtZero {
  int r = 0;         // multiplicity-weighted count of lambda_k(a) < -marginal_tol
  int marginal = 0;  // multiplicity-weighted count of |lambda_k(a)| <= marginal_tol
};

IndexAtZero morse_index_zero(double a, const OperatorSpectrum& spectrum, double marginal_tol = 1e-9);
/// Same count for an arbitrary model (Chafee-Infante uses mu_k - a).
IndexAtZero morse_index_zero(const Model& model, double marginal_tol = 1e-9);

struct IdentityCheck {
  double defect = 0.0;      // |V(e) + 1/4 int e^4|
  bool applicable = false;  // the identity only holds for b = 0 equilibria
};

IdentityCheck equilibrium_identity(const Equilibrium& e);

struct Connection {
  std::string from;
  std::string to;  // empty when unclassified
  std::size_t trajectory_id = 0;
  double V_from = 0.0;
  double V_to = 0.0;
  bool monotone = true;  // V non-increasing along the samples (within 1e-8 relative)
};

struct MorseConfig {
  NewtonConfig newton{};
  int random_seeds = 4;
  std::uint64_t seed = 1;
  IntegratorConfig integrator{1e-3, Scheme::etd_rk4, 60.0, 100};  // t_end is the classification time
  double cluster_tol = 1e-3;
  double shot_offset = 1e-3;      // size of the displacement along unstable directions
  double sample_scale = 1.0;      // L2 size of random initial data
};

struct MorseReport {
  ModelSpec model;
  std::vector<Equilibrium> equilibria;
  std::vector<SeedFailure> failures;
  int r_zero = 0;
  int marginal_zero = 0;
  std::vector<std::string> K0_members;
  std::vector<Connection> connections;
  int classified = 0;
  int unclassified = 0;
  bool ordered = true;  // every connection decreases V
  bool nontrivial_expected = false;

  const Equilibrium* find(const std::string& id) const;
  double min_V() const;
};

/// Nearest equilibrium within cluster_tol (L2), if any.
std::optional<std::size_t> nearest_equilibrium(const std::vector<Equilibrium>& equilibria,
                                               const SpectralField& u, double cluster_tol);

/// Equilibria, index at 0, omega-limit classification of `sample_count`
/// random runs, and connections shot from unstable directions.
MorseReport morse_decomposition(const ModelSpec& model, int sample_count, const MorseConfig& cfg = {});
MorseReport morse_decomposition(double a, double b, int sample_count);

}  // namespace swh
