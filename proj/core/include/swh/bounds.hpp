#pragma once

#include <optional>
#include <string>

#include "swh/integrator.hpp"

namespace swh {

/// How ||u||^2 is traded against ||u||^2_{L^4}:
///  cauchy_schwarz:  ||u||^2 <= |Omega|^{1/2} ||u||_{L^4}^2
///  measure_squared: ||u||^2 <= |Omega| ||u||_{L^4}^2, a looser constant kept for comparison
enum class R0Variant { cauchy_schwarz, measure_squared };

std::string to_string(R0Variant v);
R0Variant r0_variant_from_string(const std::string& name);

struct AprioriConstants {
  double b_tilde = 0.0;
  double M = 0.0;
  double a = 0.0;
  double omega_measure = 0.0;
  R0Variant variant = R0Variant::cauchy_schwarz;
  double linear_coefficient = 0.0;  // (12 - 2a)_+
  double quartic_coefficient = 0.0; // (4 - b_tilde^2) / 2
  double forcing_term = 0.0;        // M^2 / 2
  double polynomial_term = 0.0;     // sup_s [(12 - 2a) s - (4 - b^2)/2 s^2 / m]
  double R0_squared = 0.0;
  double R0 = 0.0;
};

/// R0^2 = M^2/2 + (12 - 2a)_+^2 m / (2 (4 - b_tilde^2)) with m = |Omega|
/// (cauchy_schwarz) or |Omega|^2 (measure_squared).
AprioriConstants compute_R0(double a, double b_tilde, double M, double omega_measure,
                            R0Variant variant = R0Variant::cauchy_schwarz);

/// The scalar function whose supremum over s >= 0 is the polynomial term.
double r0_objective(const AprioriConstants& c, double s);

struct BoundReport {
  std::string id;  // energy, absorbing, h2_regularization
  double max_violation = 0.0;  // max(0, lhs - rhs) over the checks
  double margin_min = 0.0;     // min(rhs - lhs) over the checks
  double slack = 0.0;
  bool applicable = true;
  bool passed = true;
  std::string note;
  std::optional<double> entry_time;  // first time with ||u|| <= R0 (absorbing)
  double ball_excess = 0.0;          // max ||u||/R0 - 1 after entry (absorbing)
  double fitted_bound = 0.0;         // sup ||Laplacian u|| after the dwell (h2_regularization)
  double dwell = 0.0;
};

struct BoundContext {
  double b = 0.0;          // |b| of the run
  double forcing_sup = 0;  // sup ||g(t)|| of the run
  bool swift_hohenberg = true;
};

/// Slack model 10 dt (1 + max ||u||^2) with dt the integration step
/// (the sample spacing when the step is unknown).
double bound_slack(const Trajectory& traj);

/// Discrete form of d/dt||u||^2 + ||u||^2 + ||Laplacian u||^2 <= R0^2 between
/// consecutive samples (difference quotient plus trapezoid averages).
BoundReport verify_energy_inequality(const Trajectory& traj, const AprioriConstants& consts,
                                     const BoundContext& ctx);

/// ||u(t)||^2 <= e^{tau - t} ||u(tau)||^2 + R0^2 (1 - e^{tau - t}) for all
/// recorded tau < t, plus the ball re-entry check.
BoundReport verify_absorbing(const Trajectory& traj, const AprioriConstants& consts, const BoundContext& ctx);

/// sup of ||Laplacian u|| after the dwell time.
BoundReport verify_h2_regularization(const Trajectory& traj, double dwell = 1.0);

}  // namespace swh
