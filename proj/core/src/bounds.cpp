#include "swh/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "swh/error.hpp"

namespace swh {
namespace {

std::string inapplicable_reason(const AprioriConstants& c, const BoundContext& ctx) {
  if (!ctx.swift_hohenberg) return "constants derived for the Swift-Hohenberg model only";
  if (std::abs(ctx.b) > c.b_tilde) return fmt::format("|b| = {} exceeds b_tilde = {}", std::abs(ctx.b), c.b_tilde);
  if (ctx.forcing_sup > c.M * (1.0 + 1e-12)) {
    return fmt::format("forcing sup {} exceeds M = {}", ctx.forcing_sup, c.M);
  }
  return {};
}

double sq(double x) { return x * x; }

}  // namespace

std::string to_string(R0Variant v) { return v == R0Variant::measure_squared ? "measure_squared" : "cauchy_schwarz"; }

R0Variant r0_variant_from_string(const std::string& name) {
  if (name == "cauchy_schwarz") return R0Variant::cauchy_schwarz;
  if (name == "measure_squared") return R0Variant::measure_squared;
  throw InvalidArgument(fmt::format("unknown R0 variant '{}'", name));
}

AprioriConstants compute_R0(double a, double b_tilde, double M, double omega_measure, R0Variant variant) {
  if (!(b_tilde >= 0.0)) throw InvalidArgument("b_tilde must be >= 0");
  if (!(b_tilde < 2.0)) throw InvalidArgument("coercivity lost: b_tilde must be < 2");
  if (!(M >= 0.0) || !std::isfinite(M)) throw InvalidArgument("M must be finite and >= 0");
  if (!(omega_measure > 0.0)) throw InvalidArgument("omega_measure must be positive");
  if (!std::isfinite(a)) throw InvalidArgument("a must be finite");
  AprioriConstants c;
  c.a = a;
  c.b_tilde = b_tilde;
  c.M = M;
  c.omega_measure = omega_measure;
  c.variant = variant;
  c.linear_coefficient = std::max(12.0 - 2.0 * a, 0.0);
  c.quartic_coefficient = 0.5 * (4.0 - b_tilde * b_tilde);
  const double m = variant == R0Variant::cauchy_schwarz ? omega_measure : omega_measure * omega_measure;
  c.forcing_term = 0.5 * M * M;
  c.polynomial_term = sq(c.linear_coefficient) * m / (2.0 * (4.0 - b_tilde * b_tilde));
  c.R0_squared = c.forcing_term + c.polynomial_term;
  c.R0 = std::sqrt(c.R0_squared);
  return c;
}

double r0_objective(const AprioriConstants& c, double s) {
  const double m = c.variant == R0Variant::cauchy_schwarz ? c.omega_measure : sq(c.omega_measure);
  return (12.0 - 2.0 * c.a) * s - c.quartic_coefficient * s * s / m;
}

double bound_slack(const Trajectory& traj) {
  double umax = 0.0;
  for (const auto& n : traj.norms) umax = std::max(umax, n.l2 * n.l2);
  double dt = traj.step_dt;
  if (!(dt > 0.0)) dt = traj.size() >= 2 ? traj.times[1] - traj.times[0] : traj.sample_dt;
  return 10.0 * dt * (1.0 + umax);
}

BoundReport verify_energy_inequality(const Trajectory& traj, const AprioriConstants& c, const BoundContext& ctx) {
  BoundReport r;
  r.id = "energy";
  r.slack = bound_slack(traj);
  r.note = inapplicable_reason(c, ctx);
  r.applicable = r.note.empty();
  if (!r.applicable) return r;
  r.margin_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double dt = traj.times[i + 1] - traj.times[i];
    const NormBundle& n0 = traj.norms[i];
    const NormBundle& n1 = traj.norms[i + 1];
    const double lhs = (sq(n1.l2) - sq(n0.l2)) / dt + 0.5 * (sq(n0.l2) + sq(n1.l2)) + 0.5 * (sq(n0.h2) + sq(n1.h2));
    r.max_violation = std::max(r.max_violation, lhs - c.R0_squared);
    r.margin_min = std::min(r.margin_min, c.R0_squared - lhs);
  }
  if (traj.size() < 2) r.margin_min = 0.0;
  r.passed = r.max_violation <= r.slack;
  return r;
}

BoundReport verify_absorbing(const Trajectory& traj, const AprioriConstants& c, const BoundContext& ctx) {
  BoundReport r;
  r.id = "absorbing";
  r.slack = bound_slack(traj);
  r.note = inapplicable_reason(c, ctx);
  r.applicable = r.note.empty();
  if (!r.applicable) return r;
  r.margin_min = std::numeric_limits<double>::infinity();
  // p(t) = ||u||^2 - R0^2 must satisfy p(t) <= e^{tau - t} p(tau); keep the
  // smallest propagated value over all earlier tau.
  double envelope = std::numeric_limits<double>::infinity();
  double dt_sample = 0.0;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const double p = sq(traj.norms[j].l2) - c.R0_squared;
    if (j > 0) {
      dt_sample = traj.times[j] - traj.times[j - 1];
      envelope *= std::exp(-dt_sample);
      r.max_violation = std::max(r.max_violation, p - envelope);
      r.margin_min = std::min(r.margin_min, envelope - p);
    }
    envelope = std::min(envelope, p);
  }
  if (traj.size() < 2) r.margin_min = 0.0;

  const double tol_ball = 10.0 * (traj.step_dt > 0.0 ? traj.step_dt : traj.sample_dt);
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const double norm = traj.norms[j].l2;
    if (!r.entry_time) {
      if (c.R0 > 0.0 && norm <= c.R0) r.entry_time = traj.times[j];
      continue;
    }
    r.ball_excess = std::max(r.ball_excess, norm / c.R0 - 1.0);
  }
  r.passed = r.max_violation <= r.slack && r.ball_excess <= tol_ball;
  return r;
}

BoundReport verify_h2_regularization(const Trajectory& traj, double dwell) {
  BoundReport r;
  r.id = "h2_regularization";
  r.dwell = dwell;
  r.applicable = true;
  if (traj.size() == 0) return r;
  const double start = traj.times.front() + dwell;
  bool any = false;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    if (traj.times[j] + 1e-12 < start) continue;
    any = true;
    r.fitted_bound = std::max(r.fitted_bound, traj.norms[j].h2);
  }
  r.passed = std::isfinite(r.fitted_bound);
  if (!any) r.note = "trajectory shorter than the dwell time";
  return r;
}

}  // namespace swh
