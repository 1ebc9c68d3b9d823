#include "swh/integrator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "swh/error.hpp"
#include "swh/phi.hpp"
#include "swh/transforms.hpp"

namespace swh {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::etd1:
      return "etd1";
    case Scheme::etd_rk4:
      return "etd_rk4";
    case Scheme::imex_cn:
      return "imex_cn";
  }
  return "etd_rk4";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "etd1") return Scheme::etd1;
  if (name == "etd_rk4") return Scheme::etd_rk4;
  if (name == "imex_cn") return Scheme::imex_cn;
  throw InvalidArgument(fmt::format("unknown scheme '{}'", name));
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!std::isfinite(t_end)) throw InvalidArgument("t_end must be finite");
  if (record_every < 1) throw InvalidArgument("record_every must be >= 1");
}

double max_abs(const SpectralField& u) {
  double bound = 0.0;
  for (double c : u.coeffs()) bound += std::abs(c);
  // |u(x)| <= sum |c_k|; the grid is only sampled when that bound is large.
  if (bound <= kDivergenceThreshold || !std::isfinite(bound)) return bound;
  double m = 0.0;
  for (double v : to_grid(u, 2)) m = std::max(m, std::abs(v));
  return m;
}

Stepper::Stepper(const Model& model, const ForcingModel& forcing, const IntegratorConfig& cfg)
    : model_(model),
      forcing_(forcing),
      dt_(cfg.dt),
      scheme_(cfg.scheme),
      padded_(cfg.padded),
      linear_only_(cfg.linear_only) {
  cfg.validate();
  if (!(forcing_.domain() == model_.domain())) throw InvalidArgument("forcing and model domains differ");
  const auto& c = model_.linear_symbol();
  const std::size_t n = c.size();
  const double h = dt_;
  e_full_.resize(n);
  e_half_.resize(n);
  phi_half_.resize(n);
  w1_.resize(n);
  w2_.resize(n);
  w3_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = -c[i] * h;
    e_full_[i] = std::exp(z);
    e_half_[i] = std::exp(0.5 * z);
    phi_half_[i] = 0.5 * h * phi(1, 0.5 * z);
    switch (scheme_) {
      case Scheme::etd1:
        w1_[i] = h * phi(1, z);
        break;
      case Scheme::etd_rk4: {
        const double p1 = phi(1, z), p2 = phi(2, z), p3 = phi(3, z);
        w1_[i] = h * (p1 - 3.0 * p2 + 4.0 * p3);
        w2_[i] = h * 2.0 * (p2 - 2.0 * p3);
        w3_[i] = h * (4.0 * p3 - p2);
        break;
      }
      case Scheme::imex_cn: {
        const double denom = 1.0 + 0.5 * c[i] * h;
        e_full_[i] = (1.0 - 0.5 * c[i] * h) / denom;
        w1_[i] = h / denom;
        break;
      }
    }
  }
}

SpectralField Stepper::rhs(const SpectralField& u, double t) const {
  SpectralField out = evaluate(forcing_, t);
  if (!linear_only_) out -= model_.explicit_term(u, padded_);
  return out;
}

void Stepper::check(const SpectralField& u, double t) const {
  if (!u.all_finite() || max_abs(u) > kDivergenceThreshold) {
    throw DivergenceError(fmt::format("step diverged at t = {:.17g}", t), t);
  }
}

SpectralField Stepper::step(const SpectralField& u, double t) const {
  const std::size_t n = u.size();
  SpectralField out(u.domain());
  try {
    switch (scheme_) {
      case Scheme::etd1:
      case Scheme::imex_cn: {
        const SpectralField nu = rhs(u, t);
        for (std::size_t i = 0; i < n; ++i) out[i] = e_full_[i] * u[i] + w1_[i] * nu[i];
        break;
      }
      case Scheme::etd_rk4: {
        const double th = t + 0.5 * dt_;
        const SpectralField nu = rhs(u, t);
        SpectralField a(u.domain());
        for (std::size_t i = 0; i < n; ++i) a[i] = e_half_[i] * u[i] + phi_half_[i] * nu[i];
        const SpectralField na = rhs(a, th);
        SpectralField b(u.domain());
        for (std::size_t i = 0; i < n; ++i) b[i] = e_half_[i] * u[i] + phi_half_[i] * na[i];
        const SpectralField nb = rhs(b, th);
        SpectralField c(u.domain());
        for (std::size_t i = 0; i < n; ++i) c[i] = e_half_[i] * a[i] + phi_half_[i] * (2.0 * nb[i] - nu[i]);
        const SpectralField nc = rhs(c, t + dt_);
        for (std::size_t i = 0; i < n; ++i) {
          out[i] = e_full_[i] * u[i] + w1_[i] * nu[i] + w2_[i] * (na[i] + nb[i]) + w3_[i] * nc[i];
        }
        break;
      }
    }
  } catch (const NonfiniteError&) {
    throw DivergenceError(fmt::format("step diverged at t = {:.17g}", t), t);
  }
  check(out, t + dt_);
  return out;
}

SpectralField step(const SpectralField& state, double t, const ForcingModel& g, const ModelSpec& model,
                   double dt, Scheme scheme) {
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.scheme = scheme;
  return Stepper(Model(model), g, cfg).step(state, t);
}

void append_sample(Trajectory& traj, const Model& model, const ForcingModel& g, double t,
                   const SpectralField& u, bool with_lyapunov) {
  traj.times.push_back(t);
  traj.states.push_back(u);
  traj.norms.push_back(norms(u));
  if (with_lyapunov) traj.lyapunov.push_back(model.lyapunov(u));
  traj.fingerprint.push_back(fingerprint(g, t));
}

Trajectory integrate(const ModelSpec& model, const ForcingModel& g, const SpectralField& initial, double tau,
                     const IntegratorConfig& cfg) {
  cfg.validate();
  model.validate();
  if (!(initial.domain() == model.domain)) throw InvalidArgument("initial state lives on another domain");
  if (!initial.all_finite()) throw InvalidArgument("initial state is not finite");
  if (!(cfg.t_end >= tau)) throw InvalidArgument("t_end must not precede the initial time");

  const Model m(model, cfg.splitting);
  const Stepper stepper(m, g, cfg);
  const long steps = std::lround((cfg.t_end - tau) / cfg.dt);

  Trajectory traj;
  traj.sample_dt = cfg.dt * cfg.record_every;
  traj.step_dt = cfg.dt;
  append_sample(traj, m, g, tau, initial, cfg.record_lyapunov);

  SpectralField u = initial;
  for (long k = 0; k < steps; ++k) {
    const double t = tau + static_cast<double>(k) * cfg.dt;
    try {
      u = stepper.step(u, t);
    } catch (const DivergenceError& e) {
      traj.status = "diverged";
      traj.error = e.what();
      traj.error_time = e.time();
      return traj;
    }
    if ((k + 1) % cfg.record_every == 0) {
      append_sample(traj, m, g, tau + static_cast<double>(k + 1) * cfg.dt, u, cfg.record_lyapunov);
    }
  }
  return traj;
}

}  // namespace swh
