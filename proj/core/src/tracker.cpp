#include "swh/tracker.hpp"

#include <cmath>

#include <fmt/format.h>

#include "swh/error.hpp"
#include "swh/phi.hpp"

namespace swh {

void TrackerConfig::validate() const {
  if (!(node_dt > 0.0)) throw InvalidArgument("tracker node_dt must be positive");
  if (!(pad >= 0.0)) throw InvalidArgument("tracker pad must be >= 0");
  if (!(tol > 0.0)) throw InvalidArgument("tracker tol must be positive");
  if (max_iter < 1 || record_every < 1) throw InvalidArgument("tracker max_iter and record_every must be >= 1");
}

TrackedOrbit track_hyperbolic_orbit(const ModelSpec& spec, const ForcingModel& g, double t0, double t1,
                                    const TrackerConfig& cfg) {
  cfg.validate();
  if (!(t1 > t0)) throw InvalidArgument("tracker needs t1 > t0");
  const Model model(spec, Splitting::full);
  const auto& lam = model.full_symbol();
  const std::size_t modes = lam.size();
  for (double l : lam) {
    if (std::abs(l) <= 1e-9) throw PreconditionError("0 is not hyperbolic: marginal linear mode");
  }

  const double h = cfg.node_dt;
  const long lead = std::lround(cfg.pad / h);
  const long body = std::lround((t1 - t0) / h);
  const long nodes = body + 2 * lead + 1;
  const double s0 = t0 - static_cast<double>(lead) * h;
  auto node_time = [&](long j) { return s0 + static_cast<double>(j) * h; };

  // Per-mode propagation coefficients. Stable: forward step; unstable: backward step.
  std::vector<double> ex(modes), wa(modes), wb(modes);
  std::vector<char> unstable(modes);
  for (std::size_t i = 0; i < modes; ++i) {
    unstable[i] = lam[i] < 0.0;
    const double z = unstable[i] ? lam[i] * h : -lam[i] * h;
    const double p1 = phi(1, z), p2 = phi(2, z);
    ex[i] = std::exp(z);
    if (!unstable[i]) {
      wa[i] = h * (p1 - p2);  // weight of h_j in u_{j+1}
      wb[i] = h * p2;         // weight of h_{j+1}
    } else {
      wa[i] = -h * p2;         // weight of h_j in u_j
      wb[i] = -h * (p1 - p2);  // weight of h_{j+1}
    }
  }

  const DomainSpec& d = spec.domain;
  std::vector<double> u(static_cast<std::size_t>(nodes) * modes, 0.0);
  std::vector<double> src(static_cast<std::size_t>(nodes) * modes, 0.0);
  const double w = d.l2_weight();

  TrackedOrbit out;
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    for (long j = 0; j < nodes; ++j) {
      SpectralField uj(d, std::vector<double>(u.begin() + j * modes, u.begin() + (j + 1) * modes));
      SpectralField r = evaluate(g, node_time(j));
      if (!uj.is_zero()) {
        try {
          r -= model.remainder(uj, cfg.padded);
        } catch (const NonfiniteError&) {
          throw DivergenceError("hyperbolic orbit iteration diverged", node_time(j));
        }
      }
      std::copy(r.coeffs().begin(), r.coeffs().end(), src.begin() + j * modes);
    }

    double change = 0.0;
    std::vector<double> next(u.size(), 0.0);
    for (std::size_t i = 0; i < modes; ++i) {
      if (!unstable[i]) {
        double v = 0.0;
        for (long j = 0; j + 1 < nodes; ++j) {
          v = ex[i] * v + wa[i] * src[j * modes + i] + wb[i] * src[(j + 1) * modes + i];
          next[(j + 1) * modes + i] = v;
        }
      } else {
        double v = 0.0;
        for (long j = nodes - 2; j >= 0; --j) {
          v = ex[i] * v + wa[i] * src[j * modes + i] + wb[i] * src[(j + 1) * modes + i];
          next[j * modes + i] = v;
        }
      }
    }
    for (long j = 0; j < nodes; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < modes; ++i) {
        const double diff = next[j * modes + i] - u[j * modes + i];
        s += diff * diff;
      }
      change = std::max(change, std::sqrt(s * w));
    }
    u.swap(next);
    out.iterations = iter;
    out.last_change = change;
    if (!std::isfinite(change) || change > 1e6) break;
    if (change <= cfg.tol) {
      out.converged = true;
      break;
    }
  }

  Trajectory& traj = out.trajectory;
  traj.sample_dt = h * cfg.record_every;
  traj.step_dt = h;
  for (long j = lead; j <= lead + body; j += cfg.record_every) {
    SpectralField uj(d, std::vector<double>(u.begin() + j * modes, u.begin() + (j + 1) * modes));
    append_sample(traj, model, g, t0 + static_cast<double>(j - lead) * h, uj, true);
  }
  if (!out.converged) {
    traj.status = "diverged";
    traj.error = fmt::format("hyperbolic orbit iteration did not converge (change {:.3g} after {} sweeps)",
                             out.last_change, out.iterations);
  }
  return out;
}

}  // namespace swh
