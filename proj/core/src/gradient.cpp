#include "swh/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "swh/error.hpp"
#include "swh/operators.hpp"

namespace swh {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::size_t kMaxDenseModes = 2048;

ModelSpec swift_hohenberg(const DomainSpec& domain, double a, double b) {
  ModelSpec m;
  m.kind = ModelKind::modified_swift_hohenberg;
  m.a = a;
  m.b = b;
  m.domain = domain;
  return m;
}

bool uses_symmetric_jacobian(const ModelSpec& m) {
  return m.kind == ModelKind::chafee_infante || m.b == 0.0;
}

SpectralField from_eigen(const DomainSpec& d, const Eigen::VectorXd& v) {
  return SpectralField(d, std::vector<double>(v.data(), v.data() + v.size()));
}

std::vector<SpectrumEntry> group_levels(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<SpectrumEntry> out;
  for (double v : values) {
    if (!out.empty() && std::abs(v - out.back().value) <= 1e-8 * std::max(1.0, std::abs(v))) {
      ++out.back().multiplicity;
    } else {
      out.push_back({v, 1});
    }
  }
  return out;
}

struct NewtonOutcome {
  SpectralField root;
  double residual = 0.0;
  double error = 0.0;  // ||J^{-1} F|| at the root
  bool converged = false;
  std::string reason;
};

NewtonOutcome newton(const Model& model, SpectralField u, const NewtonConfig& cfg) {
  NewtonOutcome out;
  const DomainSpec& d = model.domain();
  const std::size_t n = u.size();
  SpectralField F = model.residual(u, cfg.padded);
  double fnorm = l2_norm(F);
  for (int iter = 0; iter <= cfg.max_iter; ++iter) {
    if (!std::isfinite(fnorm)) {
      out.reason = "residual became nonfinite";
      return out;
    }
    if (iter == cfg.max_iter && fnorm > cfg.tol) break;
    const std::vector<double> J = jacobian(model, u, cfg.padded);
    const Eigen::Map<const RowMatrix> Jm(J.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const Eigen::Map<const Eigen::VectorXd> Fv(F.vector().data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd delta = Jm.partialPivLu().solve(Fv);
    if (fnorm <= cfg.tol) {
      // Near a degenerate root the residual is tiny long before u is close;
      // the Newton correction is the honest error estimate.
      out.error = delta.allFinite() ? delta.norm() : std::numeric_limits<double>::infinity();
      out.root = std::move(u);
      out.residual = fnorm;
      out.converged = true;
      return out;
    }
    if (!delta.allFinite()) {
      out.reason = "singular Jacobian";
      return out;
    }
    const SpectralField step = from_eigen(d, delta);
    double s = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving, s *= 0.5) {
      SpectralField trial = u - s * step;
      try {
        SpectralField Ft = model.residual(trial, cfg.padded);
        const double ftn = l2_norm(Ft);
        if (std::isfinite(ftn) && ftn < fnorm) {
          u = std::move(trial);
          F = std::move(Ft);
          fnorm = ftn;
          accepted = true;
          break;
        }
      } catch (const NonfiniteError&) {
      }
    }
    if (!accepted) {
      out.reason = fmt::format("line search failed at residual {:.3g}", fnorm);
      return out;
    }
  }
  out.reason = fmt::format("no convergence after {} iterations (residual {:.3g})", cfg.max_iter, fnorm);
  return out;
}

}  // namespace

double lyapunov(const SpectralField& u, double a) {
  return Model(swift_hohenberg(u.domain(), a, 0.0)).lyapunov(u);
}

double dissipation(const SpectralField& u, double a) {
  const SpectralField F = Model(swift_hohenberg(u.domain(), a, 0.0)).residual(u);
  const double n = l2_norm(F);
  return -n * n;
}

void NewtonConfig::validate() const {
  if (!(tol > 0.0) || max_iter < 1 || max_halvings < 0 || !(marginal_tol >= 0.0)) {
    throw InvalidArgument("invalid Newton configuration");
  }
}

std::vector<double> jacobian(const Model& model, const SpectralField& u, bool padded) {
  const std::size_t n = u.size();
  if (n > kMaxDenseModes) throw InvalidArgument("dense Jacobian limited to 2048 modes");
  std::vector<double> J(n * n, 0.0);
  const DomainSpec& d = model.domain();
  for (std::size_t k = 0; k < n; ++k) {
    SpectralField e(d);
    e[k] = 1.0;
    const SpectralField col = model.residual_jvp(u, e, padded);
    for (std::size_t i = 0; i < n; ++i) J[i * n + k] = col[i];
  }
  return J;
}

void classify(Equilibrium& e, const Model& model, const NewtonConfig& cfg) {
  const DomainSpec& d = model.domain();
  const std::size_t n = e.state.size();
  const std::vector<double> J = jacobian(model, e.state, cfg.padded);
  const Eigen::Map<const RowMatrix> Jm(J.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> values;
  std::vector<SpectralField> unstable;
  if (uses_symmetric_jacobian(model.spec())) {
    const RowMatrix sym = 0.5 * (Jm + Jm.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double v = es.eigenvalues()(i);
      values.push_back(v);
      if (v < -cfg.marginal_tol) unstable.push_back(from_eigen(d, es.eigenvectors().col(i)));
    }
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(Jm);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double v = es.eigenvalues()(i).real();
      values.push_back(v);
      if (v < -cfg.marginal_tol && std::abs(es.eigenvalues()(i).imag()) <= 1e-12 * std::max(1.0, std::abs(v))) {
        unstable.push_back(from_eigen(d, es.eigenvectors().col(i).real()));
      }
    }
  }
  e.unstable_dim = 0;
  e.marginal_dim = 0;
  for (double v : values) {
    if (std::abs(v) <= cfg.marginal_tol) {
      ++e.marginal_dim;
    } else if (v < 0.0) {
      ++e.unstable_dim;
    }
  }
  for (auto& dir : unstable) {
    const double nrm = l2_norm(dir);
    if (nrm > 0.0) dir *= 1.0 / nrm;
    // fix the sign: largest-magnitude coefficient positive
    std::size_t big = 0;
    for (std::size_t i = 1; i < dir.size(); ++i) {
      if (std::abs(dir[i]) > std::abs(dir[big])) big = i;
    }
    if (dir[big] < 0.0) dir *= -1.0;
  }
  e.spectrum = group_levels(std::move(values));
  e.unstable_directions = std::move(unstable);
}

EquilibriumSearch find_equilibria(const ModelSpec& spec, const std::vector<SpectralField>& seeds,
                                  const NewtonConfig& cfg) {
  cfg.validate();
  const Model model(spec);
  EquilibriumSearch out;
  std::vector<SpectralField> roots;
  std::vector<double> residuals, errors;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    if (!(seeds[s].domain() == spec.domain) || !seeds[s].all_finite()) {
      out.failures.push_back({s, "seed is not a finite field on the model domain"});
      continue;
    }
    NewtonOutcome r;
    try {
      r = newton(model, seeds[s], cfg);
    } catch (const NonfiniteError&) {
      r.reason = "nonfinite nonlinearity";
    }
    if (!r.converged) {
      out.failures.push_back({s, r.reason});
      continue;
    }
    // Merge within 10 tol plus ten Newton error estimates; keep the sharper one.
    bool duplicate = false;
    for (std::size_t i = 0; i < roots.size() && !duplicate; ++i) {
      if (l2_distance(roots[i], r.root) < 10.0 * (cfg.tol + std::max(errors[i], r.error))) {
        duplicate = true;
        if (r.error < errors[i]) {
          roots[i] = std::move(r.root);
          residuals[i] = r.residual;
          errors[i] = r.error;
        }
      }
    }
    if (!duplicate) {
      roots.push_back(std::move(r.root));
      residuals.push_back(r.residual);
      errors.push_back(r.error);
    }
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    Equilibrium e;
    e.model = spec;
    e.state = roots[i];
    e.residual = residuals[i];
    e.V = model.lyapunov(e.state);
    classify(e, model, cfg);
    out.equilibria.push_back(std::move(e));
  }
  std::stable_sort(out.equilibria.begin(), out.equilibria.end(), [](const Equilibrium& x, const Equilibrium& y) {
    if (std::abs(x.V - y.V) > 1e-9 * std::max(1.0, std::abs(x.V))) return x.V < y.V;
    return x.state[0] > y.state[0];
  });
  for (std::size_t i = 0; i < out.equilibria.size(); ++i) out.equilibria[i].id = fmt::format("e{}", i);
  return out;
}

EquilibriumSearch find_equilibria(double a, double b, const std::vector<SpectralField>& seeds,
                                  double newton_tol) {
  if (seeds.empty()) return {};
  NewtonConfig cfg;
  cfg.tol = newton_tol;
  return find_equilibria(swift_hohenberg(seeds.front().domain(), a, b), seeds, cfg);
}

std::vector<SpectralField> default_seeds(const ModelSpec& spec, int random_count, std::uint64_t seed) {
  const Model model(spec);
  const DomainSpec& d = spec.domain;
  std::vector<SpectralField> seeds;
  seeds.emplace_back(d);
  const auto& lam = model.full_symbol();
  for (std::size_t i = 0; i < lam.size(); ++i) {
    if (!(lam[i] < 0.0)) continue;
    SpectralField phi_k(d);
    phi_k[i] = 1.0;
    const double gamma = power_integral(phi_k, 4) / (l2_norm(phi_k) * l2_norm(phi_k));
    const double c = std::sqrt(-lam[i] / gamma);
    seeds.push_back(phi_k * c);
    seeds.push_back(phi_k * -c);
  }
  double scale = 1.0;
  if (seeds.size() > 1) scale = l2_norm(seeds[1]);
  for (int r = 0; r < random_count; ++r) {
    seeds.push_back(random_smooth_field(d, seed + static_cast<std::uint64_t>(r), scale));
  }
  return seeds;
}

IndexAtZero morse_index_zero(double a, const OperatorSpectrum& spectrum, double marginal_tol) {
  IndexAtZero out;
  for (std::size_t k = 0; k < spectrum.mu.size(); ++k) {
    const double lam = lambda_of(spectrum.mu[k], a);
    if (std::abs(lam) <= marginal_tol) {
      out.marginal += spectrum.multiplicity[k];
    } else if (lam < 0.0) {
      out.r += spectrum.multiplicity[k];
    }
  }
  return out;
}

IndexAtZero morse_index_zero(const Model& model, double marginal_tol) {
  IndexAtZero out;
  for (double lam : model.full_symbol()) {
    if (std::abs(lam) <= marginal_tol) {
      ++out.marginal;
    } else if (lam < 0.0) {
      ++out.r;
    }
  }
  return out;
}

IdentityCheck equilibrium_identity(const Equilibrium& e) {
  IdentityCheck out;
  out.applicable = e.model.kind == ModelKind::chafee_infante || e.model.b == 0.0;
  const Model model(e.model);
  out.defect = std::abs(model.lyapunov(e.state) + 0.25 * power_integral(e.state, 4));
  return out;
}

const Equilibrium* MorseReport::find(const std::string& id) const {
  for (const auto& e : equilibria) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

double MorseReport::min_V() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : equilibria) m = std::min(m, e.V);
  return equilibria.empty() ? 0.0 : m;
}

std::optional<std::size_t> nearest_equilibrium(const std::vector<Equilibrium>& equilibria,
                                               const SpectralField& u, double cluster_tol) {
  std::optional<std::size_t> best;
  double best_d = cluster_tol;
  for (std::size_t i = 0; i < equilibria.size(); ++i) {
    const double dist = l2_distance(equilibria[i].state, u);
    if (dist <= best_d) {
      best_d = dist;
      best = i;
    }
  }
  return best;
}

MorseReport morse_decomposition(const ModelSpec& spec, int sample_count, const MorseConfig& cfg) {
  spec.validate();
  if (sample_count < 0) throw InvalidArgument("sample_count must be >= 0");
  const Model model(spec);
  MorseReport report;
  report.model = spec;

  EquilibriumSearch search = find_equilibria(spec, default_seeds(spec, cfg.random_seeds, cfg.seed), cfg.newton);
  report.equilibria = std::move(search.equilibria);
  report.failures = std::move(search.failures);
  const IndexAtZero idx = morse_index_zero(model, cfg.newton.marginal_tol);
  report.r_zero = idx.r;
  report.marginal_zero = idx.marginal;
  report.nontrivial_expected = idx.r > 0;
  for (const auto& e : report.equilibria) {
    if (e.V < 0.0) report.K0_members.push_back(e.id);
  }

  const ForcingModel none = ForcingModel::zero(spec.domain);
  IntegratorConfig icfg = cfg.integrator;
  icfg.record_lyapunov = true;
  std::size_t trajectory_id = 0;

  auto final_class = [&](const Trajectory& traj) -> std::optional<std::size_t> {
    if (!traj.ok() || traj.states.empty()) return std::nullopt;
    return nearest_equilibrium(report.equilibria, traj.states.back(), cfg.cluster_tol);
  };

  for (int s = 0; s < sample_count; ++s, ++trajectory_id) {
    const SpectralField init =
        random_smooth_field(spec.domain, cfg.seed + 1000 + static_cast<std::uint64_t>(s), cfg.sample_scale);
    const Trajectory traj = integrate(spec, none, init, 0.0, icfg);
    if (final_class(traj)) {
      ++report.classified;
    } else {
      ++report.unclassified;
    }
  }

  const bool gradient = uses_symmetric_jacobian(spec);
  for (const auto& from : std::vector<Equilibrium>(report.equilibria)) {
    for (const auto& dir : from.unstable_directions) {
      for (double sign : {1.0, -1.0}) {
        const SpectralField init = from.state + (sign * cfg.shot_offset) * dir;
        const Trajectory traj = integrate(spec, none, init, 0.0, icfg);
        Connection c;
        c.from = from.id;
        c.trajectory_id = trajectory_id++;
        c.V_from = from.V;
        for (std::size_t i = 1; i < traj.lyapunov.size(); ++i) {
          if (traj.lyapunov[i] > traj.lyapunov[i - 1] + 1e-8 * (1.0 + std::abs(traj.lyapunov[i - 1]))) {
            c.monotone = false;
          }
        }
        if (auto to = final_class(traj)) {
          c.to = report.equilibria[*to].id;
          c.V_to = report.equilibria[*to].V;
          ++report.classified;
        } else {
          c.V_to = traj.lyapunov.empty() ? from.V : traj.lyapunov.back();
          ++report.unclassified;
        }
        const bool down = !c.to.empty() && c.V_to < c.V_from;
        if (!down || (gradient && !c.monotone)) report.ordered = false;
        report.connections.push_back(std::move(c));
      }
    }
  }
  return report;
}

MorseReport morse_decomposition(double a, double b, int sample_count) {
  return morse_decomposition(swift_hohenberg(DomainSpec{}, a, b), sample_count, MorseConfig{});
}

}  // namespace swh
