#include "swh/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "swh/error.hpp"

namespace swh {
namespace {

constexpr long kMaxDenominator = 1000;
constexpr double kRatioTol = 1e-12;

struct Rational {
  long p = 0;
  long q = 1;
};

std::optional<Rational> rational_approximation(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) return std::nullopt;
  long h_prev = 1, h_prev2 = 0;
  long k_prev = 0, k_prev2 = 1;
  double x = r;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(x);
    if (a > 1e12) break;
    const long ai = static_cast<long>(a);
    const long h = ai * h_prev + h_prev2;
    const long k = ai * k_prev + k_prev2;
    if (k > kMaxDenominator) break;
    if (std::abs(r - static_cast<double>(h) / static_cast<double>(k)) <= kRatioTol * std::max(1.0, r)) {
      return Rational{h, k};
    }
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const double frac = x - a;
    if (frac <= 0.0) break;
    x = 1.0 / frac;
  }
  return std::nullopt;
}

double coefficient(const ForcingComponent& c, double t, double offset) {
  return c.amplitude * std::cos(c.frequency * (t + offset) + c.phase);
}

double quadratic_form(const std::vector<double>& gram, const std::vector<double>& alpha) {
  const std::size_t m = alpha.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) acc += alpha[i] * alpha[j] * gram[i * m + j];
  }
  return std::max(acc, 0.0);
}

}  // namespace

bool rationally_independent(double w1, double w2) {
  if (w1 == 0.0 || w2 == 0.0) return false;
  return !rational_approximation(std::abs(w1 / w2)).has_value();
}

ForcingModel::ForcingModel(ForcingKind kind, DomainSpec domain, std::vector<ForcingComponent> components,
                           double phase_offset)
    : kind_(kind), domain_(domain), components_(std::move(components)), phase_offset_(phase_offset) {
  domain_.validate();
  if (!std::isfinite(phase_offset_)) throw InvalidArgument("forcing phase offset must be finite");
  for (const auto& c : components_) {
    if (!(c.profile.domain() == domain_)) throw InvalidArgument("forcing profile lives on another domain");
    if (!std::isfinite(c.amplitude) || !std::isfinite(c.frequency) || !std::isfinite(c.phase) ||
        c.frequency < 0.0) {
      throw InvalidArgument("forcing component needs finite amplitude/phase and frequency >= 0");
    }
    if (!c.profile.all_finite()) throw InvalidArgument("forcing profile is not finite");
  }

  std::vector<double> freqs;
  for (const auto& c : components_) {
    if (c.frequency > 0.0) freqs.push_back(c.frequency);
  }

  switch (kind_) {
    case ForcingKind::zero:
      if (!components_.empty()) throw InvalidArgument("zero forcing cannot carry components");
      break;
    case ForcingKind::periodic: {
      if (components_.empty()) throw InvalidArgument("periodic forcing needs at least one component");
      if (freqs.empty()) break;  // constant in time
      const double ref = freqs.front();
      std::vector<Rational> ratios;
      long lcm_q = 1;
      for (double w : freqs) {
        auto r = rational_approximation(w / ref);
        if (!r) {
          throw InvalidArgument(
              fmt::format("periodic forcing has incommensurate frequencies {} and {}", ref, w));
        }
        ratios.push_back(*r);
        lcm_q = std::lcm(lcm_q, r->q);
      }
      long g = 0;
      for (const auto& r : ratios) g = std::gcd(g, r.p * (lcm_q / r.q));
      const double fundamental = ref * static_cast<double>(g) / static_cast<double>(lcm_q);
      period_ = 2.0 * std::numbers::pi / fundamental;
      break;
    }
    case ForcingKind::quasiperiodic: {
      bool independent = false;
      for (std::size_t i = 0; i < freqs.size() && !independent; ++i) {
        for (std::size_t j = i + 1; j < freqs.size(); ++j) {
          if (rationally_independent(freqs[i], freqs[j])) {
            independent = true;
            break;
          }
        }
      }
      if (!independent) {
        throw InvalidArgument("quasiperiodic forcing needs two rationally independent frequencies");
      }
      break;
    }
  }

  const std::size_t m = components_.size();
  gram_.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double v = inner(components_[i].profile, components_[j].profile);
      gram_[i * m + j] = v;
      gram_[j * m + i] = v;
    }
  }
}

ForcingModel ForcingModel::zero(const DomainSpec& domain) {
  return ForcingModel(ForcingKind::zero, domain, {}, 0.0);
}

std::string to_string(ForcingKind kind) {
  switch (kind) {
    case ForcingKind::zero:
      return "zero";
    case ForcingKind::periodic:
      return "periodic";
    case ForcingKind::quasiperiodic:
      return "quasiperiodic";
  }
  return "zero";
}

ForcingKind forcing_kind_from_string(const std::string& name) {
  if (name == "zero") return ForcingKind::zero;
  if (name == "periodic") return ForcingKind::periodic;
  if (name == "quasiperiodic") return ForcingKind::quasiperiodic;
  throw InvalidArgument(fmt::format("unknown forcing kind '{}'", name));
}

SpectralField evaluate(const ForcingModel& g, double t) {
  SpectralField out(g.domain());
  for (const auto& c : g.components()) {
    const double s = coefficient(c, t, g.phase_offset());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * c.profile[i];
  }
  return out;
}

double norm_at(const ForcingModel& g, double t) {
  std::vector<double> alpha;
  alpha.reserve(g.components().size());
  for (const auto& c : g.components()) alpha.push_back(coefficient(c, t, g.phase_offset()));
  return std::sqrt(quadratic_form(g.gram(), alpha));
}

double shift_difference_norm(const ForcingModel& g, double t, double tau) {
  std::vector<double> alpha;
  alpha.reserve(g.components().size());
  for (const auto& c : g.components()) {
    alpha.push_back(coefficient(c, t + tau, g.phase_offset()) - coefficient(c, t, g.phase_offset()));
  }
  return std::sqrt(quadratic_form(g.gram(), alpha));
}

ForcingModel shift(const ForcingModel& g, double tau) {
  return ForcingModel(g.kind(), g.domain(), g.components(), g.phase_offset() + tau);
}

ForcingModel scaled(const ForcingModel& g, double factor) {
  if (g.kind() == ForcingKind::zero) return g;
  auto comps = g.components();
  for (auto& c : comps) c.amplitude *= factor;
  return ForcingModel(g.kind(), g.domain(), std::move(comps), g.phase_offset());
}

double fingerprint(const ForcingModel& g, double t) {
  if (g.kind() == ForcingKind::zero) return 0.0;
  const double offset = g.phase_offset() + t;
  if (auto T = g.period()) {
    const double r = std::fmod(offset, *T);
    return r < 0.0 ? r + *T : r;
  }
  return offset;
}

SupBound sup_bound(const ForcingModel& g, std::optional<SupScan> scan) {
  SupBound out;
  for (std::size_t i = 0; i < g.components().size(); ++i) {
    const auto& c = g.components()[i];
    const std::size_t m = g.components().size();
    out.bound += std::abs(c.amplitude) * std::sqrt(g.gram()[i * m + i]);
  }
  out.attained = g.kind() == ForcingKind::zero || g.components().size() == 1;
  if (scan) {
    double horizon = scan->horizon;
    if (horizon <= 0.0) horizon = g.period().value_or(1e4);
    const int spu = std::max(scan->samples_per_unit, 1);
    const long n = static_cast<long>(std::ceil(horizon * spu));
    double best = 0.0;
    for (long i = 0; i <= n; ++i) best = std::max(best, norm_at(g, static_cast<double>(i) / spu));
    out.scanned_max = best;
    if (!out.attained) out.attained = best >= out.bound * (1.0 - 1e-12);
  }
  return out;
}

void BebutovConfig::validate() const {
  if (trunc < 1) throw InvalidArgument("bebutov trunc must be >= 1");
  if (samples_per_unit < 4) throw InvalidArgument("bebutov samples_per_unit must be >= 4");
}

double bebutov_distance(const ForcingModel& g1, const ForcingModel& g2, const BebutovConfig& cfg) {
  cfg.validate();
  if (!(g1.domain() == g2.domain())) throw InvalidArgument("forcings live on different domains");
  const int spu = cfg.samples_per_unit;
  // d(t) on the symmetric grid; m_n is the running max over |t| <= n.
  std::vector<double> running(static_cast<std::size_t>(cfg.trunc) + 1, 0.0);
  const long half = static_cast<long>(cfg.trunc) * spu;
  auto dist = [&](double t) { return l2_distance(evaluate(g1, t), evaluate(g2, t)); };
  double m = dist(0.0);
  long next_boundary = spu;
  int n = 1;
  for (long i = 1; i <= half; ++i) {
    const double t = static_cast<double>(i) / spu;
    m = std::max({m, dist(t), dist(-t)});
    if (i == next_boundary) {
      running[n] = m;
      ++n;
      next_boundary += spu;
    }
  }
  double rho = 0.0;
  double weight = 0.5;
  for (int k = 1; k <= cfg.trunc; ++k) {
    rho += weight * running[k] / (1.0 + running[k]);
    weight *= 0.5;
  }
  return rho;
}

AlmostPeriodScan almost_period_scan(const ForcingModel& g, double eps, double window, double horizon,
                                    int samples_per_unit) {
  if (!(eps > 0.0)) throw InvalidArgument("almost_period_scan: eps must be positive");
  if (!(horizon > window) || window < 0.0) throw InvalidArgument("almost_period_scan: need horizon > window >= 0");
  if (samples_per_unit < 1) throw InvalidArgument("almost_period_scan: samples_per_unit must be >= 1");
  const int spu = samples_per_unit;
  const long nt = static_cast<long>(std::ceil(window * spu));
  const long ntau = static_cast<long>(std::floor(horizon * spu));
  AlmostPeriodScan out;
  for (long j = 0; j <= ntau; ++j) {
    const double tau = static_cast<double>(j) / spu;
    bool ok = true;
    for (long i = -nt; i <= nt && ok; ++i) {
      ok = shift_difference_norm(g, static_cast<double>(i) / spu, tau) < eps;
    }
    if (ok) out.shifts.push_back(tau);
  }
  double prev = 0.0;
  for (double s : out.shifts) {
    out.max_gap = std::max(out.max_gap, s - prev);
    prev = s;
  }
  out.max_gap = std::max(out.max_gap, horizon - prev);
  if (out.shifts.size() <= 1) out.note = "no almost period found at this eps within horizon";
  return out;
}

}  // namespace swh
