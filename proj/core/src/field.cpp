#include "swh/field.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "swh/error.hpp"

namespace swh {

SpectralField::SpectralField(const DomainSpec& domain) : domain_(domain) {
  domain_.validate();
  coeffs_.assign(domain_.mode_count(), 0.0);
}

SpectralField::SpectralField(const DomainSpec& domain, std::vector<double> coeffs)
    : domain_(domain), coeffs_(std::move(coeffs)) {
  domain_.validate();
  if (coeffs_.size() != domain_.mode_count()) {
    throw InvalidArgument(fmt::format("field has {} coefficients, domain expects {}",
                                      coeffs_.size(), domain_.mode_count()));
  }
}

SpectralField SpectralField::mode(const DomainSpec& domain, std::array<int, 2> k, double amplitude) {
  SpectralField u(domain);
  if (k[0] < 1 || k[0] > domain.modes[0]) {
    throw InvalidArgument(fmt::format("mode index {} outside 1..{}", k[0], domain.modes[0]));
  }
  std::size_t idx = static_cast<std::size_t>(k[0] - 1);
  if (domain.dimension == 2) {
    if (k[1] < 1 || k[1] > domain.modes[1]) {
      throw InvalidArgument(fmt::format("mode index {} outside 1..{}", k[1], domain.modes[1]));
    }
    idx = idx * domain.modes[1] + static_cast<std::size_t>(k[1] - 1);
  }
  u.coeffs_[idx] = amplitude;
  return u;
}

bool SpectralField::all_finite() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return std::isfinite(c); });
}

bool SpectralField::is_zero() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

void SpectralField::require_compatible(const SpectralField& other) const {
  if (!(domain_ == other.domain_) || coeffs_.size() != other.coeffs_.size()) {
    throw InvalidArgument("fields live on different domains");
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) noexcept {
  for (double& c : coeffs_) c *= s;
  return *this;
}

double inner(const SpectralField& u, const SpectralField& v) {
  if (!(u.domain() == v.domain())) throw InvalidArgument("fields live on different domains");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc * u.domain().l2_weight();
}

double l2_norm(const SpectralField& u) { return std::sqrt(inner(u, u)); }

double l2_distance(const SpectralField& u, const SpectralField& v) {
  if (!(u.domain() == v.domain())) throw InvalidArgument("fields live on different domains");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    acc += d * d;
  }
  return std::sqrt(acc * u.domain().l2_weight());
}

double h2_distance(const SpectralField& u, const SpectralField& v) {
  if (!(u.domain() == v.domain())) throw InvalidArgument("fields live on different domains");
  const OperatorSpectrum s = build_spectrum(u.domain());
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = s.mode_mu[i] * (u[i] - v[i]);
    acc += d * d;
  }
  return std::sqrt(acc * u.domain().l2_weight());
}

SpectralField random_smooth_field(const DomainSpec& domain, std::uint64_t seed, double l2_scale) {
  const OperatorSpectrum s = build_spectrum(domain);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField u(domain);
  const double mu1 = s.mu.front();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double decay = mu1 / s.mode_mu[i];
    u[i] = normal(rng) * decay * decay;
  }
  const double n = l2_norm(u);
  if (n > 0.0) u *= l2_scale / n;
  return u;
}

}  // namespace swh
