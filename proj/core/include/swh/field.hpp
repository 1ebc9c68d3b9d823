#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "swh/domain.hpp"

namespace swh {

/// A state u expressed by its sine-basis amplitudes on a DomainSpec.
/// In 2-D the coefficient of sin(k1 x) sin(k2 y) sits at (k1-1)*N2 + (k2-1).
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const DomainSpec& domain);
  SpectralField(const DomainSpec& domain, std::vector<double> coeffs);

  /// amplitude * phi_k for one basis function (k = {k1} or {k1, k2}, 1-based).
  static SpectralField mode(const DomainSpec& domain, std::array<int, 2> k, double amplitude);

  const DomainSpec& domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> coeffs() noexcept { return coeffs_; }
  const std::vector<double>& vector() const noexcept { return coeffs_; }

  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  bool all_finite() const noexcept;
  bool is_zero() const noexcept;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s) noexcept;

  friend SpectralField operator+(SpectralField l, const SpectralField& r) { return l += r; }
  friend SpectralField operator-(SpectralField l, const SpectralField& r) { return l -= r; }
  friend SpectralField operator*(SpectralField l, double s) { return l *= s; }
  friend SpectralField operator*(double s, SpectralField r) { return r *= s; }
  friend SpectralField operator-(SpectralField u) { return u *= -1.0; }

  bool operator==(const SpectralField&) const = default;

 private:
  void require_compatible(const SpectralField& other) const;

  DomainSpec domain_{};
  std::vector<double> coeffs_;
};

/// L2(Omega) inner product and norm through Parseval.
double inner(const SpectralField& u, const SpectralField& v);
double l2_norm(const SpectralField& u);
double l2_distance(const SpectralField& u, const SpectralField& v);
/// ||Laplacian(u - v)||, the X^{1/2} seminorm of the difference.
double h2_distance(const SpectralField& u, const SpectralField& v);

/// Smooth random field: Gaussian amplitudes damped like mu^-2, rescaled so
/// that ||u|| = l2_scale. Deterministic for a given seed.
SpectralField random_smooth_field(const DomainSpec& domain, std::uint64_t seed, double l2_scale);

}  // namespace swh
