#pragma once

#include <string>
#include <vector>

#include "swh/field.hpp"

namespace swh {

enum class ModelKind { modified_swift_hohenberg, chafee_infante };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::modified_swift_hohenberg;
  double a = 0.0;
  double b = 0.0;  // ignored by chafee_infante
  DomainSpec domain{};

  void validate() const;
};

/// Which part of the linear operator the time stepper treats exactly.
///  principal: L = Laplacian^2 (Swift-Hohenberg) or -Laplacian (Chafee-Infante);
///             the rest of the linear terms stay in f.
///  full:      L = L(a) (resp. -Laplacian - a), f keeps only the nonlinear part.
enum class Splitting { principal, full };

/// u_t + L u + f(u) = g with the splitting chosen at construction, and the
/// stationary map F(u) = Lambda u + N(u) where Lambda is the full linear
/// symbol and N the purely nonlinear remainder.
class Model {
 public:
  explicit Model(ModelSpec spec, Splitting splitting = Splitting::principal);

  const ModelSpec& spec() const noexcept { return spec_; }
  const DomainSpec& domain() const noexcept { return spec_.domain; }
  Splitting splitting() const noexcept { return splitting_; }
  const OperatorSpectrum& spectrum() const noexcept { return spectrum_; }

  /// Diagonal of the exactly treated linear part, per coefficient.
  const std::vector<double>& linear_symbol() const noexcept { return linear_; }
  /// Lambda per coefficient: lambda_k(a) or mu_k - a.
  const std::vector<double>& full_symbol() const noexcept { return full_; }

  /// f(u) for the chosen splitting.
  SpectralField explicit_term(const SpectralField& u, bool padded = true) const;
  /// N(u) = b P|grad u|^2 + P u^3 (Swift-Hohenberg) or P u^3 (Chafee-Infante).
  SpectralField remainder(const SpectralField& u, bool padded = true) const;
  SpectralField remainder_jvp(const SpectralField& u, const SpectralField& v, bool padded = true) const;

  /// F(u) = Lambda u + N(u); zero exactly at equilibria of the autonomous problem.
  SpectralField residual(const SpectralField& u, bool padded = true) const;
  SpectralField residual_jvp(const SpectralField& u, const SpectralField& v, bool padded = true) const;

  /// V(u) = 1/2 (Lambda u, u) + 1/4 int u^4. A Lyapunov function when b = 0.
  double lyapunov(const SpectralField& u) const;

 private:
  void require_domain(const SpectralField& u) const;

  ModelSpec spec_;
  Splitting splitting_;
  OperatorSpectrum spectrum_;
  std::vector<double> linear_;
  std::vector<double> full_;
};

}  // namespace swh
