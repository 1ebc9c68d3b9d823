#include "swh/model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "swh/error.hpp"
#include "swh/operators.hpp"

namespace swh {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::chafee_infante ? "chafee_infante" : "modified_swift_hohenberg";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "modified_swift_hohenberg") return ModelKind::modified_swift_hohenberg;
  if (name == "chafee_infante") return ModelKind::chafee_infante;
  throw InvalidArgument(fmt::format("unknown model kind '{}'", name));
}

void ModelSpec::validate() const {
  domain.validate();
  if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidArgument("model parameters must be finite");
}

Model::Model(ModelSpec spec, Splitting splitting)
    : spec_(spec), splitting_(splitting), spectrum_(build_spectrum(spec.domain)) {
  spec_.validate();
  const std::size_t n = spectrum_.mode_mu.size();
  linear_.resize(n);
  full_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = spectrum_.mode_mu[i];
    if (spec_.kind == ModelKind::modified_swift_hohenberg) {
      full_[i] = lambda_of(mu, spec_.a);
      linear_[i] = splitting_ == Splitting::principal ? mu * mu : full_[i];
    } else {
      full_[i] = mu - spec_.a;
      linear_[i] = splitting_ == Splitting::principal ? mu : full_[i];
    }
  }
}

void Model::require_domain(const SpectralField& u) const {
  if (!(u.domain() == spec_.domain)) throw InvalidArgument("field does not live on the model domain");
}

SpectralField Model::remainder(const SpectralField& u, bool padded) const {
  require_domain(u);
  SpectralField out = cubic_term(u, padded);
  if (spec_.kind == ModelKind::modified_swift_hohenberg && spec_.b != 0.0) {
    SpectralField grad = gradient_square_term(u, padded);
    grad *= spec_.b;
    out += grad;
  }
  return out;
}

SpectralField Model::remainder_jvp(const SpectralField& u, const SpectralField& v, bool padded) const {
  require_domain(u);
  require_domain(v);
  SpectralField out = cubic_jvp(u, v, padded);
  if (spec_.kind == ModelKind::modified_swift_hohenberg && spec_.b != 0.0) {
    SpectralField grad = gradient_square_jvp(u, v, padded);
    grad *= spec_.b;
    out += grad;
  }
  return out;
}

SpectralField Model::explicit_term(const SpectralField& u, bool padded) const {
  SpectralField out = remainder(u, padded);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += (full_[i] - linear_[i]) * u[i];
  return out;
}

SpectralField Model::residual(const SpectralField& u, bool padded) const {
  SpectralField out = remainder(u, padded);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += full_[i] * u[i];
  return out;
}

SpectralField Model::residual_jvp(const SpectralField& u, const SpectralField& v, bool padded) const {
  SpectralField out = remainder_jvp(u, v, padded);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += full_[i] * v[i];
  return out;
}

double Model::lyapunov(const SpectralField& u) const {
  require_domain(u);
  double quad = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) quad += full_[i] * u[i] * u[i];
  return 0.5 * quad * spec_.domain.l2_weight() + 0.25 * power_integral(u, 4);
}

}  // namespace swh
