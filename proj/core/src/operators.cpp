#include "swh/operators.hpp"

#include <cmath>

#include "swh/error.hpp"
#include "swh/transforms.hpp"

namespace swh {
namespace {

int product_pad(bool padded) { return padded ? 2 : 1; }

void require_finite(const std::vector<double>& values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NonfiniteError("nonfinite nonlinearity");
  }
}

SpectralField scale_by_mu_power(const SpectralField& u, int power, double sign) {
  const OperatorSpectrum s = build_spectrum(u.domain());
  SpectralField out(u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] *= sign * std::pow(s.mode_mu[i], power);
  }
  return out;
}

// sum over axes of (d_a u)(d_a v) on the closed grid, projected onto sines.
SpectralField project_gradient_product(const SpectralField& u, const SpectralField& v, int pad,
                                       double factor) {
  const DomainSpec& d = u.domain();
  const GridShape g = grid_shape(d, pad);
  std::vector<double> w(g.closed_size(), 0.0);
  for (int axis = 0; axis < d.dimension; ++axis) {
    const std::vector<double> du = detail::derivative_on_closed_grid(u, axis, pad);
    if (&u == &v) {
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += factor * du[i] * du[i];
    } else {
      const std::vector<double> dv = detail::derivative_on_closed_grid(v, axis, pad);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] += factor * du[i] * dv[i];
    }
  }
  require_finite(w);
  const std::vector<double> coeffs = detail::cosine_analysis(w, g);
  return detail::project_cosine_series(coeffs, d, g);
}

}  // namespace

double power_integral(const SpectralField& u, int p) {
  if (p < 2 || p % 2 != 0) throw InvalidArgument("power_integral expects an even power >= 2");
  // u^p has frequencies up to p*N; P = pad*(N+1) > p*N/2 makes the rule exact.
  const int pad = p / 2;
  std::vector<double> grid = to_grid(u, pad);
  for (double& x : grid) x = std::pow(x, p);
  return grid_integral(grid, u.domain(), pad);
}

NormBundle norms(const SpectralField& u) {
  NormBundle n;
  n.l2 = l2_norm(u);
  n.h2 = l2_norm(apply_laplacian(u));
  n.l4 = std::pow(std::max(power_integral(u, 4), 0.0), 0.25);
  n.l6 = std::pow(std::max(power_integral(u, 6), 0.0), 1.0 / 6.0);
  return n;
}

SpectralField apply_laplacian(const SpectralField& u) { return scale_by_mu_power(u, 1, -1.0); }

SpectralField apply_biharmonic(const SpectralField& u) { return scale_by_mu_power(u, 2, 1.0); }

SpectralField apply_shifted_operator(const SpectralField& u, double a) {
  const OperatorSpectrum s = build_spectrum(u.domain());
  SpectralField out(u);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= lambda_of(s.mode_mu[i], a);
  return out;
}

SpectralField cubic_term(const SpectralField& u, bool padded) {
  const int pad = product_pad(padded);
  std::vector<double> grid = to_grid(u, pad);
  for (double& x : grid) x = x * x * x;
  require_finite(grid);
  return to_coeff(grid, u.domain(), pad);
}

SpectralField gradient_square_term(const SpectralField& u, bool padded) {
  return project_gradient_product(u, u, product_pad(padded), 1.0);
}

SpectralField cubic_jvp(const SpectralField& u, const SpectralField& v, bool padded) {
  const int pad = product_pad(padded);
  std::vector<double> gu = to_grid(u, pad);
  const std::vector<double> gv = to_grid(v, pad);
  for (std::size_t i = 0; i < gu.size(); ++i) gu[i] = 3.0 * gu[i] * gu[i] * gv[i];
  require_finite(gu);
  return to_coeff(gu, u.domain(), pad);
}

SpectralField gradient_square_jvp(const SpectralField& u, const SpectralField& v, bool padded) {
  if (&u == &v) {
    SpectralField copy(v);
    return project_gradient_product(u, copy, product_pad(padded), 2.0);
  }
  return project_gradient_product(u, v, product_pad(padded), 2.0);
}

SpectralField nonlinear_f(const SpectralField& u, double a, double b, bool padded) {
  const OperatorSpectrum s = build_spectrum(u.domain());
  SpectralField out = cubic_term(u, padded);
  if (b != 0.0) {
    const SpectralField grad2 = gradient_square_term(u, padded);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b * grad2[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += (a - 2.0 * s.mode_mu[i]) * u[i];
  return out;
}

}  // namespace swh
