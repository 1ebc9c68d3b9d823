#pragma once

#include "swh/field.hpp"

namespace swh {

struct NormBundle {
  double l2 = 0.0;  // ||u||
  double l4 = 0.0;  // ||u||_{L^4}
  double l6 = 0.0;  // ||u||_{L^6}
  double h2 = 0.0;  // ||Laplacian u||
};

/// l2 and h2 come from the coefficients; l4 and l6 from trapezoid quadrature
/// on grids fine enough to integrate u^4 and u^6 exactly.
NormBundle norms(const SpectralField& u);

/// int_Omega u^p dx for even p, exact for the truncated sine series.
double power_integral(const SpectralField& u, int p);

SpectralField apply_laplacian(const SpectralField& u);
SpectralField apply_biharmonic(const SpectralField& u);
/// L(a) u = Laplacian^2 u + 2 Laplacian u + a u.
SpectralField apply_shifted_operator(const SpectralField& u, double a);

/// Sine projection of u^3. `padded` selects the de-aliased (factor 2) grid.
/// Throws NonfiniteError("nonfinite nonlinearity") on blow-up.
SpectralField cubic_term(const SpectralField& u, bool padded = true);
/// Sine projection of |grad u|^2 (a cosine series projected exactly).
SpectralField gradient_square_term(const SpectralField& u, bool padded = true);

/// Directional derivatives of the two products along v.
SpectralField cubic_jvp(const SpectralField& u, const SpectralField& v, bool padded = true);
SpectralField gradient_square_jvp(const SpectralField& u, const SpectralField& v, bool padded = true);

/// Sine projection of f(u) = 2 Laplacian u + a u + b |grad u|^2 + u^3.
SpectralField nonlinear_f(const SpectralField& u, double a, double b, bool padded = true);

}  // namespace swh
