#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "swh/field.hpp"

namespace swh {

/// Uniform grid with P = pad * (N + 1) intervals per axis. Sine-series values
/// live on the P - 1 interior nodes; cosine-series values on the closed grid
/// of P + 1 nodes. Arrays are row-major with the last axis fastest.
struct GridShape {
  int dimension = 1;
  std::array<int, 2> intervals{2, 2};

  std::size_t interior_size() const;
  std::size_t closed_size() const;
  /// Quadrature weight of one cell: prod_d l_d / P_d.
  double cell_volume(const DomainSpec& domain) const;
};

GridShape grid_shape(const DomainSpec& domain, int pad);

/// Sine synthesis onto interior nodes. pad = 1 gives the square transform
/// pair used for round trips; pad >= 2 gives the de-aliased product grid.
std::vector<double> to_grid(const SpectralField& u, int pad = 1);

/// Discrete sine analysis; truncates to the retained modes.
SpectralField to_coeff(std::span<const double> values, const DomainSpec& domain, int pad = 1);

/// Trapezoid rule on the interior nodes (the integrand vanishes on the boundary).
double grid_integral(std::span<const double> values, const DomainSpec& domain, int pad);

namespace detail {

/// d u / d x_axis sampled on the closed grid. Along the other axis the sine
/// factor vanishes at the end nodes, which are filled with zeros.
std::vector<double> derivative_on_closed_grid(const SpectralField& u, int axis, int pad);

/// Cosine-series coefficients d[m] (m = 0..P per axis) of closed-grid samples.
std::vector<double> cosine_analysis(std::span<const double> closed_values, const GridShape& shape);

/// Exact L2(Omega) projection of sum_m d[m] cos(m pi x / l) onto the retained
/// sine modes: c_k = (2/pi) sum_m d_m k (1 - (-1)^(k+m)) / (k^2 - m^2).
SpectralField project_cosine_series(std::span<const double> cos_coeffs, const DomainSpec& domain,
                                    const GridShape& shape);

}  // namespace detail
}  // namespace swh
