#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <vector>

namespace swh {

/// Rectangular domain (0, l_1) x ... with homogeneous Dirichlet data for u and
/// for its Laplacian. Fields live in the tensor sine basis truncated at
/// `modes[d]` per axis.
struct DomainSpec {
  int dimension = 1;
  std::array<double, 2> lengths{std::numbers::pi, std::numbers::pi};
  std::array<int, 2> modes{128, 128};

  static DomainSpec interval(double length, int modes);
  static DomainSpec rectangle(double lx, double ly, int nx, int ny);

  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;

  std::size_t mode_count() const;
  /// Lebesgue measure |Omega|.
  double measure() const;
  /// ||sum c_k phi_k||^2 = l2_weight() * sum c_k^2 for the sine basis.
  double l2_weight() const;
  /// Per-axis wavenumber of mode index k (1-based): k*pi/l.
  double wavenumber(int axis, int k) const;

  bool operator==(const DomainSpec&) const = default;
};

/// Eigenvalue ladder of -Laplacian on the retained modes.
struct OperatorSpectrum {
  std::vector<double> mu;          // distinct eigenvalues, ascending
  std::vector<int> multiplicity;   // r_k per distinct eigenvalue
  std::vector<double> biharmonic;  // mu_k^2, eigenvalues of L = Laplacian^2

  // Per retained coefficient (flattened row-major mode order).
  std::vector<double> mode_mu;
  std::vector<std::size_t> mode_level;  // index into `mu`
};

OperatorSpectrum build_spectrum(const DomainSpec& domain);

struct LambdaLadder {
  std::vector<double> lambda;      // lambda_k(a) = mu_k^2 - 2 mu_k + a
  std::vector<int> multiplicity;
  double lambda0 = 0.0;            // min_k (mu_k^2 - 2 mu_k), independent of a
};

LambdaLadder lambda_ladder(const OperatorSpectrum& spectrum, double a);

/// Returns mu^2 - 2 mu + a.
constexpr double lambda_of(double mu, double a) { return mu * mu - 2.0 * mu + a; }

}  // namespace swh
