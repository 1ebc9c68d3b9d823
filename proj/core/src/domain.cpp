#include "swh/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "swh/error.hpp"

namespace swh {

DomainSpec DomainSpec::interval(double length, int modes) {
  DomainSpec d;
  d.dimension = 1;
  d.lengths = {length, length};
  d.modes = {modes, modes};
  d.validate();
  return d;
}

DomainSpec DomainSpec::rectangle(double lx, double ly, int nx, int ny) {
  DomainSpec d;
  d.dimension = 2;
  d.lengths = {lx, ly};
  d.modes = {nx, ny};
  d.validate();
  return d;
}

void DomainSpec::validate() const {
  if (dimension != 1 && dimension != 2) {
    throw InvalidArgument(fmt::format("domain dimension must be 1 or 2, got {}", dimension));
  }
  for (int axis = 0; axis < dimension; ++axis) {
    if (!(lengths[axis] > 0.0) || !std::isfinite(lengths[axis])) {
      throw InvalidArgument(fmt::format("domain length on axis {} must be positive", axis));
    }
    const int n = modes[axis];
    // Power of two keeps the padded transform sizes regular.
    if (n < 2 || (n & (n - 1)) != 0) {
      throw InvalidArgument(
          fmt::format("mode count on axis {} must be a power of two >= 2, got {}", axis, n));
    }
  }
}

std::size_t DomainSpec::mode_count() const {
  return dimension == 1 ? static_cast<std::size_t>(modes[0])
                        : static_cast<std::size_t>(modes[0]) * static_cast<std::size_t>(modes[1]);
}

double DomainSpec::measure() const {
  return dimension == 1 ? lengths[0] : lengths[0] * lengths[1];
}

double DomainSpec::l2_weight() const {
  return dimension == 1 ? 0.5 * lengths[0] : 0.25 * lengths[0] * lengths[1];
}

double DomainSpec::wavenumber(int axis, int k) const {
  // Scale first: for L = pi (or 2pi, pi/2, ...) the ladder stays exact integers.
  return k * (std::numbers::pi / lengths[axis]);
}

OperatorSpectrum build_spectrum(const DomainSpec& domain) {
  domain.validate();
  OperatorSpectrum s;
  const std::size_t n = domain.mode_count();
  s.mode_mu.resize(n);
  if (domain.dimension == 1) {
    for (int k = 1; k <= domain.modes[0]; ++k) {
      const double w = domain.wavenumber(0, k);
      s.mode_mu[k - 1] = w * w;
    }
  } else {
    const int ny = domain.modes[1];
    for (int i = 1; i <= domain.modes[0]; ++i) {
      const double wx = domain.wavenumber(0, i);
      for (int j = 1; j <= ny; ++j) {
        const double wy = domain.wavenumber(1, j);
        s.mode_mu[static_cast<std::size_t>(i - 1) * ny + (j - 1)] = wx * wx + wy * wy;
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return s.mode_mu[l] < s.mode_mu[r]; });

  s.mode_level.assign(n, 0);
  for (std::size_t idx : order) {
    const double m = s.mode_mu[idx];
    // Coincident sums like 1+4 = 4+1 must collapse to one level.
    if (s.mu.empty() || std::abs(m - s.mu.back()) > 1e-12 * std::max(1.0, m)) {
      s.mu.push_back(m);
      s.multiplicity.push_back(0);
    }
    s.multiplicity.back() += 1;
    s.mode_level[idx] = s.mu.size() - 1;
  }
  s.biharmonic.resize(s.mu.size());
  std::transform(s.mu.begin(), s.mu.end(), s.biharmonic.begin(), [](double m) { return m * m; });
  return s;
}

LambdaLadder lambda_ladder(const OperatorSpectrum& spectrum, double a) {
  LambdaLadder ladder;
  ladder.multiplicity = spectrum.multiplicity;
  ladder.lambda.reserve(spectrum.mu.size());
  ladder.lambda0 = std::numeric_limits<double>::infinity();
  for (double mu : spectrum.mu) {
    const double base = mu * mu - 2.0 * mu;
    ladder.lambda0 = std::min(ladder.lambda0, base);
    ladder.lambda.push_back(base + a);
  }
  return ladder;
}

}  // namespace swh
