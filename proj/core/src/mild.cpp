#include "swh/mild.hpp"

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "swh/error.hpp"
#include "swh/phi.hpp"

namespace swh {
namespace {

constexpr int kStencil = 6;

// w[o][q][mode]: weight of stencil node q when the stencil starts `o` samples
// before the left end of the sub-interval (o = 0..5).
using WeightTable = std::array<std::array<std::vector<double>, kStencil>, kStencil>;

WeightTable build_weights(const std::vector<double>& symbol, double h) {
  WeightTable w;
  double factorial[kStencil] = {1, 1, 2, 6, 24, 120};
  for (int o = 0; o < kStencil; ++o) {
    Eigen::Matrix<double, kStencil, kStencil> V;
    for (int q = 0; q < kStencil; ++q) {
      const double theta = static_cast<double>(q - o);
      for (int m = 0; m < kStencil; ++m) V(q, m) = std::pow(theta, m);
    }
    const Eigen::Matrix<double, kStencil, kStencil> Vinv = V.inverse();
    for (int q = 0; q < kStencil; ++q) w[o][q].resize(symbol.size());
    for (std::size_t i = 0; i < symbol.size(); ++i) {
      const double z = -symbol[i] * h;
      double moments[kStencil];
      for (int m = 0; m < kStencil; ++m) moments[m] = factorial[m] * phi(m + 1, z);
      for (int q = 0; q < kStencil; ++q) {
        double acc = 0.0;
        for (int m = 0; m < kStencil; ++m) acc += Vinv(m, q) * moments[m];
        w[o][q][i] = h * acc;
      }
    }
  }
  return w;
}

}  // namespace

double duhamel_residual(const Trajectory& traj, const ForcingModel& g, const ModelSpec& model, int stride) {
  if (stride < 1) throw InvalidArgument("duhamel_residual: stride must be >= 1");
  const std::size_t n = traj.size();
  if (n < kStencil) throw InvalidArgument("duhamel_residual: need at least 6 samples");
  const double h = traj.times[1] - traj.times[0];
  for (std::size_t j = 1; j < n; ++j) {
    if (!(h > 0.0) || std::abs(traj.times[j] - traj.times[j - 1] - h) > 1e-6 * h) {
      throw InvalidArgument("duhamel_residual: trajectory is not uniformly sampled");
    }
  }

  const Model m(model, Splitting::principal);
  const auto& c = m.linear_symbol();
  const WeightTable w = build_weights(c, h);

  std::vector<SpectralField> rhs;
  rhs.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    SpectralField r = evaluate(g, traj.times[j]);
    r -= m.explicit_term(traj.states[j]);
    rhs.push_back(std::move(r));
  }

  const std::size_t modes = c.size();
  std::vector<double> e_h(modes), e_window(modes);
  for (std::size_t i = 0; i < modes; ++i) {
    e_h[i] = std::exp(-c[i] * h);
    e_window[i] = std::exp(-c[i] * h * stride);
  }

  double worst = 0.0;
  const DomainSpec& d = m.domain();
  for (std::size_t start = 0; start + stride < n; ++start) {
    std::vector<double> acc(modes, 0.0);
    for (std::size_t j = start; j < start + stride; ++j) {
      // stencil j-2 .. j+3, shifted to stay inside the record
      long first = static_cast<long>(j) - 2;
      first = std::max(0L, std::min(first, static_cast<long>(n) - kStencil));
      const int o = static_cast<int>(static_cast<long>(j) - first);
      for (std::size_t i = 0; i < modes; ++i) {
        double s = 0.0;
        for (int q = 0; q < kStencil; ++q) s += w[o][q][i] * rhs[first + q][i];
        acc[i] = e_h[i] * acc[i] + s;
      }
    }
    SpectralField defect(d);
    const SpectralField& u0 = traj.states[start];
    const SpectralField& u1 = traj.states[start + stride];
    for (std::size_t i = 0; i < modes; ++i) defect[i] = u1[i] - e_window[i] * u0[i] - acc[i];
    worst = std::max(worst, l2_norm(defect));
  }
  return worst;
}

std::vector<SkewSample> skew_orbit(const Trajectory& traj, const ForcingModel& g) {
  std::vector<SkewSample> out;
  out.reserve(traj.size());
  for (std::size_t j = 0; j < traj.size(); ++j) {
    out.push_back(SkewSample{traj.times[j], fingerprint(g, traj.times[j]), traj.states[j]});
  }
  return out;
}

}  // namespace swh
