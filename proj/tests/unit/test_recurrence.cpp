#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "swh/error.hpp"
#include "swh/gradient.hpp"
#include "swh/integrator.hpp"
#include "swh/recurrence.hpp"

using namespace swh;

namespace {

constexpr double pi = std::numbers::pi;
const DomainSpec kDomain = DomainSpec::interval(pi, 16);

Trajectory synthetic(std::size_t n, double dt, const std::function<SpectralField(double)>& f, double t0 = 0.0) {
  Trajectory traj;
  traj.sample_dt = dt;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + dt * double(i);
    traj.times.push_back(t);
    traj.states.push_back(f(t));
  }
  return traj;
}

SpectralField circle(double t, double period, double radius) {
  const double w = 2 * pi / period;
  return SpectralField::mode(kDomain, {1, 0}, radius * std::cos(w * t)) +
         SpectralField::mode(kDomain, {2, 0}, radius * std::sin(w * t));
}

// Smallest L (in samples, >= 1) such that every closed window of L + 1 samples
// inside [first, n) holds a return to each base point, from the full distance matrix.
long oracle_window(const Trajectory& traj, std::size_t first, double eps) {
  const std::size_t n = traj.size();
  long worst = 1;
  for (std::size_t b = first; b < n; ++b) {
    std::vector<bool> ret(n, false);
    for (std::size_t j = first; j < n; ++j) ret[j] = l2_distance(traj.states[j], traj.states[b]) < eps;
    long L = 1;
    for (;; ++L) {
      bool ok = true;
      for (std::size_t a = first; a + L < n && ok; ++a) {
        bool any = false;
        for (std::size_t j = a; j <= a + L; ++j) any = any || ret[j];
        ok = any;
      }
      // windows must also cover the tail stretch
      long tail = 0;
      for (std::size_t j = n; j-- > first && !ret[j];) ++tail;
      if (ok && tail <= L) break;
    }
    worst = std::max(worst, L);
  }
  return worst;
}

}  // namespace

TEST(EpsEll, ConstantTrajectoryReturnsImmediately) {
  const auto u = SpectralField::mode(kDomain, {1, 0}, 0.7);
  const auto traj = synthetic(50, 0.1, [&](double) { return u; });
  const auto r = epsilon_ell_table(traj, {0.01, 0.1, 1.0}, 0.0);
  for (const auto& row : r.eps_ell) {
    EXPECT_NEAR(row.ell, 0.1, 1e-12);
    EXPECT_EQ(row.witness_count, 49u);
  }
  EXPECT_EQ(r.verdict, Verdict::recurrent_evidence);
}

TEST(EpsEll, PeriodicTrajectoryBoundedByPeriod) {
  const double period = 2.0;
  const auto traj = synthetic(401, 0.1, [&](double t) { return circle(t, period, 0.5); });
  const double diameter = 2 * 0.5 * std::sqrt(pi / 2);
  for (double eps : {0.01, 0.1, 0.3, 0.5 * diameter}) {
    const auto r = epsilon_ell_table(traj, {eps}, 0.0);
    EXPECT_LE(r.eps_ell[0].ell, period + 1e-9) << eps;
    EXPECT_GE(r.eps_ell[0].witness_count, 19u);
  }
}

TEST(EpsEll, AgreesWithDistanceMatrixOracle) {
  // Quasi-periodic motion on a torus, sampled coarsely.
  auto f = [](double t) {
    return SpectralField::mode(kDomain, {1, 0}, 0.4 * std::cos(t)) +
           SpectralField::mode(kDomain, {2, 0}, 0.4 * std::sin(t)) +
           SpectralField::mode(kDomain, {3, 0}, 0.3 * std::cos(std::sqrt(2.0) * t));
  };
  const auto traj = synthetic(240, 0.25, f);
  for (double eps : {0.15, 0.25, 0.4}) {
    for (double burn : {0.0, 10.0}) {
      const auto r = epsilon_ell_table(traj, {eps}, burn);
      const std::size_t first = std::size_t(std::lround(burn / 0.25));
      const long L = oracle_window(traj, first, eps);
      // The certificate counts return-to-return times: at most one sample above the window bound.
      EXPECT_GE(r.eps_ell[0].ell, 0.25 * double(L) - 1e-9) << eps;
      EXPECT_LE(r.eps_ell[0].ell, 0.25 * double(L + 1) + 1e-9) << eps;
    }
  }
}

TEST(EpsEll, MonotoneInEps) {
  auto f = [](double t) {
    return SpectralField::mode(kDomain, {1, 0}, std::cos(t)) +
           SpectralField::mode(kDomain, {2, 0}, 0.5 * std::sin(std::sqrt(3.0) * t));
  };
  const auto traj = synthetic(400, 0.2, f);
  const auto r = epsilon_ell_table(traj, {0.4, 0.05, 0.8, 0.1, 0.2}, 0.0);
  ASSERT_EQ(r.eps_ell.size(), 5u);
  for (std::size_t i = 1; i < r.eps_ell.size(); ++i) {
    EXPECT_LT(r.eps_ell[i - 1].eps, r.eps_ell[i].eps);
    EXPECT_GE(r.eps_ell[i - 1].ell, r.eps_ell[i].ell);
  }
}

TEST(EpsEll, ShiftConsistency) {
  auto f = [](double t) { return circle(t, 3.0, 0.4); };
  const auto a = synthetic(300, 0.1, f, 0.0);
  const auto b = synthetic(300, 0.1, f, 7.5);
  const auto ra = epsilon_ell_table(a, {0.05, 0.2}, 2.0);
  const auto rb = epsilon_ell_table(b, {0.05, 0.2}, 9.5);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(ra.eps_ell[i].ell, rb.eps_ell[i].ell, 1e-9);
    EXPECT_EQ(ra.eps_ell[i].witness_count, rb.eps_ell[i].witness_count);
  }
}

TEST(EpsEll, SmallVariationIsDegenerate) {
  auto f = [](double t) { return SpectralField::mode(kDomain, {1, 0}, 1.0 + 1e-3 * std::sin(t)); };
  const auto traj = synthetic(100, 0.3, f);
  EXPECT_NEAR(epsilon_ell_table(traj, {0.01}, 0.0).eps_ell[0].ell, 0.3, 1e-12);
}

TEST(EpsEll, DecayNeedsBurnIn) {
  const ModelSpec m{ModelKind::modified_swift_hohenberg, 6.0, 0.0, kDomain};
  IntegratorConfig c;
  c.t_end = 40.0;
  c.record_every = 100;
  const auto traj = integrate(m, ForcingModel::zero(kDomain), random_smooth_field(kDomain, 3, 1.0), 0.0, c);
  const auto raw = epsilon_ell_table(traj, {0.05}, 0.0);
  const auto burned = epsilon_ell_table(traj, {0.05}, 5.0);
  EXPECT_GT(raw.eps_ell[0].ell, 35.0);
  EXPECT_EQ(raw.verdict, Verdict::nonrecurrent_evidence);
  EXPECT_NEAR(burned.eps_ell[0].ell, 0.1, 1e-9);
  EXPECT_EQ(burned.verdict, Verdict::recurrent_evidence);
}

TEST(EpsEll, InconclusiveBetweenThresholds) {
  // Returns to the start only every 8 time units on a 40-unit horizon.
  auto f = [](double t) { return circle(t, 8.0, 1.0); };
  const auto traj = synthetic(401, 0.1, f);
  const auto r = epsilon_ell_table(traj, {0.01}, 0.0);
  EXPECT_NEAR(r.eps_ell[0].ell, 8.0, 1e-9);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  VerdictThresholds loose{0.25, 0.5};
  EXPECT_EQ(epsilon_ell_table(traj, {0.01}, 0.0, DistanceNorm::l2, loose).verdict, Verdict::recurrent_evidence);
}

TEST(EpsEll, H2NormWeighsModes) {
  // Mode-2 oscillation: H2 distances are mu_2 = 4 times the L2 ones.
  auto f = [](double t) { return SpectralField::mode(kDomain, {2, 0}, 0.1 * std::cos(t)); };
  const auto traj = synthetic(200, 0.1, f);
  const auto l2 = epsilon_ell_table(traj, {0.05}, 0.0, DistanceNorm::l2);
  const auto h2 = epsilon_ell_table(traj, {0.2}, 0.0, DistanceNorm::h2);
  EXPECT_EQ(l2.eps_ell[0].ell, h2.eps_ell[0].ell);
  EXPECT_EQ(h2.norm_used, DistanceNorm::h2);
  EXPECT_EQ(distance_norm_from_string("H2"), DistanceNorm::h2);
}

TEST(EpsEll, Preconditions) {
  const auto traj = synthetic(10, 0.1, [](double) { return SpectralField(kDomain); });
  EXPECT_THROW(epsilon_ell_table(traj, {}, 0.0), InvalidArgument);
  EXPECT_THROW(epsilon_ell_table(traj, {-1.0}, 0.0), InvalidArgument);
  EXPECT_THROW(epsilon_ell_table(traj, {0.1}, 5.0), InvalidArgument);
}

TEST(Separation, IdenticalIsZeroAtZeroShift) {
  const auto traj = synthetic(200, 0.1, [](double t) { return circle(t, 3.0, 0.5); });
  const auto s = separation(traj, traj, 0.0);
  EXPECT_EQ(s.min_shift_distance, 0.0);
  EXPECT_EQ(s.best_shift, 0.0);
  EXPECT_EQ(s.shift_grid.size(), s.distances.size());
}

TEST(Separation, ConstantEquilibria) {
  const auto e1 = SpectralField::mode(kDomain, {1, 0}, 0.8);
  const auto e2 = SpectralField::mode(kDomain, {1, 0}, -0.8) + SpectralField::mode(kDomain, {3, 0}, 0.1);
  const auto t1 = synthetic(50, 0.2, [&](double) { return e1; });
  const auto t2 = synthetic(50, 0.2, [&](double) { return e2; });
  EXPECT_NEAR(separation(t1, t2, 0.0).min_shift_distance, l2_distance(e1, e2), 1e-12);
}

TEST(Separation, SymmetricAndFindsPhaseShift) {
  const auto t1 = synthetic(400, 0.1, [](double t) { return circle(t, 4.0, 0.5); });
  const auto t2 = synthetic(400, 0.1, [](double t) { return circle(t + 1.0, 4.0, 0.5); });
  const auto s12 = separation(t1, t2, 5.0);
  const auto s21 = separation(t2, t1, 5.0);
  EXPECT_NEAR(s12.min_shift_distance, s21.min_shift_distance, 1e-14);
  EXPECT_LT(s12.min_shift_distance, 1e-12);
  // t1(t) = t2(t - 1): shift -1 (modulo the period)
  EXPECT_NEAR(std::remainder(s12.best_shift + 1.0, 4.0), 0.0, 1e-9);
  EXPECT_NEAR(std::remainder(s21.best_shift - 1.0, 4.0), 0.0, 1e-9);
}

TEST(Separation, Preconditions) {
  const auto a = synthetic(10, 0.1, [](double) { return SpectralField(kDomain); });
  const auto b = synthetic(11, 0.1, [](double) { return SpectralField(kDomain); });
  EXPECT_THROW(separation(a, b, 0.0), InvalidArgument);
  EXPECT_THROW(separation(a, a, 5.0), InvalidArgument);
}

TEST(Omega, DecayHasSingleClusterAtZero) {
  const ModelSpec m{ModelKind::modified_swift_hohenberg, 6.0, 0.0, kDomain};
  IntegratorConfig c;
  c.t_end = 20.0;
  c.record_every = 100;
  const auto traj = integrate(m, ForcingModel::zero(kDomain), random_smooth_field(kDomain, 2, 1.0), 0.0, c);
  const auto clusters = omega_limit_estimate(traj, 0.5, 1e-3);
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_LT(l2_norm(clusters[0].center), 1e-3);
}

TEST(Omega, UnforcedRunSettlesOnOneNontrivialEquilibrium) {
  const ModelSpec m{ModelKind::modified_swift_hohenberg, 0.5, 0.0, kDomain};
  IntegratorConfig c;
  c.t_end = 80.0;
  c.record_every = 200;
  const auto u0 = SpectralField::mode(kDomain, {1, 0}, -0.01) + SpectralField::mode(kDomain, {2, 0}, 0.02);
  const auto traj = integrate(m, ForcingModel::zero(kDomain), u0, 0.0, c);
  const auto clusters = omega_limit_estimate(traj, 0.25, 1e-3);
  ASSERT_EQ(clusters.size(), 1u);
  const auto search = find_equilibria(m, default_seeds(m, 0, 1));
  bool matched = false;
  for (const auto& e : search.equilibria) {
    matched = matched || (!e.state.is_zero() && l2_distance(e.state, clusters[0].center) < 1e-3);
  }
  EXPECT_TRUE(matched);
}

TEST(Omega, PeriodicForcedRunTracesALoop) {
  const ModelSpec m{ModelKind::modified_swift_hohenberg, 2.0, 0.0, kDomain};
  const ForcingModel g(ForcingKind::periodic, kDomain,
                       {{0.5, 1.0, 0.0, SpectralField::mode(kDomain, {1, 0}, std::sqrt(2.0 / pi))}});
  IntegratorConfig c;
  c.t_end = 40.0;
  c.record_every = 100;
  const auto traj = integrate(m, g, SpectralField(kDomain), 0.0, c);
  EXPECT_GE(omega_limit_estimate(traj, 0.5, 0.02).size(), 2u);
  EXPECT_THROW(omega_limit_estimate(traj, 0.7, 0.02), InvalidArgument);
}
