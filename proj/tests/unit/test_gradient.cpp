#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "swh/error.hpp"
#include "swh/gradient.hpp"
#include "swh/operators.hpp"

using namespace swh;

namespace {

constexpr double pi = std::numbers::pi;

ModelSpec sh(double a, double b, int n = 32) {
  return {ModelKind::modified_swift_hohenberg, a, b, DomainSpec::interval(pi, n)};
}

MorseConfig quick_morse() {
  MorseConfig c;
  c.random_seeds = 2;
  c.integrator.dt = 2e-3;
  c.integrator.t_end = 40.0;
  c.integrator.record_every = 50;
  return c;
}

const Equilibrium* first_nonzero(const EquilibriumSearch& s) {
  for (const auto& e : s.equilibria) {
    if (!e.state.is_zero()) return &e;
  }
  return nullptr;
}

}  // namespace

TEST(Lyapunov, ZeroAndSingleMode) {
  const auto d = DomainSpec::interval(pi, 16);
  EXPECT_EQ(lyapunov(SpectralField(d), 0.3), 0.0);
  for (double a : {-1.0, 0.5, 3.0}) {
    for (double c : {0.2, -1.5}) {
      const double expected = 0.5 * (a - 1.0) * (pi / 2) * c * c + 0.25 * (3.0 * pi / 8) * std::pow(c, 4);
      EXPECT_NEAR(lyapunov(SpectralField::mode(d, {1, 0}, c), a), expected, 1e-13 * (1 + std::abs(expected)));
    }
  }
}

TEST(Lyapunov, LowerBoundOnRandomFields) {
  const auto d = DomainSpec::interval(pi, 32);
  const double lambda0 = -1.0;
  for (double a : {-2.0, 0.5, 4.0}) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const auto u = random_smooth_field(d, seed, 0.5 * seed);
      const auto s = oracle::series(u);
      const double shift = lambda0 + a;
      const double rhs =
          0.25 * oracle::integrate([&](double x) { return std::pow(s.value(x) * s.value(x) + shift, 2); }, 0, pi, 64) -
          d.measure() / 4 * shift * shift;
      EXPECT_GE(lyapunov(u, a), rhs - 1e-10 * (1 + std::abs(rhs)));
    }
  }
}

TEST(Lyapunov, ModelObjectAgrees) {
  const auto m = sh(0.7, 0.0);
  const auto u = random_smooth_field(m.domain, 8, 1.2);
  EXPECT_NEAR(Model(m).lyapunov(u), lyapunov(u, 0.7), 1e-12);
}

TEST(Dissipation, ZeroAndEquilibrium) {
  EXPECT_EQ(dissipation(SpectralField(DomainSpec::interval(pi, 16)), 0.5), 0.0);
  const auto m = sh(0.5, 0.0);
  const auto search = find_equilibria(m, default_seeds(m, 0, 1));
  const auto* e = first_nonzero(search);
  ASSERT_NE(e, nullptr);
  EXPECT_LE(std::abs(dissipation(e->state, 0.5)), 1e-20);
}

TEST(Dissipation, MatchesFiniteDifferenceSlope) {
  const auto m = sh(0.5, 0.0, 32);
  IntegratorConfig c;
  c.dt = 1e-4;
  c.t_end = 0.5;
  c.record_every = 1;
  const auto u0 = random_smooth_field(m.domain, 3, 1.0);
  const auto warm = integrate(m, ForcingModel::zero(m.domain), u0, 0.0, c);
  ASSERT_TRUE(warm.ok());
  // Central differences at a few interior samples.
  for (std::size_t i : {std::size_t(1000), std::size_t(2500), std::size_t(4000)}) {
    const double slope = (warm.lyapunov[i + 1] - warm.lyapunov[i - 1]) / (2 * c.dt);
    EXPECT_LE(std::abs(slope - dissipation(warm.states[i], 0.5)), 1e-4) << i;
  }
}

TEST(Dissipation, VNonIncreasingAlongUnforcedRuns) {
  const auto m = sh(0.5, 0.0, 32);
  IntegratorConfig c;
  c.dt = 1e-3;
  c.t_end = 20.0;
  c.record_every = 20;
  for (std::uint64_t seed : {5u, 6u}) {
    const auto traj = integrate(m, ForcingModel::zero(m.domain), random_smooth_field(m.domain, seed, 2.0), 0.0, c);
    for (std::size_t i = 1; i < traj.size(); ++i) {
      EXPECT_LE(traj.lyapunov[i], traj.lyapunov[i - 1] + 1e-8 * (1 + std::abs(traj.lyapunov[i - 1])));
    }
  }
}

TEST(Newton, SeedZeroGivesZero) {
  for (auto [a, b] : {std::pair{0.5, 0.0}, std::pair{-2.0, 0.4}, std::pair{3.0, 1.0}}) {
    const auto m = sh(a, b, 16);
    const auto search = find_equilibria(m, {SpectralField(m.domain)});
    ASSERT_EQ(search.equilibria.size(), 1u);
    EXPECT_TRUE(search.equilibria[0].state.is_zero());
    EXPECT_EQ(search.equilibria[0].residual, 0.0);
    EXPECT_EQ(search.equilibria[0].V, 0.0);
  }
}

TEST(Newton, SingleModeGalerkinSeedLeadsToNearbyRoot) {
  const auto m = sh(0.5, 0.0, 32);
  // lambda_1 c + (3/4) c^3 = 0 from projecting c^3 sin^3 onto sin.
  const double c = std::sqrt(0.5 / 0.75);
  const auto search = find_equilibria(m, {SpectralField::mode(m.domain, {1, 0}, c)});
  ASSERT_EQ(search.equilibria.size(), 1u);
  const auto& e = search.equilibria[0];
  EXPECT_LE(e.residual, 1e-10);
  EXPECT_LT(e.V, 0.0);
  EXPECT_NEAR(e.state[0], c, 0.05 * c);
  EXPECT_LT(l2_distance(e.state, SpectralField::mode(m.domain, {1, 0}, c)), 0.05);
  EXPECT_LE(l2_norm(Model(m).residual(e.state)), 1e-10);
}

TEST(Newton, PlusMinusSymmetryWhenBIsZero) {
  // Two unstable modes at 0: lambda_1 = -11, lambda_2 = -2.
  const auto m = sh(-10.0, 0.0, 32);
  const auto search = find_equilibria(m, default_seeds(m, 3, 9));
  EXPECT_GE(search.equilibria.size(), 5u);
  for (const auto& e : search.equilibria) {
    EXPECT_LE(e.residual, 1e-10);
    if (e.state.is_zero()) continue;
    const auto mirror = find_equilibria(m, {-1.0 * e.state});
    ASSERT_EQ(mirror.equilibria.size(), 1u);
    const auto& f = mirror.equilibria[0];
    EXPECT_LT(l2_distance(f.state, -1.0 * e.state), 1e-9);
    EXPECT_NEAR(f.V, e.V, 1e-10 * (1 + std::abs(e.V)));
    EXPECT_EQ(f.unstable_dim, e.unstable_dim);
    ASSERT_EQ(f.spectrum.size(), e.spectrum.size());
    for (std::size_t k = 0; k < f.spectrum.size(); ++k) {
      EXPECT_NEAR(f.spectrum[k].value, e.spectrum[k].value, 1e-7 * (1 + std::abs(e.spectrum[k].value)));
    }
    // The mirror image is also in the inventory.
    bool found = false;
    for (const auto& g : search.equilibria) found = found || l2_distance(g.state, -1.0 * e.state) < 1e-8;
    EXPECT_TRUE(found);
  }
}

TEST(Newton, InventoryIsSortedAndDeduplicated) {
  const auto m = sh(0.5, 0.0, 32);
  auto seeds = default_seeds(m, 4, 2);
  seeds.push_back(seeds[1]);
  const auto search = find_equilibria(m, seeds);
  for (std::size_t i = 1; i < search.equilibria.size(); ++i) {
    EXPECT_LE(search.equilibria[i - 1].V, search.equilibria[i].V + 1e-12);
    for (std::size_t j = 0; j < i; ++j) {
      EXPECT_GT(l2_distance(search.equilibria[i].state, search.equilibria[j].state), 1e-9);
    }
  }
  for (std::size_t i = 0; i < search.equilibria.size(); ++i) EXPECT_EQ(search.equilibria[i].id, "e" + std::to_string(i));
}

TEST(Newton, DegenerateZeroDoesNotSpawnGhostRoots) {
  // At a = 1 the residual is cubic near 0 and falls below tol while ||u|| ~ 1e-4.
  for (double a : {1.0, 1.0 + 1e-9}) {
    const auto m = sh(a, 0.0, 32);
    const auto search = find_equilibria(m, default_seeds(m, 6, 4));
    ASSERT_EQ(search.equilibria.size(), 1u) << a;
    EXPECT_EQ(l2_norm(search.equilibria[0].state), 0.0);
  }
  const auto near = sh(1.0 - 1e-2, 0.0, 32);
  EXPECT_EQ(find_equilibria(near, default_seeds(near, 6, 4)).equilibria.size(), 3u);
}

TEST(Newton, UnstableDimensionCountsNegativeEigenvalues) {
  const auto m = sh(0.5, 0.0, 32);
  const auto search = find_equilibria(m, default_seeds(m, 0, 1));
  for (const auto& e : search.equilibria) {
    int negative = 0;
    for (const auto& s : e.spectrum) {
      if (s.value < -1e-9) negative += s.multiplicity;
    }
    EXPECT_EQ(negative, e.unstable_dim);
    EXPECT_EQ(e.unstable_directions.size(), std::size_t(e.unstable_dim));
    for (const auto& v : e.unstable_directions) EXPECT_NEAR(l2_norm(v), 1.0, 1e-12);
    if (e.state.is_zero()) {
      EXPECT_EQ(e.unstable_dim, 1);
      EXPECT_NEAR(e.spectrum.front().value, -0.5, 1e-10);
    } else {
      EXPECT_EQ(e.unstable_dim, 0);
    }
  }
}

TEST(Newton, NonConvergingSeedIsReportedNotFatal) {
  const auto m = sh(0.5, 0.0, 16);
  NewtonConfig cfg;
  cfg.max_iter = 1;
  const auto search = find_equilibria(m, {SpectralField::mode(m.domain, {2, 0}, 3.0)}, cfg);
  EXPECT_TRUE(search.equilibria.empty());
  ASSERT_EQ(search.failures.size(), 1u);
  EXPECT_EQ(search.failures[0].seed_index, 0u);
  EXPECT_FALSE(search.failures[0].reason.empty());
}

TEST(Jacobian, MatchesFiniteDifferences) {
  for (auto [a, b] : {std::pair{0.5, 0.0}, std::pair{-1.0, 0.8}}) {
    const auto m = sh(a, b, 32);
    const Model model(m);
    const auto u = random_smooth_field(m.domain, 31, 1.0);
    const auto J = jacobian(model, u);
    const std::size_t n = u.size();
    for (std::uint64_t s : {1u, 2u, 3u}) {
      const auto v = random_smooth_field(m.domain, 100 + s, 1.0);
      SpectralField Jv(m.domain);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) Jv[i] += J[i * n + k] * v[k];
      }
      const double h = 1e-6;
      const auto fd = (model.residual(u + h * v) - model.residual(u - h * v)) * (0.5 / h);
      EXPECT_LT(l2_distance(Jv, fd), 1e-6 * l2_norm(fd));
    }
  }
}

TEST(Jacobian, SymmetricWhenBIsZero) {
  const auto m = sh(0.5, 0.0, 16);
  const auto J = jacobian(Model(m), random_smooth_field(m.domain, 4, 1.0));
  const std::size_t n = 16;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) EXPECT_NEAR(J[i * n + k], J[k * n + i], 1e-10);
  }
}

TEST(IndexAtZero, Examples) {
  const auto s = build_spectrum(DomainSpec::interval(pi, 32));
  EXPECT_EQ(morse_index_zero(0.0, s).r, 1);
  EXPECT_EQ(morse_index_zero(2.0, s).r, 0);
  EXPECT_EQ(morse_index_zero(2.0, s).marginal, 0);
  const auto at_one = morse_index_zero(1.0, s);
  EXPECT_EQ(at_one.r, 0);
  EXPECT_EQ(at_one.marginal, 1);
}

TEST(IndexAtZero, MultiplicityWeightedAndMonotone) {
  const auto s = build_spectrum(DomainSpec::rectangle(2 * pi, 2 * pi, 8, 8));
  int prev = 1 << 30;
  for (double a = -30.0; a <= 5.0; a += 0.25) {
    const auto idx = morse_index_zero(a, s);
    EXPECT_LE(idx.r, prev);
    prev = idx.r;
    int oracle = 0;
    for (std::size_t k = 0; k < s.mu.size(); ++k) {
      if (lambda_of(s.mu[k], a) < -1e-9) oracle += s.multiplicity[k];
    }
    EXPECT_EQ(idx.r, oracle);
  }
  // mu = 1/2 (modes (1,1)) and mu = 5/4 ((1,2), (2,1)) on the 2 pi square.
  EXPECT_EQ(morse_index_zero(0.0, s).r, 3);
}

TEST(IndexAtZero, ChafeeInfanteCountsMuBelowA) {
  const ModelSpec m{ModelKind::chafee_infante, 5.0, 0.0, DomainSpec::interval(pi, 16)};
  EXPECT_EQ(morse_index_zero(Model(m)).r, 2);
  const ModelSpec edge{ModelKind::chafee_infante, 4.0, 0.0, DomainSpec::interval(pi, 16)};
  EXPECT_EQ(morse_index_zero(Model(edge)).r, 1);
  EXPECT_EQ(morse_index_zero(Model(edge)).marginal, 1);
}

TEST(Identity, ZeroAndComputedRoot) {
  const auto m = sh(0.5, 0.0, 32);
  const auto search = find_equilibria(m, default_seeds(m, 2, 3));
  for (const auto& e : search.equilibria) {
    const auto id = equilibrium_identity(e);
    EXPECT_TRUE(id.applicable);
    EXPECT_LE(id.defect, 1e-8 * (1 + std::abs(e.V)));
    EXPECT_LE(e.V, 1e-12);
  }
}

TEST(Identity, PerturbationSensitivity) {
  // V is critical at e but V + 1/4 int u^4 is not: its derivative along d is int e^3 d.
  const auto m = sh(0.5, 0.0, 32);
  const auto search = find_equilibria(m, default_seeds(m, 0, 1));
  const auto* e = first_nonzero(search);
  ASSERT_NE(e, nullptr);
  const auto se = oracle::series(e->state);
  double prev_rest = 0.0;
  for (double size : {1e-2, 5e-3, 2.5e-3}) {
    const auto d = random_smooth_field(m.domain, 77, size);
    const auto sd = oracle::series(d);
    const double first = oracle::integrate([&](double x) { return std::pow(se.value(x), 3) * sd.value(x); }, 0, pi, 64);
    Equilibrium p = *e;
    p.state += d;
    const double defect = equilibrium_identity(p).defect;
    EXPECT_GT(defect, 1e-8);
    EXPECT_LT(defect, 1e-1);
    const double rest = std::abs(defect - std::abs(first));
    if (prev_rest > 0.0) EXPECT_NEAR(prev_rest / rest, 4.0, 0.5);
    prev_rest = rest;
  }
}

TEST(Identity, FlaggedForNonzeroB) {
  const auto m = sh(0.5, 0.2, 16);
  const auto search = find_equilibria(m, default_seeds(m, 0, 1));
  for (const auto& e : search.equilibria) EXPECT_FALSE(equilibrium_identity(e).applicable);
}

TEST(Morse, TrivialAboveThreshold) {
  const auto report = morse_decomposition(sh(2.0, 0.0, 32), 3, quick_morse());
  ASSERT_EQ(report.equilibria.size(), 1u);
  EXPECT_TRUE(report.equilibria[0].state.is_zero());
  EXPECT_TRUE(report.K0_members.empty());
  EXPECT_EQ(report.r_zero, 0);
  EXPECT_FALSE(report.nontrivial_expected);
  EXPECT_EQ(report.classified, 3);
  EXPECT_EQ(report.unclassified, 0);
  EXPECT_TRUE(report.connections.empty());
}

TEST(Morse, NontrivialBelowThreshold) {
  const auto report = morse_decomposition(sh(0.5, 0.0, 32), 3, quick_morse());
  EXPECT_EQ(report.r_zero, 1);
  EXPECT_TRUE(report.nontrivial_expected);
  ASSERT_EQ(report.K0_members.size(), 2u);
  // K0 together with {0} partitions the inventory.
  EXPECT_EQ(report.K0_members.size() + 1, report.equilibria.size());
  for (const auto& id : report.K0_members) {
    const auto* e = report.find(id);
    ASSERT_NE(e, nullptr);
    EXPECT_LT(e->V, 0.0);
  }
  const auto* plus = report.find(report.K0_members[0]);
  const auto* minus = report.find(report.K0_members[1]);
  EXPECT_LT(l2_distance(plus->state, -1.0 * minus->state), 1e-8);
  // Both shots from 0 land in K0, one on each side.
  std::vector<std::string> targets;
  for (const auto& c : report.connections) {
    const auto* from = report.find(c.from);
    ASSERT_NE(from, nullptr);
    if (from->state.is_zero()) targets.push_back(c.to);
    EXPECT_TRUE(c.monotone);
    EXPECT_LT(c.V_to, c.V_from);
  }
  std::sort(targets.begin(), targets.end());
  auto expected = report.K0_members;
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(targets, expected);
  EXPECT_TRUE(report.ordered);
  EXPECT_EQ(report.unclassified, 0);
  EXPECT_NEAR(report.min_V(), plus->V, 1e-14);
}

TEST(Morse, InvalidSampleCount) { EXPECT_THROW(morse_decomposition(sh(0.5, 0.0, 16), -1), InvalidArgument); }
