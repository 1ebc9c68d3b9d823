#include "swh/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "swh/error.hpp"

namespace swh {
namespace {

std::vector<double> distance_weights(const DomainSpec& d, DistanceNorm norm) {
  const OperatorSpectrum s = build_spectrum(d);
  std::vector<double> w(s.mode_mu.size(), d.l2_weight());
  if (norm == DistanceNorm::h2) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= s.mode_mu[i] * s.mode_mu[i];
  }
  return w;
}

double weighted_distance(const SpectralField& u, const SpectralField& v, const std::vector<double>& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double diff = u[i] - v[i];
    acc += w[i] * diff * diff;
  }
  return std::sqrt(acc);
}

std::size_t first_at_or_after(const std::vector<double>& times, double t) {
  const double slack = 1e-9 * std::max(1.0, std::abs(t));
  return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t - slack) - times.begin());
}

double sample_spacing(const Trajectory& traj) {
  if (traj.size() < 2) return traj.sample_dt;
  return (traj.times.back() - traj.times.front()) / static_cast<double>(traj.size() - 1);
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::recurrent_evidence:
      return "recurrent_evidence";
    case Verdict::inconclusive:
      return "inconclusive";
    case Verdict::nonrecurrent_evidence:
      return "nonrecurrent_evidence";
  }
  return "inconclusive";
}

std::string to_string(DistanceNorm n) { return n == DistanceNorm::h2 ? "H2" : "L2"; }

DistanceNorm distance_norm_from_string(const std::string& name) {
  if (name == "L2" || name == "l2") return DistanceNorm::l2;
  if (name == "H2" || name == "h2") return DistanceNorm::h2;
  throw InvalidArgument(fmt::format("unknown norm '{}'", name));
}

RecurrenceReport epsilon_ell_table(const Trajectory& traj, std::vector<double> eps_list, double burn_in,
                                   DistanceNorm norm, const VerdictThresholds& thr) {
  if (eps_list.empty()) throw InvalidArgument("epsilon_ell_table: empty eps list");
  for (double e : eps_list) {
    if (!(e > 0.0)) throw InvalidArgument("epsilon_ell_table: eps must be positive");
  }
  if (traj.size() < 2) throw InvalidArgument("epsilon_ell_table: need at least two samples");
  if (!(burn_in < traj.times.back())) throw InvalidArgument("epsilon_ell_table: burn_in must precede the horizon");
  std::sort(eps_list.begin(), eps_list.end());

  RecurrenceReport report;
  report.horizon = traj.horizon();
  report.burn_in = burn_in;
  report.norm_used = norm;
  report.sample_dt = sample_spacing(traj);

  const std::size_t first = first_at_or_after(traj.times, burn_in);
  const std::size_t n = traj.size() - first;
  const std::vector<double> w = distance_weights(traj.states.front().domain(), norm);
  const std::size_t ne = eps_list.size();

  std::vector<long> worst_gap(ne, 0), worst_interior(ne, 0);
  std::vector<std::size_t> fewest(ne, std::numeric_limits<std::size_t>::max());
  std::vector<double> dist(n);
  for (std::size_t b = 0; b < n; ++b) {
    const SpectralField& x = traj.states[first + b];
    for (std::size_t j = 0; j < n; ++j) dist[j] = weighted_distance(traj.states[first + j], x, w);
    for (std::size_t e = 0; e < ne; ++e) {
      long last = -1;
      long gap = 0, interior = 0;
      std::size_t returns = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (dist[j] < eps_list[e]) {
          const long jj = static_cast<long>(j);
          if (last < 0) {
            gap = std::max(gap, jj);
          } else {
            gap = std::max(gap, jj - last);
            interior = std::max(interior, jj - last);
          }
          last = jj;
          if (j != b) ++returns;
        }
      }
      gap = std::max(gap, static_cast<long>(n - 1) - last);
      worst_gap[e] = std::max(worst_gap[e], gap);
      worst_interior[e] = std::max(worst_interior[e], interior);
      fewest[e] = std::min(fewest[e], returns);
    }
  }

  const double dt = report.sample_dt;
  bool all_recurrent = true, some_nonrecurrent = false;
  for (std::size_t e = 0; e < ne; ++e) {
    EpsEll row;
    row.eps = eps_list[e];
    row.ell = dt * static_cast<double>(std::max(1L, worst_gap[e]));
    row.max_gap = dt * static_cast<double>(worst_interior[e]);
    row.witness_count = fewest[e];
    if (row.ell > thr.recurrent_fraction * report.horizon) all_recurrent = false;
    if (row.ell > thr.nonrecurrent_fraction * report.horizon) some_nonrecurrent = true;
    report.eps_ell.push_back(row);
  }
  report.verdict = all_recurrent       ? Verdict::recurrent_evidence
                   : some_nonrecurrent ? Verdict::nonrecurrent_evidence
                                       : Verdict::inconclusive;
  return report;
}

SeparationReport separation(const Trajectory& first, const Trajectory& second, double burn_in, double max_shift,
                            std::string first_id, std::string second_id) {
  if (first.size() != second.size() || first.size() < 2) {
    throw InvalidArgument("separation: trajectories must have the same sample count (>= 2)");
  }
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (std::abs(first.times[i] - second.times[i]) > 1e-9 * std::max(1.0, std::abs(first.times[i]))) {
      throw InvalidArgument("separation: trajectories are sampled at different times");
    }
  }
  const std::size_t start = first_at_or_after(first.times, burn_in);
  if (start + 1 >= first.size()) throw InvalidArgument("separation: burn_in leaves no samples");
  const std::size_t n = first.size() - start;
  const double dt = sample_spacing(first);
  if (max_shift < 0.0) max_shift = 0.25 * (first.times.back() - first.times[start]);
  const long S = std::min(static_cast<long>(std::floor(max_shift / dt + 1e-9)), static_cast<long>(n) - 1);
  const std::vector<double> w = distance_weights(first.states.front().domain(), DistanceNorm::l2);

  SeparationReport out;
  out.first_id = std::move(first_id);
  out.second_id = std::move(second_id);
  out.min_shift_distance = std::numeric_limits<double>::infinity();
  for (long s = -S; s <= S; ++s) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long j = static_cast<long>(i) + s;
      if (j < 0 || j >= static_cast<long>(n)) continue;
      acc += weighted_distance(first.states[start + i], second.states[start + static_cast<std::size_t>(j)], w);
      ++count;
    }
    const double mean = acc / static_cast<double>(count);
    out.shift_grid.push_back(static_cast<double>(s) * dt);
    out.distances.push_back(mean);
    if (mean < out.min_shift_distance) {
      out.min_shift_distance = mean;
      out.best_shift = static_cast<double>(s) * dt;
    }
  }
  return out;
}

std::vector<OmegaCluster> omega_limit_estimate(const Trajectory& traj, double tail_fraction, double cluster_tol) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 0.5)) throw InvalidArgument("tail_fraction must lie in (0, 1/2]");
  if (!(cluster_tol > 0.0)) throw InvalidArgument("cluster_tol must be positive");
  std::vector<OmegaCluster> clusters;
  if (traj.size() == 0) return clusters;
  const std::size_t tail = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(traj.size()))));
  for (std::size_t i = traj.size() - tail; i < traj.size(); ++i) {
    const SpectralField& u = traj.states[i];
    auto hit = std::find_if(clusters.begin(), clusters.end(),
                            [&](const OmegaCluster& c) { return l2_distance(c.center, u) <= cluster_tol; });
    if (hit != clusters.end()) {
      ++hit->occupancy;
    } else {
      clusters.push_back({u, 1});
    }
  }
  return clusters;
}

}  // namespace swh
