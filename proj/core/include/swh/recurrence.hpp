#pragma once

#include <string>
#include <vector>

#include "swh/integrator.hpp"

namespace swh {

enum class Verdict { recurrent_evidence, inconclusive, nonrecurrent_evidence };
enum class DistanceNorm { l2, h2 };

std::string to_string(Verdict v);
std::string to_string(DistanceNorm n);
DistanceNorm distance_norm_from_string(const std::string& name);

struct EpsEll {
  double eps = 0.0;
  double ell = 0.0;               // smallest window length in which every base point returns
  std::size_t witness_count = 0;  // fewest returns (other than itself) of any base point
  double max_gap = 0.0;           // largest time between consecutive returns
};

struct RecurrenceReport {
  std::vector<EpsEll> eps_ell;  // ascending eps
  Verdict verdict = Verdict::inconclusive;
  double horizon = 0.0;
  double burn_in = 0.0;
  double sample_dt = 0.0;
  DistanceNorm norm_used = DistanceNorm::l2;
};

struct VerdictThresholds {
  double recurrent_fraction = 1.0 / 20.0;    // ell <= fraction * horizon for every eps
  double nonrecurrent_fraction = 1.0 / 2.0;  // some return gap > fraction * horizon
};

/// Finite-horizon Birkhoff test on the samples with t >= burn_in. For each
/// base sample the returns within eps are located and the largest stretch
/// without a return (including the stretches to both ends of the record) is
/// measured; ell(eps) is the worst case over base samples, never below the
/// sample spacing.
RecurrenceReport epsilon_ell_table(const Trajectory& traj, std::vector<double> eps_list, double burn_in,
                                   DistanceNorm norm = DistanceNorm::l2, const VerdictThresholds& thr = {});

struct SeparationReport {
  double min_shift_distance = 0.0;
  double best_shift = 0.0;
  std::vector<double> shift_grid;
  std::vector<double> distances;  // time-averaged distance per shift
  std::string first_id;
  std::string second_id;
};

/// min over shifts s of mean_t ||u1(t) - u2(t + s)|| on the post-burn-in
/// overlap, |s| <= max_shift (default: a quarter of the post-burn-in span).
SeparationReport separation(const Trajectory& first, const Trajectory& second, double burn_in,
                            double max_shift = -1.0, std::string first_id = "0", std::string second_id = "1");

struct OmegaCluster {
  SpectralField center;
  std::size_t occupancy = 0;
};

/// Greedy clustering of the last tail_fraction of the samples.
std::vector<OmegaCluster> omega_limit_estimate(const Trajectory& traj, double tail_fraction, double cluster_tol);

}  // namespace swh
