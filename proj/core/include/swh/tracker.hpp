#pragma once

#include "swh/integrator.hpp"

namespace swh {

struct TrackerConfig {
  double node_dt = 0.01;  // spacing of the time nodes
  double pad = 60.0;      // extra time on both ends where the iteration starts from 0
  double tol = 1e-11;     // max node-wise L2 change between sweeps
  int max_iter = 100;
  int record_every = 10;  // record one node out of this many
  bool padded = true;

  void validate() const;
};

struct TrackedOrbit {
  Trajectory trajectory;
  int iterations = 0;
  double last_change = 0.0;
  bool converged = false;
};

/// The bounded solution that stays near 0 when 0 is a hyperbolic
/// equilibrium and the forcing is small. Splitting modes by the sign of
/// Lambda, stable modes are integrated forward and unstable modes backward
/// (both starting from 0 at the padded ends), and the nonlinear remainder is
/// updated by fixed-point sweeps. Forward integration cannot follow this
/// orbit when 0 has unstable directions.
TrackedOrbit track_hyperbolic_orbit(const ModelSpec& model, const ForcingModel& g, double t0, double t1,
                                    const TrackerConfig& cfg = {});

}  // namespace swh
