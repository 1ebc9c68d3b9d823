#pragma once

#include <vector>

#include "swh/integrator.hpp"

namespace swh {

/// Defect of the variation-of-constants identity
///   u(t+D) = e^{-L D} u(t) + int_t^{t+D} e^{-L(t+D-s)} (g(s) - f(u(s))) ds
/// on every window [t_i, t_{i+stride}] of the record, with L the
/// principal part. The integral uses exact exponential weights against
/// degree-5 interpolants of the recorded samples. Returns the max L2 defect.
double duhamel_residual(const Trajectory& traj, const ForcingModel& g, const ModelSpec& model, int stride);

struct SkewSample {
  double t = 0.0;
  double fingerprint = 0.0;  // phase offset of theta_t g
  SpectralField state;
};

/// The recorded trajectory viewed as an orbit of the skew-product flow.
std::vector<SkewSample> skew_orbit(const Trajectory& traj, const ForcingModel& g);

}  // namespace swh
