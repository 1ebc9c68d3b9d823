#pragma once

namespace swh {

/// phi_k(z) = sum_{j>=0} z^j / (j+k)!, so phi_0 = e^z, phi_1 = (e^z - 1)/z and
/// phi_{k+1}(z) = (phi_k(z) - 1/k!) / z. Taylor series for |z| < 1, the
/// recurrence elsewhere. Valid for 0 <= k <= 12.
double phi(int k, double z);

}  // namespace swh
