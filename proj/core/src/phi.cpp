#include "swh/phi.hpp"

#include <cmath>

#include "swh/error.hpp"

namespace swh {

double phi(int k, double z) {
  if (k < 0 || k > 12) throw InvalidArgument("phi: order out of range");
  if (std::abs(z) < 1.0) {
    // sum_j z^j/(j+k)!; 30 terms reach round-off for |z| < 1.
    double factorial = 1.0;
    for (int i = 2; i <= k; ++i) factorial *= i;
    double term = 1.0 / factorial;
    double sum = term;
    for (int j = 1; j < 30; ++j) {
      term *= z / (j + k);
      sum += term;
    }
    return sum;
  }
  double value = std::exp(z);
  double inv_factorial = 1.0;
  for (int j = 0; j < k; ++j) {
    value = (value - inv_factorial) / z;
    inv_factorial /= (j + 1);
  }
  return value;
}

}  // namespace swh
