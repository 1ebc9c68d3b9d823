#include "swh/transforms.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include <fmt/format.h>

#include "swh/error.hpp"

namespace swh {
namespace {

// fftw_plan creation is not thread safe; execution through the new-array
// interface is. Plans are created once per shape and kept for the process.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n0, int n1, fftw_r2r_kind k0, fftw_r2r_kind k1, int rank) {
    const Key key{rank, n0, n1, k0, k1};
    std::lock_guard lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const std::size_t total = static_cast<std::size_t>(n0) * (rank == 2 ? n1 : 1);
    std::vector<double> in(total), out(total);
    fftw_plan p = nullptr;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (rank == 1) {
      p = fftw_plan_r2r_1d(n0, in.data(), out.data(), k0, flags);
    } else {
      p = fftw_plan_r2r_2d(n0, n1, in.data(), out.data(), k0, k1, flags);
    }
    if (p == nullptr) throw Error("fftw failed to create a plan");
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  using Key = std::tuple<int, int, int, int, int>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

void run_r2r(int rank, std::array<int, 2> n, std::array<fftw_r2r_kind, 2> kinds,
             std::vector<double>& in, std::vector<double>& out) {
  fftw_plan p = PlanCache::instance().get(n[0], n[1], kinds[0], kinds[1], rank);
  fftw_execute_r2r(p, in.data(), out.data());
}

struct ProjectionMatrix {
  int modes = 0;
  int max_m = 0;  // columns m = 0..max_m
  std::vector<double> entries;  // row k-1, column m
};

std::shared_ptr<const ProjectionMatrix> projection_matrix(int modes, int max_m) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const ProjectionMatrix>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({modes, max_m});
  if (it != cache.end()) return it->second;
  auto pm = std::make_shared<ProjectionMatrix>();
  pm->modes = modes;
  pm->max_m = max_m;
  pm->entries.assign(static_cast<std::size_t>(modes) * (max_m + 1), 0.0);
  for (int k = 1; k <= modes; ++k) {
    for (int m = 0; m <= max_m; ++m) {
      if ((k + m) % 2 == 0) continue;
      const double kk = k;
      const double mm = m;
      pm->entries[static_cast<std::size_t>(k - 1) * (max_m + 1) + m] =
          (2.0 / std::numbers::pi) * 2.0 * kk / (kk * kk - mm * mm);
    }
  }
  cache.emplace(std::pair{modes, max_m}, pm);
  return pm;
}

}  // namespace

std::size_t GridShape::interior_size() const {
  std::size_t n = static_cast<std::size_t>(intervals[0] - 1);
  if (dimension == 2) n *= static_cast<std::size_t>(intervals[1] - 1);
  return n;
}

std::size_t GridShape::closed_size() const {
  std::size_t n = static_cast<std::size_t>(intervals[0] + 1);
  if (dimension == 2) n *= static_cast<std::size_t>(intervals[1] + 1);
  return n;
}

double GridShape::cell_volume(const DomainSpec& domain) const {
  double v = domain.lengths[0] / intervals[0];
  if (dimension == 2) v *= domain.lengths[1] / intervals[1];
  return v;
}

GridShape grid_shape(const DomainSpec& domain, int pad) {
  if (pad < 1) throw InvalidArgument("grid padding factor must be >= 1");
  GridShape g;
  g.dimension = domain.dimension;
  g.intervals = {pad * (domain.modes[0] + 1), pad * (domain.modes[1] + 1)};
  return g;
}

std::vector<double> to_grid(const SpectralField& u, int pad) {
  const DomainSpec& d = u.domain();
  const GridShape g = grid_shape(d, pad);
  std::vector<double> in(g.interior_size(), 0.0), out(g.interior_size());
  if (d.dimension == 1) {
    for (int k = 0; k < d.modes[0]; ++k) in[k] = 0.5 * u[k];
    run_r2r(1, {g.intervals[0] - 1, 1}, {FFTW_RODFT00, FFTW_RODFT00}, in, out);
  } else {
    const int ny = g.intervals[1] - 1;
    const int my = d.modes[1];
    for (int i = 0; i < d.modes[0]; ++i) {
      for (int j = 0; j < my; ++j) {
        in[static_cast<std::size_t>(i) * ny + j] = 0.25 * u[static_cast<std::size_t>(i) * my + j];
      }
    }
    run_r2r(2, {g.intervals[0] - 1, ny}, {FFTW_RODFT00, FFTW_RODFT00}, in, out);
  }
  return out;
}

SpectralField to_coeff(std::span<const double> values, const DomainSpec& domain, int pad) {
  const GridShape g = grid_shape(domain, pad);
  if (values.size() != g.interior_size()) {
    throw InvalidArgument(fmt::format("grid has {} values, expected {} for pad {}", values.size(),
                                      g.interior_size(), pad));
  }
  std::vector<double> in(values.begin(), values.end()), out(values.size());
  SpectralField u(domain);
  if (domain.dimension == 1) {
    run_r2r(1, {g.intervals[0] - 1, 1}, {FFTW_RODFT00, FFTW_RODFT00}, in, out);
    const double scale = 1.0 / g.intervals[0];
    for (int k = 0; k < domain.modes[0]; ++k) u[k] = out[k] * scale;
  } else {
    const int ny = g.intervals[1] - 1;
    run_r2r(2, {g.intervals[0] - 1, ny}, {FFTW_RODFT00, FFTW_RODFT00}, in, out);
    const double scale = 1.0 / (static_cast<double>(g.intervals[0]) * g.intervals[1]);
    const int my = domain.modes[1];
    for (int i = 0; i < domain.modes[0]; ++i) {
      for (int j = 0; j < my; ++j) {
        u[static_cast<std::size_t>(i) * my + j] = out[static_cast<std::size_t>(i) * ny + j] * scale;
      }
    }
  }
  return u;
}

double grid_integral(std::span<const double> values, const DomainSpec& domain, int pad) {
  const GridShape g = grid_shape(domain, pad);
  if (values.size() != g.interior_size()) throw InvalidArgument("grid size mismatch in integral");
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * g.cell_volume(domain);
}

namespace detail {

std::vector<double> derivative_on_closed_grid(const SpectralField& u, int axis, int pad) {
  const DomainSpec& d = u.domain();
  const GridShape g = grid_shape(d, pad);
  if (axis < 0 || axis >= d.dimension) throw InvalidArgument("derivative axis out of range");

  if (d.dimension == 1) {
    const int n = g.intervals[0] + 1;
    std::vector<double> in(n, 0.0), out(n);
    for (int k = 1; k <= d.modes[0]; ++k) in[k] = 0.5 * d.wavenumber(0, k) * u[k - 1];
    run_r2r(1, {n, 1}, {FFTW_REDFT00, FFTW_REDFT00}, in, out);
    return out;
  }

  const int P0 = g.intervals[0];
  const int P1 = g.intervals[1];
  const int m0 = d.modes[0];
  const int m1 = d.modes[1];
  std::vector<double> closed(g.closed_size(), 0.0);
  if (axis == 0) {
    const int n0 = P0 + 1;
    const int n1 = P1 - 1;
    std::vector<double> in(static_cast<std::size_t>(n0) * n1, 0.0), out(in.size());
    for (int i = 1; i <= m0; ++i) {
      const double w = d.wavenumber(0, i);
      for (int j = 1; j <= m1; ++j) {
        in[static_cast<std::size_t>(i) * n1 + (j - 1)] =
            0.25 * w * u[static_cast<std::size_t>(i - 1) * m1 + (j - 1)];
      }
    }
    run_r2r(2, {n0, n1}, {FFTW_REDFT00, FFTW_RODFT00}, in, out);
    for (int r = 0; r < n0; ++r) {
      for (int c = 1; c < P1; ++c) {
        closed[static_cast<std::size_t>(r) * (P1 + 1) + c] = out[static_cast<std::size_t>(r) * n1 + (c - 1)];
      }
    }
  } else {
    const int n0 = P0 - 1;
    const int n1 = P1 + 1;
    std::vector<double> in(static_cast<std::size_t>(n0) * n1, 0.0), out(in.size());
    for (int i = 1; i <= m0; ++i) {
      for (int j = 1; j <= m1; ++j) {
        in[static_cast<std::size_t>(i - 1) * n1 + j] =
            0.25 * d.wavenumber(1, j) * u[static_cast<std::size_t>(i - 1) * m1 + (j - 1)];
      }
    }
    run_r2r(2, {n0, n1}, {FFTW_RODFT00, FFTW_REDFT00}, in, out);
    for (int r = 1; r < P0; ++r) {
      for (int c = 0; c < n1; ++c) {
        closed[static_cast<std::size_t>(r) * (P1 + 1) + c] = out[static_cast<std::size_t>(r - 1) * n1 + c];
      }
    }
  }
  return closed;
}

std::vector<double> cosine_analysis(std::span<const double> closed_values, const GridShape& shape) {
  if (closed_values.size() != shape.closed_size()) throw InvalidArgument("closed grid size mismatch");
  std::vector<double> in(closed_values.begin(), closed_values.end()), out(in.size());
  auto endpoint_factor = [](int m, int P) { return (m == 0 || m == P) ? 1.0 : 2.0; };
  if (shape.dimension == 1) {
    const int P = shape.intervals[0];
    run_r2r(1, {P + 1, 1}, {FFTW_REDFT00, FFTW_REDFT00}, in, out);
    for (int m = 0; m <= P; ++m) out[m] *= endpoint_factor(m, P) / (2.0 * P);
  } else {
    const int P0 = shape.intervals[0];
    const int P1 = shape.intervals[1];
    run_r2r(2, {P0 + 1, P1 + 1}, {FFTW_REDFT00, FFTW_REDFT00}, in, out);
    const double scale = 1.0 / (4.0 * P0 * P1);
    for (int i = 0; i <= P0; ++i) {
      for (int j = 0; j <= P1; ++j) {
        out[static_cast<std::size_t>(i) * (P1 + 1) + j] *=
            scale * endpoint_factor(i, P0) * endpoint_factor(j, P1);
      }
    }
  }
  return out;
}

SpectralField project_cosine_series(std::span<const double> cos_coeffs, const DomainSpec& domain,
                                    const GridShape& shape) {
  if (cos_coeffs.size() != shape.closed_size()) throw InvalidArgument("cosine coefficient size mismatch");
  SpectralField u(domain);
  if (domain.dimension == 1) {
    const int P = shape.intervals[0];
    const auto pm = projection_matrix(domain.modes[0], P);
    for (int k = 1; k <= domain.modes[0]; ++k) {
      const double* row = pm->entries.data() + static_cast<std::size_t>(k - 1) * (P + 1);
      double acc = 0.0;
      for (int m = (k % 2 == 0) ? 1 : 0; m <= P; m += 2) acc += row[m] * cos_coeffs[m];
      u[k - 1] = acc;
    }
    return u;
  }

  const int P0 = shape.intervals[0];
  const int P1 = shape.intervals[1];
  const int m0 = domain.modes[0];
  const int m1 = domain.modes[1];
  const auto px = projection_matrix(m0, P0);
  const auto py = projection_matrix(m1, P1);
  // Contract the y axis first: tmp[i][k2] = sum_m py[k2][m] d[i][m].
  std::vector<double> tmp(static_cast<std::size_t>(P0 + 1) * m1, 0.0);
  for (int i = 0; i <= P0; ++i) {
    const double* drow = cos_coeffs.data() + static_cast<std::size_t>(i) * (P1 + 1);
    for (int k = 1; k <= m1; ++k) {
      const double* prow = py->entries.data() + static_cast<std::size_t>(k - 1) * (P1 + 1);
      double acc = 0.0;
      for (int m = (k % 2 == 0) ? 1 : 0; m <= P1; m += 2) acc += prow[m] * drow[m];
      tmp[static_cast<std::size_t>(i) * m1 + (k - 1)] = acc;
    }
  }
  for (int k = 1; k <= m0; ++k) {
    const double* prow = px->entries.data() + static_cast<std::size_t>(k - 1) * (P0 + 1);
    for (int j = 0; j < m1; ++j) {
      double acc = 0.0;
      for (int m = (k % 2 == 0) ? 1 : 0; m <= P0; m += 2) acc += prow[m] * tmp[static_cast<std::size_t>(m) * m1 + j];
      u[static_cast<std::size_t>(k - 1) * m1 + j] = acc;
    }
  }
  return u;
}

}  // namespace detail
}  // namespace swh
