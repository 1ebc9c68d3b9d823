#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swh/field.hpp"

namespace swh {

enum class ForcingKind { zero, periodic, quasiperiodic };

struct ForcingComponent {
  double amplitude = 0.0;
  double frequency = 0.0;  // rad / time, >= 0; zero means constant in time
  double phase = 0.0;
  SpectralField profile;
};

/// g(t) = sum_i A_i cos(w_i (t + offset) + phase_i) profile_i.
/// The shift flow acts on `phase_offset` only, so theta_tau is exact.
class ForcingModel {
 public:
  ForcingModel() = default;
  ForcingModel(ForcingKind kind, DomainSpec domain, std::vector<ForcingComponent> components,
               double phase_offset = 0.0);

  static ForcingModel zero(const DomainSpec& domain);

  ForcingKind kind() const noexcept { return kind_; }
  const DomainSpec& domain() const noexcept { return domain_; }
  const std::vector<ForcingComponent>& components() const noexcept { return components_; }
  double phase_offset() const noexcept { return phase_offset_; }

  /// Fundamental period of a periodic model; empty for zero, constant and
  /// quasiperiodic models.
  std::optional<double> period() const noexcept { return period_; }

  /// Gram matrix (profile_i, profile_j) in L2(Omega).
  const std::vector<double>& gram() const noexcept { return gram_; }

 private:
  ForcingKind kind_ = ForcingKind::zero;
  DomainSpec domain_{};
  std::vector<ForcingComponent> components_;
  double phase_offset_ = 0.0;
  std::optional<double> period_;
  std::vector<double> gram_;
};

std::string to_string(ForcingKind kind);
ForcingKind forcing_kind_from_string(const std::string& name);

SpectralField evaluate(const ForcingModel& g, double t);
/// ||g(t)|| without forming the field.
double norm_at(const ForcingModel& g, double t);
/// ||g(t + tau) - g(t)||.
double shift_difference_norm(const ForcingModel& g, double t, double tau);

/// theta_tau g = g(. + tau).
ForcingModel shift(const ForcingModel& g, double tau);
/// Same model with every amplitude multiplied by `factor`.
ForcingModel scaled(const ForcingModel& g, double factor);

/// Phase offset of theta_t g; the skew-product coordinate on the hull.
/// Reduced modulo the period for periodic models, 0 for the zero model.
double fingerprint(const ForcingModel& g, double t);

struct SupBound {
  double bound = 0.0;     // sum_i |A_i| ||profile_i||, always >= sup_t ||g(t)||
  bool attained = false;  // the bound is a maximum, not only an upper bound
  std::optional<double> scanned_max;
};

struct SupScan {
  double horizon = 0.0;  // <= 0: one period for periodic models, 1e4 otherwise
  int samples_per_unit = 64;
};

/// M(g) = sup_t ||g(t)||. With a scan, `attained` is decided from the samples.
SupBound sup_bound(const ForcingModel& g, std::optional<SupScan> scan = std::nullopt);

struct BebutovConfig {
  int trunc = 20;
  int samples_per_unit = 16;
  void validate() const;
};

/// Truncated compact-open metric
/// rho = sum_{n <= trunc} 2^-n m_n / (1 + m_n), m_n = max_{|t| <= n} ||g1(t) - g2(t)||,
/// with the max taken over a uniform time grid.
double bebutov_distance(const ForcingModel& g1, const ForcingModel& g2, const BebutovConfig& cfg = {});

struct AlmostPeriodScan {
  std::vector<double> shifts;  // every grid tau in [0, horizon] passing the test
  double max_gap = 0.0;        // largest distance between consecutive shifts (and to horizon)
  std::string note;            // set when nothing beyond tau = 0 was found
};

/// Grid shifts tau with max_{|t| <= window} ||g(t + tau) - g(t)|| < eps.
AlmostPeriodScan almost_period_scan(const ForcingModel& g, double eps, double window, double horizon,
                                    int samples_per_unit = 16);

/// Continued-fraction test on w1/w2: false when a convergent p/q with
/// q <= 1000 reproduces the ratio within 1e-12.
bool rationally_independent(double w1, double w2);

}  // namespace swh
