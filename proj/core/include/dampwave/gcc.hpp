#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dampwave/damping.hpp"
#include "dampwave/geometry.hpp"

namespace dampwave {

/// Time-averaged damping seen along one geodesic,
///   (1/T) \int_0^T W(phi_t(p), alpha + t) dt,
/// by composite Simpson with the largest even panel count whose step does
/// not exceed dt_quad. Clamped to >= 0.
///
/// Throws InvalidArgument unless T > 0, dt_quad > 0 and dt_quad <= T/8.
double ray_average(const DampingModel& model, const TorusGeometry& geom, const PhasePoint& p,
                   double alpha, double T, double dt_quad);

/// The ray (and time offset) attaining a minimum in a scan.
struct RayWitness {
  std::size_t sample_index = 0;
  std::size_t alpha_index = 0;
  PhasePoint point;
  double alpha = 0.0;
  double average = 0.0;
};

struct GccReport {
  std::vector<double> T_values;
  std::vector<double> alpha_values;
  std::vector<double> min_average;  // one per T
  std::vector<RayWitness> argmin;   // one per T
  double requested_T0 = 0.0;
  double estimated_C = 0.0;  // min of min_average over T >= requested_T0
  std::size_t estimated_C_index = 0;
  std::size_t n_samples = 0;
  double dt_quad = 0.0;

  /// Rays with averages below this count as never meeting the damping.
  static constexpr double kViolationThreshold = 1e-6;
  bool violated() const noexcept { return estimated_C < kViolationThreshold; }
  const RayWitness& witness() const { return argmin.at(estimated_C_index); }
};

struct GccScanOptions {
  double dt_quad = 0.0;
  /// Horizons at or above this define estimated_C; defaults to the largest T.
  std::optional<double> requested_T0;
  /// Worker threads; results are identical for any value.
  unsigned threads = 1;
};

/// Minimizes ray_average over samples x alpha_values for each T.
///
/// Ties resolve to the lowest (sample index, alpha index) pair, so the
/// report does not depend on evaluation order or thread count. T_values must
/// be nonempty and strictly increasing.
GccReport gcc_scan(const DampingModel& model, const TorusGeometry& geom,
                   const std::vector<PhasePoint>& samples, const std::vector<double>& alpha_values,
                   const std::vector<double>& T_values, const GccScanOptions& options);

/// Smallest scanned T such that min_average(T') >= target_C for every
/// scanned T' >= T; nullopt when no such T exists.
std::optional<double> estimate_T0(const GccReport& report, double target_C);

/// Offsets for a scan: `count` equispaced values over one model period when
/// the model is time-periodic, over `window` when aperiodic, and {0} when
/// stationary.
std::vector<double> default_alpha_values(const DampingModel& model, std::size_t count,
                                         std::optional<double> window);

}  // namespace dampwave
