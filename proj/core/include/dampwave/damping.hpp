#pragma once

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "dampwave/geometry.hpp"

namespace dampwave {

class SpectralGrid;
class DampingModel;

/// Compactly supported C-infinity bump b(r) = exp(1 - 1/(1 - (r/w)^2)) for
/// |r| < w, else 0. Normalized so b(0) = 1.
double bump_profile(double r, double width) noexcept;

/// max_r |d/dr b(r)| for width 1; the width-w value is this divided by w.
double bump_max_slope() noexcept;

/// Smooth periodic on/off switch theta(t) in [0, 1].
///
/// Within each period, theta rises from 0 to 1 over [0, ramp], holds 1 until
/// on_duration - ramp, falls back to 0 by on_duration and stays off for the
/// rest of the period. Ramps use the smooth step s -> f(s) / (f(s) + f(1-s))
/// with f(s) = exp(-1/s), the same kernel as bump_profile, so theta is C-inf.
struct TimeProfile {
  double period = 0.0;
  double on_duration = 0.0;
  double ramp = 0.0;

  double operator()(double t) const noexcept;
};

struct ConstantDamping {
  double w0 = 0.0;
};

/// W(x) = A b(|x - center|) with periodic distance.
struct StaticBump {
  Vec center{0.0, 0.0};
  double width = 0.0;
  double amplitude = 0.0;
};

/// d = 1 only: W(x, t) = A b((x - center - v t) mod L).
struct TravelingBump {
  Vec center{0.0, 0.0};
  double width = 0.0;
  double amplitude = 0.0;
  double speed = 0.0;
};

/// d = 2 only: a radial bump translating with a constant velocity vector.
struct RotatingBump2D {
  Vec center{0.0, 0.0};
  double width = 0.0;
  double amplitude = 0.0;
  Vec velocity{0.0, 0.0};
};

/// W(x, t) = theta(t) W_base(x, t).
struct TimeModulated {
  std::shared_ptr<const DampingModel> base;
  TimeProfile profile;
};

struct DampingSum {
  std::vector<DampingModel> terms;
};

/// How a model depends on time.
struct TimeStructure {
  enum class Kind { stationary, periodic, aperiodic };
  Kind kind = Kind::stationary;
  double period = 0.0;  // meaningful for periodic only
};

/// Immutable nonnegative damping coefficient W(x, t) on a fixed torus.
/// Construct through the static factories, which validate parameters and
/// throw InvalidArgument on anything outside the model class.
class DampingModel {
 public:
  using Kind = std::variant<ConstantDamping, StaticBump, TravelingBump, RotatingBump2D,
                            TimeModulated, DampingSum>;

  static DampingModel constant(const TorusGeometry& geom, double w0);
  static DampingModel static_bump(const TorusGeometry& geom, Vec center, double width,
                                  double amplitude);
  static DampingModel traveling_bump(const TorusGeometry& geom, double center, double width,
                                     double amplitude, double speed);
  static DampingModel rotating_bump(const TorusGeometry& geom, Vec center, double width,
                                    double amplitude, Vec velocity);
  static DampingModel time_modulated(DampingModel base, TimeProfile profile);
  static DampingModel sum(std::vector<DampingModel> terms);

  const TorusGeometry& geometry() const noexcept { return geom_; }
  const Kind& kind() const noexcept { return kind_; }

  /// W(x, t); x is wrapped into the fundamental domain first.
  double value(const Vec& x, double t) const noexcept;

  TimeStructure time_structure() const;
  /// Time scale over which the model's motion repeats or is sampled: the
  /// period when periodic, the longest component period when aperiodic,
  /// zero when stationary.
  double characteristic_time() const;

  bool is_identically_zero() const noexcept;

 private:
  DampingModel(TorusGeometry geom, Kind kind) : geom_(geom), kind_(std::move(kind)) {}

  TorusGeometry geom_;
  Kind kind_;
};

inline double damping_value(const DampingModel& model, const Vec& x, double t) noexcept {
  return model.value(x, t);
}

struct SupNorms {
  double sup_w = 0.0;
  double sup_dt_w = 0.0;
  bool exact = false;  // closed form rather than a sampled estimate
};

/// sup |W| and sup |dW/dt|. Closed form for constant and single-bump models;
/// other models are sampled on `resolution` points per spatial axis and per
/// characteristic time. Throws InvalidArgument if resolution < 64.
SupNorms damping_sup_norms(const DampingModel& model, std::size_t resolution);

/// W(x_j, t) at every grid node in the grid's flat layout.
std::vector<double> damping_grid_sample(const DampingModel& model, const SpectralGrid& grid,
                                        double t);
void damping_grid_sample(const DampingModel& model, const SpectralGrid& grid, double t,
                         std::span<double> out);

}  // namespace dampwave
