#pragma once

#include <cstddef>
#include <vector>

#include "dampwave/geometry.hpp"
#include "dampwave/solver.hpp"
#include "dampwave/trace.hpp"

namespace dampwave {

// Energy functionals ---------------------------------------------------------

/// E = (prod L_i / 2) sum_k (omega_k^2 |uhat_k|^2 + |vhat_k|^2).
double energy_of_state(const WaveState& state);

/// |grad u| / |u - mean u|, or +inf when the denominator is below 1e-14.
double poincare_ratio(const WaveState& state);

/// Spectral gap of the torus Laplacian, 2 pi / max_i L_i.
double poincare_constant(const TorusGeometry& geom);

// Trace queries ---------------------------------------------------------------
//
// Time arguments must coincide with recorded instants (relative tolerance
// 1e-9); integrals are trapezoidal over recorded samples.

/// Index of the recorded instant t. Throws InterpolationNotAllowed otherwise.
std::size_t trace_index(const EnergyTrace& trace, double t);

/// |E(t2) - E(t1) + \int_{t1}^{t2} D dt|.
double dissipation_residual(const EnergyTrace& trace, double t1, double t2);

struct ContractionFactor {
  double alpha = 0.0;
  double factor = 0.0;  // E(alpha + T) / E(alpha)
};

/// Factors for every recorded alpha whose alpha + T is also recorded.
/// Throws InsufficientData unless T >= 2 * recording interval and the trace
/// spans at least 2T.
std::vector<ContractionFactor> contraction_factors(const EnergyTrace& trace, double T);

struct DecayFit {
  double C = 0.0;  // E(t) ~ C exp(-c t) E(0)
  double c = 0.0;
  double r_squared = 0.0;
};

/// Least-squares line through (t, log E) on the recorded samples in
/// [t_a, t_b]. Needs at least 10 samples with E > 1e-300; throws
/// UnderflowError when the window holds enough samples but the energy has
/// hit the floor, InsufficientData when it is simply too short.
DecayFit fit_decay_rate(const EnergyTrace& trace, double t_a, double t_b);

/// \int |u_t|^2 / \int W |u_t|^2 over [alpha, alpha + T]; +inf when the
/// denominator is below 1e-14 times the numerator.
double observability_ratio(const EnergyTrace& trace, double alpha, double T);

/// Slack in the epsilon-weighted energy inequality on [t1, t2]:
///   \int |u_t|^2 - [eps (t2 - t1 - 2) E(t2) - C_p^2 eps^2 (t2 - t1) E(t1)] / (2 B1).
/// Nonnegative means the inequality holds on this trace. Throws
/// HypothesisViolation when t2 - t1 <= 2.
double energy_inequality_margin(const EnergyTrace& trace, double t1, double t2, double epsilon,
                                double B1, double C_p);

// Constant chain --------------------------------------------------------------

/// B1 = max(3, sup|W|^2).
double b1_from_sup(double sup_w) noexcept;

struct DecayConstants {
  double B1 = 0.0;
  double B2 = 0.0;
  double C_p = 0.0;
  double T = 0.0;
  double epsilon = 0.0;
  double predicted_factor = 0.0;
  bool epsilon_valid = false;
};

/// Window contraction bound
///   (2 B1 B2 + C_p^2 eps^2 T) / (2 B1 B2 + eps (T - 2)),
/// valid for 0 < eps < (T - 2) / (C_p^2 T). Throws HypothesisViolation for
/// T <= 2 and InvalidArgument for B1 < 3, B2 <= 0, C_p <= 0 or eps < 0.
DecayConstants contraction_bound(double B1, double B2, double C_p, double T, double epsilon);

struct EpsilonOptimum {
  double epsilon = 0.0;
  double factor = 1.0;
};

/// Minimizes the contraction bound over the valid epsilon window: a uniform
/// grid of `grid_points` interior points, then golden-section refinement
/// around the best grid point.
EpsilonOptimum optimize_epsilon(double B1, double B2, double C_p, double T,
                                std::size_t grid_points = 200);

}  // namespace dampwave
