#include "dampwave/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dampwave/error.hpp"

namespace dampwave {

double energy_of_state(const WaveState& state) {
  if (!state.grid) throw InvalidArgument("energy_of_state: state has no grid");
  const auto omegas = state.grid->omegas();
  double sum = 0.0;
  for (std::size_t i = 0; i < state.uhat.size(); ++i) {
    const double w = omegas[i];
    sum += w * w * std::norm(state.uhat[i]) + std::norm(state.vhat[i]);
  }
  return 0.5 * state.grid->geometry().volume() * sum;
}

double poincare_ratio(const WaveState& state) {
  if (!state.grid) throw InvalidArgument("poincare_ratio: state has no grid");
  const auto omegas = state.grid->omegas();
  double grad = 0.0, fluct = 0.0;
  for (std::size_t i = 1; i < state.uhat.size(); ++i) {
    const double a = std::norm(state.uhat[i]);
    grad += omegas[i] * omegas[i] * a;
    fluct += a;
  }
  // Ratios of norms; the common volume factor cancels.
  if (std::sqrt(fluct) < 1e-14) return std::numeric_limits<double>::infinity();
  return std::sqrt(grad / fluct);
}

double poincare_constant(const TorusGeometry& geom) {
  return TorusGeometry::kTwoPi / geom.max_period();
}

std::size_t trace_index(const EnergyTrace& trace, double t) {
  const auto& ts = trace.times;
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  auto it = std::lower_bound(ts.begin(), ts.end(), t - tol);
  if (it != ts.end() && std::abs(*it - t) <= tol) return static_cast<std::size_t>(it - ts.begin());
  throw InterpolationNotAllowed("time " + std::to_string(t) + " is not a recorded instant");
}

namespace {

double trapezoid(const std::vector<double>& times, const std::vector<double>& f, std::size_t i0,
                 std::size_t i1) {
  double s = 0.0;
  for (std::size_t i = i0; i < i1; ++i) s += 0.5 * (times[i + 1] - times[i]) * (f[i] + f[i + 1]);
  return s;
}

struct Span {
  std::size_t begin;
  std::size_t end;
};

Span window(const EnergyTrace& trace, double t1, double t2) {
  if (!(t1 < t2)) throw InvalidArgument("time window needs t1 < t2");
  return {trace_index(trace, t1), trace_index(trace, t2)};
}

double recording_interval(const EnergyTrace& trace) {
  if (trace.size() < 2) throw InsufficientData("trace has fewer than two samples");
  return trace.times[1] - trace.times[0];
}

}  // namespace

double dissipation_residual(const EnergyTrace& trace, double t1, double t2) {
  const Span w = window(trace, t1, t2);
  const double lost = trapezoid(trace.times, trace.dissipation, w.begin, w.end);
  return std::abs(trace.energy[w.end] - trace.energy[w.begin] + lost);
}

std::vector<ContractionFactor> contraction_factors(const EnergyTrace& trace, double T) {
  const double h = recording_interval(trace);
  if (!(T >= 2.0 * h * (1.0 - 1e-9))) {
    throw InsufficientData("contraction window must cover at least two recording intervals");
  }
  if (trace.times.back() - trace.times.front() < 2.0 * T * (1.0 - 1e-12)) {
    throw InsufficientData("trace must span at least twice the contraction window");
  }
  std::vector<ContractionFactor> out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double alpha = trace.times[i];
    if (alpha + T > trace.times.back() * (1.0 + 1e-12) + 1e-12) break;
    std::size_t j = 0;
    try {
      j = trace_index(trace, alpha + T);
    } catch (const InterpolationNotAllowed&) {
      continue;
    }
    if (!(trace.energy[i] > 0.0)) continue;
    out.push_back({alpha, trace.energy[j] / trace.energy[i]});
  }
  if (out.empty()) throw InsufficientData("no recorded alpha with alpha + T recorded");
  return out;
}

DecayFit fit_decay_rate(const EnergyTrace& trace, double t_a, double t_b) {
  if (trace.empty()) throw InsufficientData("empty trace");
  const double tol_a = 1e-9 * std::max(1.0, std::abs(t_a));
  const double tol_b = 1e-9 * std::max(1.0, std::abs(t_b));
  std::vector<double> xs, ys;
  std::size_t in_window = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double t = trace.times[i];
    if (t < t_a - tol_a || t > t_b + tol_b) continue;
    ++in_window;
    if (trace.energy[i] > 1e-300) {
      xs.push_back(t);
      ys.push_back(std::log(trace.energy[i]));
    }
  }
  if (xs.size() < 10) {
    if (in_window >= 10) {
      throw UnderflowError("energy reached the floating-point floor in the fit window; use a shorter window");
    }
    throw InsufficientData("fit window holds fewer than 10 samples");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss_res += r * r;
  }
  double r2 = 1.0;
  // A flat series leaves only rounding in syy.
  if (syy > 1e-24 * n * (1.0 + my * my)) r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);

  DecayFit fit;
  fit.c = -slope;
  fit.C = std::exp(intercept) / trace.energy.front();
  fit.r_squared = r2;
  return fit;
}

double observability_ratio(const EnergyTrace& trace, double alpha, double T) {
  if (!(T > 0.0)) throw InvalidArgument("observability window must be positive");
  if (trace.size() < 2) throw InsufficientData("trace has fewer than two samples");
  const Span w = window(trace, alpha, alpha + T);
  if (w.end - w.begin < 1) throw InsufficientData("observability window holds fewer than two samples");
  const double num = trapezoid(trace.times, trace.ut_sq, w.begin, w.end);
  const double den = trapezoid(trace.times, trace.dissipation, w.begin, w.end);
  if (!(num > 0.0)) throw InsufficientData("no kinetic energy in the observability window");
  if (den < 1e-14 * num) return std::numeric_limits<double>::infinity();
  return num / den;
}

double energy_inequality_margin(const EnergyTrace& trace, double t1, double t2, double epsilon,
                                double B1, double C_p) {
  if (!(t2 - t1 > 2.0)) throw HypothesisViolation("energy inequality needs t2 - t1 > 2");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(B1 >= 3.0)) throw InvalidArgument("B1 must be at least 3");
  if (!(C_p > 0.0)) throw InvalidArgument("C_p must be positive");
  const Span w = window(trace, t1, t2);
  const double len = t2 - t1;
  const double kinetic = trapezoid(trace.times, trace.ut_sq, w.begin, w.end);
  const double lhs = (epsilon * (len - 2.0) * trace.energy[w.end] -
                      C_p * C_p * epsilon * epsilon * len * trace.energy[w.begin]) /
                     (2.0 * B1);
  return kinetic - lhs;
}

double b1_from_sup(double sup_w) noexcept { return std::max(3.0, sup_w * sup_w); }

DecayConstants contraction_bound(double B1, double B2, double C_p, double T, double epsilon) {
  if (!(T > 2.0)) throw HypothesisViolation("contraction bound needs T > 2");
  if (!(B1 >= 3.0)) throw InvalidArgument("B1 must be at least 3");
  if (!(B2 > 0.0) || !std::isfinite(B2)) throw InvalidArgument("B2 must be positive and finite");
  if (!(C_p > 0.0)) throw InvalidArgument("C_p must be positive");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be >= 0");

  DecayConstants out{B1, B2, C_p, T, epsilon, 1.0, false};
  const double base = 2.0 * B1 * B2;
  out.predicted_factor = (base + C_p * C_p * epsilon * epsilon * T) / (base + epsilon * (T - 2.0));
  out.epsilon_valid = epsilon > 0.0 && epsilon < (T - 2.0) / (C_p * C_p * T);
  return out;
}

EpsilonOptimum optimize_epsilon(double B1, double B2, double C_p, double T, std::size_t grid_points) {
  if (grid_points < 3) throw InvalidArgument("optimize_epsilon needs at least 3 grid points");
  const double upper = (T - 2.0) / (C_p * C_p * T);
  const auto factor = [&](double eps) {
    return contraction_bound(B1, B2, C_p, T, eps).predicted_factor;
  };
  // Validates the remaining inputs.
  (void)contraction_bound(B1, B2, C_p, T, 0.0);

  const double step = upper / static_cast<double>(grid_points + 1);
  std::size_t best = 1;
  double best_f = factor(step);
  for (std::size_t i = 2; i <= grid_points; ++i) {
    const double f = factor(step * static_cast<double>(i));
    if (f < best_f) {
      best_f = f;
      best = i;
    }
  }

  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = step * static_cast<double>(best - 1);
  double hi = step * static_cast<double>(best + 1);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = factor(x1), f2 = factor(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * upper; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = factor(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = factor(x2);
    }
  }
  EpsilonOptimum out{0.5 * (lo + hi), 0.0};
  out.factor = factor(out.epsilon);
  if (best_f < out.factor) out = {step * static_cast<double>(best), best_f};
  return out;
}

}  // namespace dampwave
