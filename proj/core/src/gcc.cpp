#include "dampwave/gcc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "dampwave/error.hpp"

namespace dampwave {

double ray_average(const DampingModel& model, const TorusGeometry& geom, const PhasePoint& p,
                   double alpha, double T, double dt_quad) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("ray_average: T must be positive");
  if (!(dt_quad > 0.0)) throw InvalidArgument("ray_average: dt_quad must be positive");
  if (dt_quad > T / 8.0) throw InvalidArgument("ray_average: dt_quad must not exceed T/8");
  if (!std::isfinite(alpha)) throw InvalidArgument("ray_average: alpha must be finite");
  if (!is_valid(geom, p)) throw InvalidArgument("ray_average: invalid phase point");

  auto panels = static_cast<std::size_t>(std::ceil(T / dt_quad - 1e-9));
  if (panels % 2 == 1) ++panels;
  const double h = T / static_cast<double>(panels);

  // The model wraps positions itself, so the unreduced straight line x + t xi
  // is the geodesic.
  const auto w_along = [&](std::size_t i) {
    const double t = h * static_cast<double>(i);
    const Vec x{p.x[0] + t * p.xi[0], p.x[1] + t * p.xi[1]};
    return model.value(x, alpha + t);
  };

  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i < panels; i += 2) odd += w_along(i);
  for (std::size_t i = 2; i < panels; i += 2) even += w_along(i);
  const double integral = h / 3.0 * (w_along(0) + 4.0 * odd + 2.0 * even + w_along(panels));
  return std::max(0.0, integral / T);
}

GccReport gcc_scan(const DampingModel& model, const TorusGeometry& geom,
                   const std::vector<PhasePoint>& samples, const std::vector<double>& alpha_values,
                   const std::vector<double>& T_values, const GccScanOptions& options) {
  if (samples.empty() || alpha_values.empty() || T_values.empty()) {
    throw InvalidArgument("gcc_scan: samples, alpha_values and T_values must be nonempty");
  }
  for (std::size_t i = 1; i < T_values.size(); ++i) {
    if (!(T_values[i] > T_values[i - 1])) {
      throw InvalidArgument("gcc_scan: T_values must be strictly increasing");
    }
  }
  // Surface precondition failures before spawning workers.
  for (double T : T_values) {
    if (!(T > 0.0)) throw InvalidArgument("ray_average: T must be positive");
    if (!(options.dt_quad > 0.0) || options.dt_quad > T / 8.0) {
      throw InvalidArgument("gcc_scan: dt_quad must be positive and at most T/8 for every T");
    }
  }
  for (const PhasePoint& p : samples) {
    if (!is_valid(geom, p)) throw InvalidArgument("gcc_scan: invalid phase point in samples");
  }
  for (double a : alpha_values) {
    if (!std::isfinite(a)) throw InvalidArgument("gcc_scan: alpha values must be finite");
  }

  const std::size_t n_s = samples.size();
  const std::size_t n_a = alpha_values.size();
  const std::size_t per_T = n_s * n_a;
  const std::size_t total = per_T * T_values.size();
  std::vector<double> averages(total);

  const auto evaluate = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t iT = idx / per_T;
      const std::size_t rest = idx % per_T;
      averages[idx] = ray_average(model, geom, samples[rest / n_a], alpha_values[rest % n_a],
                                  T_values[iT], options.dt_quad);
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(total)));
  if (threads == 1) {
    evaluate(0, total);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t begin = std::min(total, w * chunk);
      const std::size_t end = std::min(total, begin + chunk);
      workers.emplace_back(evaluate, begin, end);
    }
  }

  GccReport report;
  report.T_values = T_values;
  report.alpha_values = alpha_values;
  report.n_samples = n_s;
  report.dt_quad = options.dt_quad;
  for (std::size_t iT = 0; iT < T_values.size(); ++iT) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < per_T; ++r) {
      if (averages[iT * per_T + r] < averages[iT * per_T + best]) best = r;
    }
    RayWitness w;
    w.sample_index = best / n_a;
    w.alpha_index = best % n_a;
    w.point = samples[w.sample_index];
    w.alpha = alpha_values[w.alpha_index];
    w.average = averages[iT * per_T + best];
    report.min_average.push_back(w.average);
    report.argmin.push_back(w);
  }

  report.requested_T0 = options.requested_T0.value_or(T_values.back());
  bool any = false;
  for (std::size_t iT = 0; iT < T_values.size(); ++iT) {
    if (T_values[iT] < report.requested_T0) continue;
    if (!any || report.min_average[iT] < report.estimated_C) {
      report.estimated_C = report.min_average[iT];
      report.estimated_C_index = iT;
      any = true;
    }
  }
  if (!any) throw InvalidArgument("gcc_scan: no scanned T reaches requested_T0");
  return report;
}

std::optional<double> estimate_T0(const GccReport& report, double target_C) {
  if (!(target_C > 0.0)) throw InvalidArgument("estimate_T0: target_C must be positive");
  std::optional<double> result;
  for (std::size_t i = report.T_values.size(); i-- > 0;) {
    if (report.min_average[i] < target_C) break;
    result = report.T_values[i];
  }
  return result;
}

std::vector<double> default_alpha_values(const DampingModel& model, std::size_t count,
                                         std::optional<double> window) {
  if (count == 0) throw InvalidArgument("alpha count must be at least 1");
  const TimeStructure ts = model.time_structure();
  double span = 0.0;
  switch (ts.kind) {
    case TimeStructure::Kind::stationary:
      return {0.0};
    case TimeStructure::Kind::periodic:
      span = ts.period;
      break;
    case TimeStructure::Kind::aperiodic:
      if (!window || !(*window > 0.0)) {
        throw InvalidArgument("aperiodic damping needs an explicit alpha window");
      }
      span = *window;
      break;
  }
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = span * static_cast<double>(i) / static_cast<double>(count);
  return out;
}

}  // namespace dampwave
