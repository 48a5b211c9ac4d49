#include "dampwave/damping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dampwave/error.hpp"
#include "dampwave/spectral_grid.hpp"

namespace dampwave {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

void check_bump(const TorusGeometry& geom, const Vec& center, double width, double amplitude) {
  require(finite_nonneg(amplitude), "bump amplitude must be finite and >= 0");
  require(std::isfinite(width) && width > 0.0, "bump width must be positive");
  for (int i = 0; i < geom.dim(); ++i) {
    require(width < 0.5 * geom.period(i), "bump width must be below half the torus period");
    require(std::isfinite(center[static_cast<std::size_t>(i)]), "bump center must be finite");
  }
}

double smooth_step(double s) noexcept {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

TimeStructure combine(const TimeStructure& a, const TimeStructure& b) {
  using K = TimeStructure::Kind;
  if (a.kind == K::stationary) return b;
  if (b.kind == K::stationary) return a;
  if (a.kind == K::aperiodic || b.kind == K::aperiodic) return {K::aperiodic, 0.0};
  // Both periodic: look for a small-integer ratio a.period / b.period = p / q.
  const double ratio = a.period / b.period;
  for (int q = 1; q <= 64; ++q) {
    const double p = std::round(ratio * q);
    if (p >= 1.0 && std::abs(ratio * q - p) <= 1e-9 * p) {
      return {K::periodic, q * a.period};
    }
  }
  return {K::aperiodic, 0.0};
}

TimeStructure translation_structure(const TorusGeometry& geom, const Vec& velocity) {
  TimeStructure out{TimeStructure::Kind::stationary, 0.0};
  for (int i = 0; i < geom.dim(); ++i) {
    const double v = velocity[static_cast<std::size_t>(i)];
    if (v != 0.0) {
      out = combine(out, {TimeStructure::Kind::periodic, geom.period(i) / std::abs(v)});
    }
  }
  return out;
}

double translation_time(const TorusGeometry& geom, const Vec& velocity) {
  double t = 0.0;
  for (int i = 0; i < geom.dim(); ++i) {
    const double v = velocity[static_cast<std::size_t>(i)];
    if (v != 0.0) t = std::max(t, geom.period(i) / std::abs(v));
  }
  return t;
}

}  // namespace

double bump_profile(double r, double width) noexcept {
  const double s = r / width;
  const double s2 = s * s;
  if (!(s2 < 1.0)) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s2));
}

double bump_max_slope() noexcept {
  static const double value = [] {
    // |b'(s)| = b(s) 2s / (1 - s^2)^2 is unimodal on (0, 1).
    const auto slope = [](double s) {
      const double d = 1.0 - s * s;
      return bump_profile(s, 1.0) * 2.0 * s / (d * d);
    };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = 1.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = slope(x1), f2 = slope(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = slope(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = slope(x1);
      }
    }
    return slope(0.5 * (lo + hi));
  }();
  return value;
}

double TimeProfile::operator()(double t) const noexcept {
  const double tau = wrap_coordinate(t, period);
  if (tau >= on_duration) return 0.0;
  if (tau < ramp) return smooth_step(tau / ramp);
  if (tau > on_duration - ramp) return smooth_step((on_duration - tau) / ramp);
  return 1.0;
}

DampingModel DampingModel::constant(const TorusGeometry& geom, double w0) {
  require(finite_nonneg(w0), "constant damping must be finite and >= 0");
  return DampingModel(geom, ConstantDamping{w0});
}

DampingModel DampingModel::static_bump(const TorusGeometry& geom, Vec center, double width,
                                       double amplitude) {
  check_bump(geom, center, width, amplitude);
  if (geom.dim() == 1) center[1] = 0.0;
  return DampingModel(geom, StaticBump{geom.wrap(center), width, amplitude});
}

DampingModel DampingModel::traveling_bump(const TorusGeometry& geom, double center, double width,
                                          double amplitude, double speed) {
  require(geom.dim() == 1, "traveling_bump is defined on the 1-torus; use rotating_bump in 2D");
  require(std::isfinite(speed), "traveling_bump speed must be finite");
  const Vec c{center, 0.0};
  check_bump(geom, c, width, amplitude);
  return DampingModel(geom, TravelingBump{geom.wrap(c), width, amplitude, speed});
}

DampingModel DampingModel::rotating_bump(const TorusGeometry& geom, Vec center, double width,
                                         double amplitude, Vec velocity) {
  require(geom.dim() == 2, "rotating_bump is defined on the 2-torus");
  require(std::isfinite(velocity[0]) && std::isfinite(velocity[1]),
          "rotating_bump velocity must be finite");
  check_bump(geom, center, width, amplitude);
  return DampingModel(geom, RotatingBump2D{geom.wrap(center), width, amplitude, velocity});
}

DampingModel DampingModel::time_modulated(DampingModel base, TimeProfile profile) {
  require(std::isfinite(profile.period) && profile.period > 0.0, "time profile period must be positive");
  require(std::isfinite(profile.ramp) && profile.ramp > 0.0, "time profile ramp must be positive");
  require(profile.on_duration >= 2.0 * profile.ramp && profile.on_duration <= profile.period,
          "time profile needs 2*ramp <= on_duration <= period");
  const TorusGeometry geom = base.geometry();
  return DampingModel(geom, TimeModulated{std::make_shared<const DampingModel>(std::move(base)), profile});
}

DampingModel DampingModel::sum(std::vector<DampingModel> terms) {
  require(!terms.empty(), "damping sum needs at least one term");
  const TorusGeometry geom = terms.front().geometry();
  for (const auto& t : terms) require(t.geometry() == geom, "damping sum terms must share a torus");
  return DampingModel(geom, DampingSum{std::move(terms)});
}

double DampingModel::value(const Vec& x, double t) const noexcept {
  return std::visit(
      overloaded{
          [](const ConstantDamping& m) { return m.w0; },
          [&](const StaticBump& m) {
            return m.amplitude * bump_profile(geom_.distance(m.center, x), m.width);
          },
          [&](const TravelingBump& m) {
            const Vec c{m.center[0] + m.speed * t, 0.0};
            return m.amplitude * bump_profile(geom_.distance(c, x), m.width);
          },
          [&](const RotatingBump2D& m) {
            const Vec c{m.center[0] + m.velocity[0] * t, m.center[1] + m.velocity[1] * t};
            return m.amplitude * bump_profile(geom_.distance(c, x), m.width);
          },
          [&](const TimeModulated& m) {
            const double theta = m.profile(t);
            return theta == 0.0 ? 0.0 : theta * m.base->value(x, t);
          },
          [&](const DampingSum& m) {
            double s = 0.0;
            for (const auto& term : m.terms) s += term.value(x, t);
            return s;
          },
      },
      kind_);
}

TimeStructure DampingModel::time_structure() const {
  using K = TimeStructure::Kind;
  return std::visit(
      overloaded{
          [](const ConstantDamping&) { return TimeStructure{K::stationary, 0.0}; },
          [](const StaticBump&) { return TimeStructure{K::stationary, 0.0}; },
          [&](const TravelingBump& m) { return translation_structure(geom_, Vec{m.speed, 0.0}); },
          [&](const RotatingBump2D& m) { return translation_structure(geom_, m.velocity); },
          [](const TimeModulated& m) {
            return combine(TimeStructure{K::periodic, m.profile.period}, m.base->time_structure());
          },
          [](const DampingSum& m) {
            TimeStructure s{K::stationary, 0.0};
            for (const auto& term : m.terms) s = combine(s, term.time_structure());
            return s;
          },
      },
      kind_);
}

double DampingModel::characteristic_time() const {
  const TimeStructure ts = time_structure();
  if (ts.kind == TimeStructure::Kind::periodic) return ts.period;
  if (ts.kind == TimeStructure::Kind::stationary) return 0.0;
  return std::visit(
      overloaded{
          [](const ConstantDamping&) { return 0.0; },
          [](const StaticBump&) { return 0.0; },
          [&](const TravelingBump& m) { return translation_time(geom_, Vec{m.speed, 0.0}); },
          [&](const RotatingBump2D& m) { return translation_time(geom_, m.velocity); },
          [](const TimeModulated& m) {
            return std::max(m.profile.period, m.base->characteristic_time());
          },
          [](const DampingSum& m) {
            double t = 0.0;
            for (const auto& term : m.terms) t = std::max(t, term.characteristic_time());
            return t;
          },
      },
      kind_);
}

bool DampingModel::is_identically_zero() const noexcept {
  return std::visit(
      overloaded{
          [](const ConstantDamping& m) { return m.w0 == 0.0; },
          [](const StaticBump& m) { return m.amplitude == 0.0; },
          [](const TravelingBump& m) { return m.amplitude == 0.0; },
          [](const RotatingBump2D& m) { return m.amplitude == 0.0; },
          [](const TimeModulated& m) { return m.base->is_identically_zero(); },
          [](const DampingSum& m) {
            return std::all_of(m.terms.begin(), m.terms.end(),
                               [](const DampingModel& t) { return t.is_identically_zero(); });
          },
      },
      kind_);
}

namespace {

SupNorms sampled_sup_norms(const DampingModel& model, std::size_t resolution) {
  const TorusGeometry& geom = model.geometry();
  const double window = model.characteristic_time();
  const std::size_t n_time = window > 0.0 ? resolution : 1;
  const double h = 1e-6 * std::max(1.0, window);

  std::vector<Vec> points;
  const auto coord = [&](std::size_t j, int axis) {
    return geom.period(axis) * static_cast<double>(j) / static_cast<double>(resolution);
  };
  if (geom.dim() == 1) {
    for (std::size_t j = 0; j < resolution; ++j) points.push_back(Vec{coord(j, 0), 0.0});
  } else {
    for (std::size_t j0 = 0; j0 < resolution; ++j0)
      for (std::size_t j1 = 0; j1 < resolution; ++j1)
        points.push_back(Vec{coord(j0, 0), coord(j1, 1)});
  }

  SupNorms out;
  for (std::size_t m = 0; m < n_time; ++m) {
    const double t = window * static_cast<double>(m) / static_cast<double>(n_time);
    for (const Vec& x : points) {
      out.sup_w = std::max(out.sup_w, model.value(x, t));
      if (window > 0.0) {
        const double d = (model.value(x, t + h) - model.value(x, t - h)) / (2.0 * h);
        out.sup_dt_w = std::max(out.sup_dt_w, std::abs(d));
      }
    }
  }
  out.exact = false;
  return out;
}

}  // namespace

SupNorms damping_sup_norms(const DampingModel& model, std::size_t resolution) {
  if (resolution < 64) {
    throw InvalidArgument("damping_sup_norms: resolution must be at least 64 samples per axis");
  }
  return std::visit(
      overloaded{
          [](const ConstantDamping& m) { return SupNorms{m.w0, 0.0, true}; },
          [](const StaticBump& m) { return SupNorms{m.amplitude, 0.0, true}; },
          [](const TravelingBump& m) {
            return SupNorms{m.amplitude, m.amplitude * std::abs(m.speed) * bump_max_slope() / m.width, true};
          },
          [](const RotatingBump2D& m) {
            const double speed = std::hypot(m.velocity[0], m.velocity[1]);
            return SupNorms{m.amplitude, m.amplitude * speed * bump_max_slope() / m.width, true};
          },
          [&](const TimeModulated&) { return sampled_sup_norms(model, resolution); },
          [&](const DampingSum&) { return sampled_sup_norms(model, resolution); },
      },
      model.kind());
}

void damping_grid_sample(const DampingModel& model, const SpectralGrid& grid, double t,
                         std::span<double> out) {
  if (!(grid.geometry() == model.geometry())) {
    throw InvalidArgument("damping_grid_sample: grid and model live on different tori");
  }
  if (out.size() != grid.size()) throw InvalidArgument("damping_grid_sample: output size mismatch");
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = model.value(grid.node(j), t);
}

std::vector<double> damping_grid_sample(const DampingModel& model, const SpectralGrid& grid,
                                        double t) {
  std::vector<double> out(grid.size());
  damping_grid_sample(model, grid, t, out);
  return out;
}

}  // namespace dampwave
