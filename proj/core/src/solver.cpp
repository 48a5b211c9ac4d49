#include "dampwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dampwave/analysis.hpp"
#include "dampwave/error.hpp"

namespace dampwave {

namespace {

void require_state(const WaveState& s) {
  if (!s.grid) throw InvalidArgument("wave state has no grid");
  if (s.uhat.size() != s.grid->size() || s.vhat.size() != s.grid->size()) {
    throw InvalidArgument("wave state size does not match its grid");
  }
}

WaveState empty_state(std::shared_ptr<const SpectralGrid> grid) {
  WaveState s;
  s.uhat.assign(grid->size(), Complex{});
  s.vhat.assign(grid->size(), Complex{});
  s.grid = std::move(grid);
  return s;
}

double unit_phase(std::mt19937_64& rng) {
  // 53 random mantissa bits; portable across standard libraries.
  return TorusGeometry::kTwoPi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

WaveState init_single_mode(std::shared_ptr<const SpectralGrid> grid, const SingleMode& m) {
  const int half = static_cast<int>(grid->n()) / 2;
  for (int a = 0; a < grid->dim(); ++a) {
    if (std::abs(m.k[static_cast<std::size_t>(a)]) >= half) {
      throw ResolutionError("k", "single mode wavenumber must satisfy |k| < n/2");
    }
  }
  if (grid->dim() == 1 && m.k[1] != 0) throw InvalidArgument("single mode k has two components on the circle");
  if (!std::isfinite(m.amplitude) || !std::isfinite(m.phase) || !std::isfinite(m.velocity_amplitude)) {
    throw InvalidArgument("single mode parameters must be finite");
  }
  if (m.amplitude == 0.0 && m.velocity_amplitude == 0.0) {
    throw InvalidArgument("single mode data is identically zero");
  }

  WaveState s = empty_state(grid);
  const std::size_t ip = grid->index_of(m.k);
  const std::size_t im = grid->index_of({-m.k[0], -m.k[1]});
  const Complex e = std::polar(1.0, m.phase);
  if (ip == im) {
    // k = 0: a constant field a cos(phase).
    s.uhat[ip] = m.amplitude * e.real();
    s.vhat[ip] = m.velocity_amplitude * e.real();
  } else {
    s.uhat[ip] = 0.5 * m.amplitude * e;
    s.uhat[im] = 0.5 * m.amplitude * std::conj(e);
    s.vhat[ip] = 0.5 * m.velocity_amplitude * e;
    s.vhat[im] = 0.5 * m.velocity_amplitude * std::conj(e);
  }
  return s;
}

WaveState init_random_sobolev(std::shared_ptr<const SpectralGrid> grid, const RandomSobolev& r) {
  if (!std::isfinite(r.decay)) throw InvalidArgument("random data decay exponent must be finite");
  WaveState s = empty_state(grid);
  std::mt19937_64 rng(r.seed);
  const int nyquist = -static_cast<int>(grid->n()) / 2;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const std::size_t j = grid->mirror(i);
    if (j <= i) continue;  // canonical half only; self-mirrored modes stay zero
    const auto k = grid->wavenumber(i);
    if (k[0] == nyquist || k[1] == nyquist) continue;
    const double mag = std::pow(1.0 + std::hypot(k[0], k[1]), -r.decay);
    s.uhat[i] = std::polar(mag, unit_phase(rng));
    s.vhat[i] = std::polar(mag, unit_phase(rng));
    s.uhat[j] = std::conj(s.uhat[i]);
    s.vhat[j] = std::conj(s.vhat[i]);
  }
  const double e = energy_of_state(s);
  if (!(e > 0.0) || !std::isfinite(e)) throw ResolutionError("decay", "random data has no resolved energy");
  const double scale = 1.0 / std::sqrt(e);
  for (auto& c : s.uhat) c *= scale;
  for (auto& c : s.vhat) c *= scale;
  return s;
}

WaveState init_packet(std::shared_ptr<const SpectralGrid> grid, const TravelingPacket& p) {
  const TorusGeometry& geom = grid->geometry();
  if (!std::isfinite(p.width) || !(p.width > 0.0)) throw InvalidArgument("packet width must be positive");
  for (int a = 0; a < geom.dim(); ++a) {
    const double cell = geom.period(a) / static_cast<double>(grid->n());
    if (p.width < 4.0 * cell) {
      throw ResolutionError("width", "packet width must span at least 4 grid cells");
    }
    if (p.width >= 0.5 * geom.period(a)) throw InvalidArgument("packet width must be below half the period");
  }
  Vec dir = p.direction;
  if (geom.dim() == 1) dir[1] = 0.0;
  if (std::abs(std::hypot(dir[0], dir[1]) - 1.0) > 1e-12) {
    throw InvalidArgument("packet direction must be a unit vector");
  }

  // u1 = -dir . grad b(|x - c|) evaluated at the nodes, so it vanishes
  // exactly wherever u0 does.
  const std::size_t N = grid->size();
  std::vector<Complex> u0(N), u1(N);
  const double w2 = p.width * p.width;
  for (std::size_t j = 0; j < N; ++j) {
    const Vec off = geom.centered_offset(p.center, grid->node(j));
    const double r2 = off[0] * off[0] + off[1] * off[1];
    if (r2 >= w2) continue;
    const double b = bump_profile(std::sqrt(r2), p.width);
    const double q = 1.0 - r2 / w2;
    u0[j] = b;
    u1[j] = b * 2.0 / (w2 * q * q) * (dir[0] * off[0] + dir[1] * off[1]);
  }
  WaveState s = empty_state(grid);
  grid->forward(u0, s.uhat);
  grid->forward(u1, s.vhat);
  return s;
}

// Per mode: rotation of (omega uhat, vhat) by omega dt; the mean mode drifts.
void propagate_free(WaveState& s, double dt) {
  const auto omegas = s.grid->omegas();
  for (std::size_t i = 0; i < s.uhat.size(); ++i) {
    const double w = omegas[i];
    const Complex u = s.uhat[i];
    const Complex v = s.vhat[i];
    if (w == 0.0) {
      s.uhat[i] = u + dt * v;
    } else {
      const double c = std::cos(w * dt);
      const double sn = std::sin(w * dt);
      s.uhat[i] = u * c + v * (sn / w);
      s.vhat[i] = -w * sn * u + v * c;
    }
  }
  s.t += dt;
}

bool all_finite(const WaveState& s) {
  const auto finite = [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
  return std::all_of(s.uhat.begin(), s.uhat.end(), finite) &&
         std::all_of(s.vhat.begin(), s.vhat.end(), finite);
}

}  // namespace

WaveState init_state(std::shared_ptr<const SpectralGrid> grid, const InitialData& data) {
  if (!grid) throw InvalidArgument("init_state: null grid");
  return std::visit(
      [&](const auto& d) -> WaveState {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SingleMode>) return init_single_mode(grid, d);
        else if constexpr (std::is_same_v<T, RandomSobolev>) return init_random_sobolev(grid, d);
        else return init_packet(grid, d);
      },
      data);
}

WaveState project_mean_zero(WaveState state) {
  require_state(state);
  state.uhat[0] = Complex{};
  return state;
}

SplitStepper::SplitStepper(std::shared_ptr<const SpectralGrid> grid, const DampingModel& model)
    : grid_(std::move(grid)), model_(model) {
  if (!grid_) throw InvalidArgument("SplitStepper: null grid");
  if (!(grid_->geometry() == model.geometry())) {
    throw InvalidArgument("grid and damping model live on different tori");
  }
  if (const auto* c = std::get_if<ConstantDamping>(&model.kind())) {
    constant_ = true;
    constant_w0_ = c->w0;
  }
  nodal_.resize(grid_->size());
  w_.resize(grid_->size());
}

void SplitStepper::wave(WaveState& s, double dt) const { propagate_free(s, dt); }

void SplitStepper::damp(WaveState& s, double dt, double t_sample) {
  if (constant_) {
    const double m = std::exp(-constant_w0_ * dt / 2.0);
    for (auto& c : s.vhat) c *= m;
    return;
  }
  grid_->inverse(s.vhat, nodal_);
  sample_damping(t_sample, w_);
  for (std::size_t j = 0; j < nodal_.size(); ++j) {
    // Dropping the rounding-level imaginary part keeps the field real.
    nodal_[j] = Complex(nodal_[j].real() * std::exp(-w_[j] * dt / 2.0), 0.0);
  }
  grid_->forward(nodal_, s.vhat);
}

void SplitStepper::step(WaveState& s, double dt) {
  const double t0 = s.t;
  damp(s, dt, t0 + 0.25 * dt);
  wave(s, dt);
  damp(s, dt, t0 + 0.75 * dt);
}

void SplitStepper::nodal_velocity(const WaveState& s, std::span<double> out) {
  grid_->inverse(s.vhat, nodal_);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = nodal_[j].real();
}

void SplitStepper::sample_damping(double t, std::span<double> out) const {
  damping_grid_sample(model_, *grid_, t, out);
}

WaveState wave_step(WaveState state, double dt) {
  require_state(state);
  if (!std::isfinite(dt)) throw InvalidArgument("wave_step: dt must be finite");
  propagate_free(state, dt);
  return state;
}

WaveState damping_half_step(WaveState state, const DampingModel& model, double dt, double t_sample) {
  require_state(state);
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw InvalidArgument("damping_half_step: dt must be >= 0");
  SplitStepper stepper(state.grid, model);
  stepper.damp(state, dt, t_sample);
  return state;
}

WaveState strang_step(WaveState state, const DampingModel& model, double dt) {
  require_state(state);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("strang_step: dt must be positive");
  SplitStepper stepper(state.grid, model);
  stepper.step(state, dt);
  return state;
}

SimulationResult simulate(std::shared_ptr<const SpectralGrid> grid, const DampingModel& model,
                          const InitialData& data, double dt, double t_end, std::size_t record_every,
                          const StateObserver& observer) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("simulate: dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("simulate: t_end must be positive");
  if (record_every == 0) throw InvalidArgument("simulate: record_every must be at least 1");

  const double ratio = t_end / dt;
  auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(static_cast<double>(steps) - ratio) > 1e-9 * ratio) {
    steps = static_cast<std::size_t>(std::ceil(ratio));
  }
  if (steps == 0) steps = 1;

  SimulationResult result;
  WaveState state = init_state(grid, data);
  SplitStepper stepper(grid, model);
  std::vector<double> v(grid->size()), w(grid->size());
  const double cell = grid->cell_volume();

  const auto record = [&] {
    stepper.nodal_velocity(state, v);
    stepper.sample_damping(state.t, w);
    double d = 0.0, kinetic = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double v2 = v[j] * v[j];
      kinetic += v2;
      d += w[j] * v2;
    }
    result.trace.append(state.t, energy_of_state(state), cell * d, cell * kinetic,
                        std::abs(state.uhat[0]), poincare_ratio(state));
    if (observer) observer(state);
  };

  record();
  for (std::size_t n = 1; n <= steps; ++n) {
    stepper.step(state, dt);
    state.t = static_cast<double>(n) * dt;
    if (!all_finite(state)) {
      throw IntegrationBlowup(n, "non-finite state at step " + std::to_string(n));
    }
    if (n % record_every == 0 || n == steps) record();
  }
  result.final_state = std::move(state);
  return result;
}

double conjugate_symmetry_defect(const WaveState& state) {
  require_state(state);
  double scale = 0.0, defect = 0.0;
  for (const auto* field : {&state.uhat, &state.vhat}) {
    for (std::size_t i = 0; i < field->size(); ++i) {
      const Complex a = (*field)[i];
      const Complex b = std::conj((*field)[state.grid->mirror(i)]);
      scale = std::max(scale, std::abs(a));
      defect = std::max(defect, std::abs(a - b));
    }
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

namespace {

std::vector<double> nodal_real(const WaveState& state, const std::vector<Complex>& coeffs) {
  require_state(state);
  std::vector<Complex> nodal(coeffs.size());
  state.grid->inverse(coeffs, nodal);
  std::vector<double> out(nodal.size());
  for (std::size_t j = 0; j < nodal.size(); ++j) out[j] = nodal[j].real();
  return out;
}

}  // namespace

std::vector<double> nodal_u(const WaveState& state) { return nodal_real(state, state.uhat); }
std::vector<double> nodal_v(const WaveState& state) { return nodal_real(state, state.vhat); }

}  // namespace dampwave
