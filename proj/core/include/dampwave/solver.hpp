#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "dampwave/damping.hpp"
#include "dampwave/spectral_grid.hpp"
#include "dampwave/trace.hpp"

namespace dampwave {

/// Spectral state of (u, u_t) at time t. Coefficients follow the grid's
/// flat layout and represent real fields (conjugate symmetric).
struct WaveState {
  double t = 0.0;
  std::vector<Complex> uhat;
  std::vector<Complex> vhat;
  std::shared_ptr<const SpectralGrid> grid;
};

/// u0 = a cos(kappa.x + phase), u1 = b cos(kappa.x + phase) with
/// kappa_i = 2 pi k_i / L_i.
struct SingleMode {
  std::array<int, 2> k{1, 0};
  double amplitude = 1.0;
  double phase = 0.0;
  double velocity_amplitude = 0.0;
};

/// Mean-zero random data: every resolved mode k != 0 of u and u_t gets
/// magnitude (1 + |k|)^-decay and an independent pseudorandom phase; the
/// result is scaled to unit energy. Nyquist modes are left at zero.
struct RandomSobolev {
  std::uint64_t seed = 0;
  double decay = 2.0;
};

/// u0(x) = b(|x - center|) with bump width `width`, u1 = -direction . grad u0.
/// On the circle this is a d'Alembert packet moving along `direction`.
struct TravelingPacket {
  Vec center{0.0, 0.0};
  double width = 1.0;
  Vec direction{1.0, 0.0};
};

using InitialData = std::variant<SingleMode, RandomSobolev, TravelingPacket>;

/// Throws ResolutionError (naming "k" or "width") when the grid cannot
/// resolve the data and InvalidArgument for malformed parameters.
WaveState init_state(std::shared_ptr<const SpectralGrid> grid, const InitialData& data);

/// Removes the spatial mean of u; u_t is untouched.
WaveState project_mean_zero(WaveState state);

/// Exact free-wave propagation of every mode over dt (either sign).
WaveState wave_step(WaveState state, double dt);

/// Multiplies u_t pointwise by exp(-W(x, t_sample) dt / 2). Does not advance t.
WaveState damping_half_step(WaveState state, const DampingModel& model, double dt, double t_sample);

/// damping(t + dt/4) o wave(dt) o damping(t + 3dt/4). Requires dt > 0.
WaveState strang_step(WaveState state, const DampingModel& model, double dt);

/// In-place split-step integrator with reusable scratch space. One instance
/// must not be shared between threads.
class SplitStepper {
 public:
  SplitStepper(std::shared_ptr<const SpectralGrid> grid, const DampingModel& model);

  void wave(WaveState& s, double dt) const;
  void damp(WaveState& s, double dt, double t_sample);
  void step(WaveState& s, double dt);

  /// Nodal u_t (real part of the synthesis) and W at time t.
  void nodal_velocity(const WaveState& s, std::span<double> out);
  void sample_damping(double t, std::span<double> out) const;

 private:
  std::shared_ptr<const SpectralGrid> grid_;
  const DampingModel& model_;
  bool constant_ = false;
  double constant_w0_ = 0.0;
  std::vector<Complex> nodal_;
  std::vector<double> w_;
};

struct SimulationResult {
  WaveState final_state;
  EnergyTrace trace;
};

/// Called with each recorded state, in order.
using StateObserver = std::function<void(const WaveState&)>;

/// Integrates from t = 0 with strang_step. The step count is t_end / dt
/// (rounded up unless within 1e-9 relative of an integer); t is set to
/// step * dt exactly. Records at step 0, every record_every steps, and the
/// final step.
///
/// Throws InvalidArgument for bad parameters and IntegrationBlowup when a
/// coefficient becomes non-finite.
SimulationResult simulate(std::shared_ptr<const SpectralGrid> grid, const DampingModel& model,
                          const InitialData& data, double dt, double t_end, std::size_t record_every,
                          const StateObserver& observer = {});

/// max relative deviation from conjugate symmetry over both fields.
double conjugate_symmetry_defect(const WaveState& state);

/// Nodal values of u and u_t (real parts).
std::vector<double> nodal_u(const WaveState& state);
std::vector<double> nodal_v(const WaveState& state);

}  // namespace dampwave
