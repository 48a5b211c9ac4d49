#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "dampwave/analysis.hpp"
#include "dampwave/error.hpp"
#include "dampwave/solver.hpp"

using namespace dampwave;
using std::numbers::pi;

namespace {

const TorusGeometry kCircle = TorusGeometry::standard(1);

// Trace sampled every h on [0, t_end] from closed-form columns.
template <class E, class D, class K>
EnergyTrace synthetic(double h, double t_end, E energy, D diss, K kinetic) {
  EnergyTrace tr;
  const auto n = static_cast<std::size_t>(std::llround(t_end / h));
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * h;
    tr.append(t, energy(t), diss(t), kinetic(t), 0.0, 1.0);
  }
  return tr;
}

}  // namespace

TEST_CASE("energy_of_state examples") {
  auto grid = SpectralGrid::create(kCircle, 16);
  CHECK(energy_of_state(init_state(grid, SingleMode{{1, 0}, 1.0, 0.0, 0.0})) == doctest::Approx(pi / 2));
  CHECK(energy_of_state(init_state(grid, SingleMode{{0, 0}, 0.0, 0.0, 1.0})) == doctest::Approx(pi));

  auto grid2 = SpectralGrid::create(TorusGeometry::standard(2), 16);
  CHECK(energy_of_state(init_state(grid2, SingleMode{{1, 0}, 1.0, 0.0, 0.0})) == doctest::Approx(pi * pi));

  // Energy scales with the torus volume for the same nodal profile.
  auto wide = SpectralGrid::create(TorusGeometry(1, {4 * pi}), 16);
  CHECK(energy_of_state(init_state(wide, SingleMode{{0, 0}, 0.0, 0.0, 1.0})) == doctest::Approx(2 * pi));
}

TEST_CASE("poincare ratio") {
  auto grid = SpectralGrid::create(kCircle, 16);
  CHECK(poincare_ratio(init_state(grid, SingleMode{{3, 0}, 1.0, 0.2, 0.0})) == doctest::Approx(3.0));
  CHECK(std::isinf(poincare_ratio(init_state(grid, SingleMode{{0, 0}, 0.0, 0.0, 1.0}))));
  CHECK(poincare_constant(TorusGeometry(2, {2 * pi, 4 * pi})) == doctest::Approx(0.5));
}

TEST_CASE("trace_index requires recorded instants") {
  const auto tr = synthetic(0.1, 1.0, [](double) { return 1.0; }, [](double) { return 0.0; },
                            [](double) { return 1.0; });
  CHECK(trace_index(tr, 0.3) == 3);
  CHECK(trace_index(tr, 0.3 + 1e-12) == 3);
  CHECK_THROWS_AS(trace_index(tr, 0.35), InterpolationNotAllowed);
  CHECK_THROWS_AS(trace_index(tr, 1.5), InterpolationNotAllowed);
  CHECK_THROWS_AS(dissipation_residual(tr, 0.0, 0.35), InterpolationNotAllowed);
}

TEST_CASE("dissipation residual on simulated traces") {
  auto grid = SpectralGrid::create(kCircle, 32);
  const auto free = simulate(grid, DampingModel::constant(kCircle, 0.0), RandomSobolev{1, 2.0}, 0.01, 5.0, 1);
  CHECK(dissipation_residual(free.trace, 0.0, 5.0) <= 1e-12);

  const auto damped =
      simulate(grid, DampingModel::constant(kCircle, 0.2), SingleMode{{1, 0}, 1.0, 0.0, 0.0}, 1e-3, 5.0, 1);
  CHECK(dissipation_residual(damped.trace, 0.0, 5.0) <= 1e-6 * damped.trace.energy.front());
}

TEST_CASE("dissipation residual on a synthetic trace") {
  // E = e^{-t}, D = e^{-t}: exact balance; trapezoid error is O(h^2).
  const auto tr = synthetic(1e-3, 2.0, [](double t) { return std::exp(-t); },
                            [](double t) { return std::exp(-t); }, [](double) { return 1.0; });
  CHECK(dissipation_residual(tr, 0.0, 2.0) < 1e-7);
  CHECK(dissipation_residual(tr, 0.5, 1.5) < 1e-7);
  CHECK_THROWS_AS(dissipation_residual(tr, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("contraction factors") {
  const auto tr = synthetic(0.5, 20.0, [](double t) { return std::exp(-0.1 * t); },
                            [](double) { return 0.0; }, [](double) { return 1.0; });
  const auto f = contraction_factors(tr, 5.0);
  CHECK(f.size() == 31);
  for (const auto& cf : f) CHECK(cf.factor == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(f.front().alpha == 0.0);
  CHECK(f.back().alpha == doctest::Approx(15.0));

  CHECK_THROWS_AS(contraction_factors(tr, 0.75), InsufficientData);  // T < 2h
  CHECK_THROWS_AS(contraction_factors(tr, 12.0), InsufficientData);  // span < 2T
}

TEST_CASE("contraction factors skip unrecorded alpha + T") {
  const auto tr = synthetic(0.5, 20.0, [](double t) { return std::exp(-0.1 * t); },
                            [](double) { return 0.0; }, [](double) { return 1.0; });
  CHECK_THROWS_AS(contraction_factors(tr, 1.3), InsufficientData);
}

TEST_CASE("fit_decay_rate recovers a synthetic exponential") {
  const auto tr = synthetic(0.1, 30.0, [](double t) { return 5.0 * std::exp(-0.3 * t); },
                            [](double) { return 0.0; }, [](double) { return 1.0; });
  const auto fit = fit_decay_rate(tr, 0.0, 30.0);
  CHECK(fit.c == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(fit.C == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  const auto flat = synthetic(0.1, 3.0, [](double) { return 2.0; }, [](double) { return 0.0; },
                              [](double) { return 1.0; });
  const auto ff = fit_decay_rate(flat, 0.0, 3.0);
  CHECK(std::abs(ff.c) < 1e-14);
  CHECK(ff.r_squared == 1.0);

  CHECK_THROWS_AS(fit_decay_rate(tr, 0.0, 0.5), InsufficientData);
  const auto dead = synthetic(0.1, 3.0, [](double t) { return t < 0.25 ? 1.0 : 0.0; },
                              [](double) { return 0.0; }, [](double) { return 1.0; });
  CHECK_THROWS_AS(fit_decay_rate(dead, 0.0, 3.0), UnderflowError);
  CHECK_THROWS_AS(fit_decay_rate(EnergyTrace{}, 0.0, 1.0), InsufficientData);
}

TEST_CASE("observability ratio") {
  auto grid = SpectralGrid::create(kCircle, 32);
  const auto res =
      simulate(grid, DampingModel::constant(kCircle, 0.25), RandomSobolev{6, 2.0}, 0.01, 4.0, 1);
  CHECK(observability_ratio(res.trace, 0.0, 4.0) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(observability_ratio(res.trace, 1.0, 2.0) == doctest::Approx(4.0).epsilon(1e-10));

  const auto undamped = synthetic(0.1, 2.0, [](double) { return 1.0; }, [](double) { return 0.0; },
                                  [](double) { return 1.0; });
  CHECK(observability_ratio(undamped, 0.0, 2.0) == std::numeric_limits<double>::infinity());

  const auto still = synthetic(0.1, 2.0, [](double) { return 1.0; }, [](double) { return 0.0; },
                               [](double) { return 0.0; });
  CHECK_THROWS_AS(observability_ratio(still, 0.0, 2.0), InsufficientData);
  CHECK_THROWS_AS(observability_ratio(undamped, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("energy inequality margin") {
  // E = 2 constant, |u_t|^2 integral = 0.5 per unit time.
  const auto tr = synthetic(0.5, 10.0, [](double) { return 2.0; }, [](double) { return 0.0; },
                            [](double) { return 0.5; });
  // t2 - t1 = 6, eps = 0.2, B1 = 4, C_p = 1:
  //   3 - [0.2 * 4 * 2 - 0.04 * 6 * 2] / 8 = 3 - (1.6 - 0.48) / 8 = 2.86
  CHECK(energy_inequality_margin(tr, 2.0, 8.0, 0.2, 4.0, 1.0) == doctest::Approx(2.86).epsilon(1e-13));
  CHECK_THROWS_AS(energy_inequality_margin(tr, 2.0, 4.0, 0.2, 4.0, 1.0), HypothesisViolation);
  CHECK_THROWS_AS(energy_inequality_margin(tr, 2.0, 8.0, 0.0, 4.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(energy_inequality_margin(tr, 2.0, 8.0, 0.2, 2.0, 1.0), InvalidArgument);
}

TEST_CASE("b1 and contraction bound") {
  CHECK(b1_from_sup(0.5) == 3.0);
  CHECK(b1_from_sup(2.0) == 4.0);

  const auto hand = contraction_bound(3.0, 5.0, 1.0, 10.0, 0.5);
  CHECK(hand.predicted_factor == 32.5 / 34.0);

  const auto c = contraction_bound(3.0, 5.0, 0.5, 6.0, 1.0);
  CHECK(c.predicted_factor == doctest::Approx(31.5 / 34.0).epsilon(1e-15));
  CHECK(c.epsilon_valid);

  // At eps = 0 and at the window edge the bound is exactly 1.
  CHECK(contraction_bound(3.0, 5.0, 0.5, 6.0, 0.0).predicted_factor == 1.0);
  const double edge = (6.0 - 2.0) / (0.25 * 6.0);
  const auto e = contraction_bound(3.0, 5.0, 0.5, 6.0, edge);
  CHECK(e.predicted_factor == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_FALSE(e.epsilon_valid);
  CHECK_FALSE(contraction_bound(3.0, 5.0, 0.5, 6.0, 0.0).epsilon_valid);

  // Slope at eps = 0 is -(T - 2) / (2 B1 B2).
  const double h = 1e-7;
  const double slope = (contraction_bound(3.0, 5.0, 0.5, 6.0, h).predicted_factor - 1.0) / h;
  CHECK(slope == doctest::Approx(-4.0 / 30.0).epsilon(1e-5));

  CHECK_THROWS_AS(contraction_bound(3.0, 5.0, 0.5, 2.0, 0.1), HypothesisViolation);
  CHECK_THROWS_AS(contraction_bound(2.0, 5.0, 0.5, 6.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(contraction_bound(3.0, 0.0, 0.5, 6.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(contraction_bound(3.0, 5.0, 0.0, 6.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(contraction_bound(3.0, 5.0, 0.5, 6.0, -0.1), InvalidArgument);
}

TEST_CASE("optimize_epsilon matches the analytic minimizer") {
  struct Case {
    double B1, B2, Cp, T;
  };
  for (const Case k : {Case{3.0, 5.0, 0.5, 6.0}, Case{3.0, 1.0, 1.0, 20.0}, Case{4.0, 12.0, 1.0, 50.0},
                       Case{9.0, 0.3, 2.0, 3.0}}) {
    const double a = 2.0 * k.B1 * k.B2, b = k.Cp * k.Cp * k.T, c = k.T - 2.0;
    const double eps = (-a * b + std::sqrt(a * a * b * b + a * b * c * c)) / (b * c);
    const double best = (a + b * eps * eps) / (a + c * eps);
    const auto opt = optimize_epsilon(k.B1, k.B2, k.Cp, k.T);
    CAPTURE(k.T);
    CHECK(opt.factor == doctest::Approx(best).epsilon(1e-12));
    CHECK(opt.epsilon == doctest::Approx(eps).epsilon(1e-5));
    CHECK(opt.factor < 1.0);

    const auto fine = optimize_epsilon(k.B1, k.B2, k.Cp, k.T, 2000);
    CHECK(std::abs(fine.factor - opt.factor) <= 1e-4 * opt.factor);
  }
  const auto sample = optimize_epsilon(3.0, 5.0, 1.0, 10.0);
  CHECK(sample.factor <= 32.5 / 34.0);
  CHECK(sample.factor <= 0.9559);
  double prev = 0.0;
  for (double B2 : {1.0, 10.0, 100.0, 1e4, 1e6}) {
    const double f = optimize_epsilon(3.0, B2, 1.0, 10.0).factor;
    CHECK(f > prev);
    prev = f;
  }
  CHECK(prev > 0.9999);

  CHECK_THROWS_AS(optimize_epsilon(3.0, 5.0, 0.5, 2.0), HypothesisViolation);
  CHECK_THROWS_AS(optimize_epsilon(3.0, 5.0, 0.5, 6.0, 2), InvalidArgument);
}
