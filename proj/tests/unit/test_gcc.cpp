#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dampwave/error.hpp"
#include "dampwave/gcc.hpp"
#include "oracles.hpp"

using namespace dampwave;
using std::numbers::pi;

namespace {

const TorusGeometry kCircle = TorusGeometry::standard(1);
// Spatial mean (A / L) \int b of the A = 2, w = 1 bump.
const double kMean = 2.0 * oracle::kBumpIntegral / (2.0 * pi);

}  // namespace

TEST_CASE("bump integral oracle") {
  // Freeze check: an independent adaptive Simpson reproduces the scipy value.
  const double I = oracle::adaptive_simpson(oracle::bump, -1.0, 1.0, 1e-13);
  CHECK(I == doctest::Approx(oracle::kBumpIntegral).epsilon(1e-10));
}

TEST_CASE("ray_average examples") {
  const PhasePoint p{{0.0, 0.0}, {1.0, 0.0}};
  const auto c = DampingModel::constant(kCircle, 0.3);
  CHECK(ray_average(c, kCircle, p, 1.7, 10.0, 0.01) == doctest::Approx(0.3).epsilon(1e-14));

  // Co-moving ray starting opposite the bump sees zero for ever.
  const auto comoving = DampingModel::traveling_bump(kCircle, pi, 1.0, 2.0, 1.0);
  for (double T : {5.0, 50.0, 400.0}) CHECK(ray_average(comoving, kCircle, p, 0.0, T, 0.05) == 0.0);

  // Long-time average of a periodic traversal approaches the spatial mean.
  const auto tb = DampingModel::traveling_bump(kCircle, 0.0, 1.0, 2.0, 0.5);
  const double avg = ray_average(tb, kCircle, p, 0.0, 400.0, 0.01);
  CHECK(std::abs(avg - kMean) <= 0.02 * kMean);
}

TEST_CASE("ray_average agrees with adaptive quadrature along the ray") {
  const auto tb = DampingModel::traveling_bump(kCircle, 0.0, 1.0, 2.0, 0.5);
  const PhasePoint p{{1.0, 0.0}, {-1.0, 0.0}};
  const double alpha = 0.7, T = 20.0;
  const auto along = [&](double t) {
    // Independent path: relative coordinate of the ray in the bump frame.
    const double rel = 1.0 - t - 0.5 * (alpha + t);
    const double r = std::remainder(rel, 2.0 * pi);
    return 2.0 * oracle::bump(r);
  };
  const double ref = oracle::adaptive_simpson(along, 0.0, T, 1e-12) / T;
  CHECK(ray_average(tb, kCircle, p, alpha, T, 0.005) == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("ray_average preconditions") {
  const auto c = DampingModel::constant(kCircle, 0.3);
  const PhasePoint p{{0.0, 0.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(ray_average(c, kCircle, p, 0.0, 0.0, 0.01), InvalidArgument);
  CHECK_THROWS_AS(ray_average(c, kCircle, p, 0.0, -1.0, 0.01), InvalidArgument);
  CHECK_THROWS_AS(ray_average(c, kCircle, p, 0.0, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(ray_average(c, kCircle, p, 0.0, 1.0, 0.2), InvalidArgument);
}

TEST_CASE("average bounds and offset periodicity (property)") {
  const auto tb = DampingModel::traveling_bump(kCircle, 0.3, 1.0, 2.0, 0.5);
  const auto samples = sample_phase_space(kCircle, 16, 2);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ua(0.0, 20.0), uT(2.0, 40.0);
  for (int i = 0; i < 200; ++i) {
    const auto& p = samples[static_cast<std::size_t>(i) % samples.size()];
    const double a = ua(rng), T = uT(rng);
    const double avg = ray_average(tb, kCircle, p, a, T, 0.01);
    CHECK(avg >= 0.0);
    CHECK(avg <= 2.0 + 1e-12);
    const double shifted = ray_average(tb, kCircle, p, a + 2.0 * pi / 0.5, T, 0.01);
    CHECK(std::abs(avg - shifted) <= 1e-9);
  }
}

TEST_CASE("gcc_scan: constant damping") {
  const auto c = DampingModel::constant(kCircle, 0.3);
  const auto samples = sample_phase_space(kCircle, 8, 2);
  const auto report = gcc_scan(c, kCircle, samples, {0.0}, {1.0, 2.0, 4.0}, {0.05, {}, 1});
  for (double m : report.min_average) CHECK(m == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(report.estimated_C == doctest::Approx(0.3).epsilon(1e-14));
  CHECK_FALSE(report.violated());

  CHECK(estimate_T0(report, 0.2) == 1.0);
  CHECK_FALSE(estimate_T0(report, 0.5).has_value());
  CHECK_THROWS_AS(estimate_T0(report, 0.0), InvalidArgument);
}

TEST_CASE("gcc_scan: co-moving bump violates the condition") {
  const auto tb = DampingModel::traveling_bump(kCircle, 0.0, 1.0, 2.0, 1.0);
  const auto samples = sample_phase_space(kCircle, 8, 2);
  const auto alphas = default_alpha_values(tb, 8, {});
  const std::vector<double> Ts{5.0, 10.0, 50.0, 100.0};
  const auto report = gcc_scan(tb, kCircle, samples, alphas, Ts, {0.05, {}, 1});
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    CHECK(report.min_average[i] < 1e-6);
    const auto& w = report.argmin[i];
    CHECK(ray_average(tb, kCircle, w.point, w.alpha, Ts[i], 0.05) == doctest::Approx(w.average).epsilon(1e-10));
  }
  CHECK(report.violated());
  CHECK(report.witness().average < 1e-6);
}

TEST_CASE("gcc_scan: half-speed bump converges to the spatial mean") {
  const auto tb = DampingModel::traveling_bump(kCircle, 0.0, 1.0, 2.0, 0.5);
  const auto samples = sample_phase_space(kCircle, 16, 2);
  const auto alphas = default_alpha_values(tb, 8, {});
  const std::vector<double> Ts{10.0, 20.0, 50.0, 100.0, 200.0, 400.0};
  const auto report = gcc_scan(tb, kCircle, samples, alphas, Ts, {0.02, {}, 2});
  CHECK(std::abs(report.estimated_C - kMean) <= 0.05 * kMean);

  // Relative spread across rays at T = 400.
  double lo = 1e300, hi = 0.0;
  for (const auto& p : samples) {
    for (double a : alphas) {
      const double v = ray_average(tb, kCircle, p, a, 400.0, 0.02);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  CHECK((hi - lo) / kMean < 0.05);

  // Scan consistency: the argmin ray reproduces the reported minimum.
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    const auto& w = report.argmin[i];
    CHECK(std::abs(ray_average(tb, kCircle, w.point, w.alpha, Ts[i], 0.02) - report.min_average[i]) <= 1e-10);
  }

  // Monotone stabilization along a doubling sequence. Relative periods are
  // 4 pi and 4 pi / 3; keeping T fixed modulo both keeps the partial-period
  // remainder fixed, so only the 1/T factor changes.
  std::vector<double> dbl;
  for (int k = 1; k <= 5; ++k) dbl.push_back(4.0 * std::numbers::pi * (1 << k) + 1.0);
  const auto r2 = gcc_scan(tb, kCircle, samples, alphas, dbl, {0.02, {}, 1});
  for (std::size_t i = 2; i < dbl.size(); ++i) {
    CHECK(std::abs(r2.min_average[i] - r2.min_average[i - 1]) <=
          std::abs(r2.min_average[i - 1] - r2.min_average[i - 2]) + 1e-12);
  }
}

TEST_CASE("gcc_scan is independent of thread count") {
  const auto tb = DampingModel::traveling_bump(kCircle, 0.0, 1.0, 2.0, 0.5);
  const auto samples = sample_phase_space(kCircle, 16, 2);
  const auto alphas = default_alpha_values(tb, 6, {});
  const std::vector<double> Ts{5.0, 10.0, 20.0};
  const auto a = gcc_scan(tb, kCircle, samples, alphas, Ts, {0.02, {}, 1});
  const auto b = gcc_scan(tb, kCircle, samples, alphas, Ts, {0.02, {}, 3});
  CHECK(a.min_average == b.min_average);
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    CHECK(a.argmin[i].sample_index == b.argmin[i].sample_index);
    CHECK(a.argmin[i].alpha_index == b.argmin[i].alpha_index);
  }
}

TEST_CASE("estimate_T0 under refinement of the half-speed scan") {
  const auto tb = DampingModel::traveling_bump(kCircle, 0.0, 1.0, 2.0, 0.5);
  std::vector<double> Ts;
  for (int i = 1; i <= 40; ++i) Ts.push_back(1.0 * i);
  const double target = 0.5 * kMean;
  const auto coarse = gcc_scan(tb, kCircle, sample_phase_space(kCircle, 16, 2),
                               default_alpha_values(tb, 8, {}), Ts, {0.02, {}, 1});
  const auto fine = gcc_scan(tb, kCircle, sample_phase_space(kCircle, 32, 2),
                             default_alpha_values(tb, 16, {}), Ts, {0.02, {}, 1});
  const auto t0c = estimate_T0(coarse, target);
  const auto t0f = estimate_T0(fine, target);
  REQUIRE(t0c.has_value());
  REQUIRE(t0f.has_value());
  CHECK(std::abs(*t0c - *t0f) <= 1.0 + 1e-12);
}

TEST_CASE("gcc_scan input validation") {
  const auto c = DampingModel::constant(kCircle, 0.3);
  const auto samples = sample_phase_space(kCircle, 4, 2);
  CHECK_THROWS_AS(gcc_scan(c, kCircle, {}, {0.0}, {1.0}, {0.05, {}, 1}), InvalidArgument);
  CHECK_THROWS_AS(gcc_scan(c, kCircle, samples, {0.0}, {2.0, 1.0}, {0.05, {}, 1}), InvalidArgument);
  CHECK_THROWS_AS(gcc_scan(c, kCircle, samples, {0.0}, {0.1}, {0.05, {}, 1}), InvalidArgument);
  CHECK_THROWS_AS(gcc_scan(c, kCircle, samples, {0.0}, {1.0}, {0.05, 5.0, 1}), InvalidArgument);
}
