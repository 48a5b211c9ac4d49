#pragma once

#include <cstddef>
#include <vector>

namespace dampwave {

/// Time series recorded by simulate(). All columns have the same length and
/// times are strictly increasing.
struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energy;          // E(t)
  std::vector<double> dissipation;     // D(t) = \int W |u_t|^2
  std::vector<double> ut_sq;           // \int |u_t|^2
  std::vector<double> mean_abs;        // |uhat(0)|
  std::vector<double> poincare_ratio;  // |grad u| / |u - mean u|, +inf when undefined

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }

  void append(double t, double e, double d, double kinetic, double mean, double poincare) {
    times.push_back(t);
    energy.push_back(e);
    dissipation.push_back(d);
    ut_sq.push_back(kinetic);
    mean_abs.push_back(mean);
    poincare_ratio.push_back(poincare);
  }
};

}  // namespace dampwave
