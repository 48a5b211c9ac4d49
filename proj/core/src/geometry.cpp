#include "dampwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dampwave/error.hpp"

namespace dampwave {

TorusGeometry::TorusGeometry(int dim, const std::vector<double>& periods) : dim_(dim) {
  if (dim != 1 && dim != 2) {
    throw InvalidArgument("torus dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (periods.size() != static_cast<std::size_t>(dim)) {
    throw InvalidArgument("expected " + std::to_string(dim) + " periods, got " +
                          std::to_string(periods.size()));
  }
  for (int i = 0; i < dim; ++i) {
    const double L = periods[static_cast<std::size_t>(i)];
    if (!(L > 0.0) || !std::isfinite(L)) {
      throw InvalidArgument("torus periods must be positive and finite");
    }
    periods_[static_cast<std::size_t>(i)] = L;
  }
}

TorusGeometry TorusGeometry::standard(int dim) {
  return TorusGeometry(dim, std::vector<double>(static_cast<std::size_t>(std::max(dim, 0)), kTwoPi));
}

double TorusGeometry::volume() const noexcept {
  double v = 1.0;
  for (int i = 0; i < dim_; ++i) v *= periods_[static_cast<std::size_t>(i)];
  return v;
}

double TorusGeometry::max_period() const noexcept {
  return dim_ == 1 ? periods_[0] : std::max(periods_[0], periods_[1]);
}

double wrap_coordinate(double x, double period) noexcept {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  // fmod of a tiny negative value can round up to exactly `period`.
  if (r >= period) r = 0.0;
  return r;
}

Vec TorusGeometry::wrap(const Vec& x) const noexcept {
  Vec out{0.0, 0.0};
  for (int i = 0; i < dim_; ++i) {
    const auto a = static_cast<std::size_t>(i);
    out[a] = wrap_coordinate(x[a], periods_[a]);
  }
  return out;
}

Vec TorusGeometry::centered_offset(const Vec& from, const Vec& to) const noexcept {
  Vec out{0.0, 0.0};
  for (int i = 0; i < dim_; ++i) {
    const auto a = static_cast<std::size_t>(i);
    const double L = periods_[a];
    out[a] = wrap_coordinate(to[a] - from[a] + 0.5 * L, L) - 0.5 * L;
  }
  return out;
}

double TorusGeometry::distance(const Vec& a, const Vec& b) const noexcept {
  const Vec d = centered_offset(a, b);
  return std::hypot(d[0], d[1]);
}

bool TorusGeometry::contains(const Vec& x) const noexcept {
  for (int i = 0; i < 2; ++i) {
    const auto a = static_cast<std::size_t>(i);
    if (i < dim_) {
      if (!(x[a] >= 0.0 && x[a] < periods_[a])) return false;
    } else if (x[a] != 0.0) {
      return false;
    }
  }
  return true;
}

bool is_valid(const TorusGeometry& geom, const PhasePoint& p) noexcept {
  if (!geom.contains(p.x)) return false;
  if (geom.dim() == 1 && p.xi[1] != 0.0) return false;
  return std::abs(std::hypot(p.xi[0], p.xi[1]) - 1.0) <= 1e-12;
}

PhasePoint geodesic_flow(const TorusGeometry& geom, const PhasePoint& p, double t) {
  if (!std::isfinite(t)) throw InvalidArgument("geodesic_flow: time must be finite");
  if (!is_valid(geom, p)) throw InvalidArgument("geodesic_flow: invalid phase point");
  PhasePoint out = p;
  for (int i = 0; i < geom.dim(); ++i) {
    const auto a = static_cast<std::size_t>(i);
    out.x[a] = wrap_coordinate(p.x[a] + t * p.xi[a], geom.period(i));
  }
  return out;
}

std::vector<PhasePoint> sample_phase_space(const TorusGeometry& geom, std::size_t n_pos,
                                           std::size_t n_dir) {
  if (n_pos == 0 || n_dir == 0) {
    throw InvalidArgument("sample_phase_space: n_pos and n_dir must be at least 1");
  }
  std::vector<Vec> directions;
  if (geom.dim() == 1) {
    directions = {Vec{-1.0, 0.0}, Vec{1.0, 0.0}};
  } else {
    directions.reserve(n_dir);
    for (std::size_t m = 0; m < n_dir; ++m) {
      const double theta = TorusGeometry::kTwoPi * static_cast<double>(m) / static_cast<double>(n_dir);
      // Normalize so |xi| = 1 holds to the last bit the hypot check can see.
      Vec xi{std::cos(theta), std::sin(theta)};
      const double norm = std::hypot(xi[0], xi[1]);
      directions.push_back(Vec{xi[0] / norm, xi[1] / norm});
    }
  }

  const auto coord = [&](std::size_t j, int axis) {
    return geom.period(axis) * static_cast<double>(j) / static_cast<double>(n_pos);
  };

  std::vector<PhasePoint> out;
  if (geom.dim() == 1) {
    out.reserve(n_pos * directions.size());
    for (std::size_t j = 0; j < n_pos; ++j) {
      for (const Vec& xi : directions) out.push_back(PhasePoint{Vec{coord(j, 0), 0.0}, xi});
    }
  } else {
    out.reserve(n_pos * n_pos * directions.size());
    for (std::size_t j0 = 0; j0 < n_pos; ++j0) {
      for (std::size_t j1 = 0; j1 < n_pos; ++j1) {
        for (const Vec& xi : directions) {
          out.push_back(PhasePoint{Vec{coord(j0, 0), coord(j1, 1)}, xi});
        }
      }
    }
  }
  return out;
}

}  // namespace dampwave
