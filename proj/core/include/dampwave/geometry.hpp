#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace dampwave {

// Points and vectors on a torus of dimension 1 or 2. Unused trailing
// components are kept at zero so values compare and hash cleanly.
using Vec = std::array<double, 2>;

/// Flat torus R^d / (L_1 Z x ... x L_d Z) with d in {1, 2}.
class TorusGeometry {
 public:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;

  /// Throws InvalidArgument unless dim is 1 or 2 and every period is
  /// positive and finite. `periods` must have exactly `dim` entries.
  TorusGeometry(int dim, const std::vector<double>& periods);

  /// Unit torus of the given dimension (every period 2*pi).
  static TorusGeometry standard(int dim);

  int dim() const noexcept { return dim_; }
  double period(int axis) const { return periods_.at(static_cast<std::size_t>(axis)); }
  const Vec& periods() const noexcept { return periods_; }
  double volume() const noexcept;
  double max_period() const noexcept;

  /// Maps x into the fundamental domain [0, L_i) per axis.
  Vec wrap(const Vec& x) const noexcept;
  /// Componentwise signed offset reduced to [-L_i/2, L_i/2).
  Vec centered_offset(const Vec& from, const Vec& to) const noexcept;
  /// Euclidean length of the shortest periodic displacement between a and b.
  double distance(const Vec& a, const Vec& b) const noexcept;

  bool contains(const Vec& x) const noexcept;

  friend bool operator==(const TorusGeometry&, const TorusGeometry&) = default;

 private:
  int dim_;
  Vec periods_{0.0, 0.0};
};

/// Mathematical modulus: result in [0, period) for any finite x.
double wrap_coordinate(double x, double period) noexcept;

/// A point of the unit cosphere bundle S*M: base point plus unit direction.
struct PhasePoint {
  Vec x{0.0, 0.0};
  Vec xi{0.0, 0.0};

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

/// Checks |xi| = 1 within 1e-12 and x inside the fundamental domain.
bool is_valid(const TorusGeometry& geom, const PhasePoint& p) noexcept;

/// Exact straight-line flow on the flat torus: (x + t xi mod L, xi).
/// Throws InvalidArgument for non-finite t or an invalid phase point.
PhasePoint geodesic_flow(const TorusGeometry& geom, const PhasePoint& p, double t);

/// Deterministic lattice over S*M.
///
/// Positions: n_pos equispaced values per axis, x = j L / n_pos.
/// Directions: d = 1 uses {-1, +1} (n_dir is ignored); d = 2 uses n_dir
/// angles theta = 2 pi m / n_dir.
/// Order: position-major (row-major over axes, axis 0 slowest), directions
/// innermost. Output size is n_pos^d * (d == 1 ? 2 : n_dir).
std::vector<PhasePoint> sample_phase_space(const TorusGeometry& geom, std::size_t n_pos,
                                           std::size_t n_dir);

}  // namespace dampwave
