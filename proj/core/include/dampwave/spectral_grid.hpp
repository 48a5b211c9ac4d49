#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "dampwave/geometry.hpp"

namespace dampwave {

using Complex = std::complex<double>;

/// Uniform periodic grid with n nodes per axis and its discrete Fourier basis.
///
/// Layout: flat index = i0 * n + i1 (row-major, axis 0 slowest); node
/// coordinates x_i = i * L / n. The same flat index addresses Fourier
/// coefficients, with index i mapped to the signed wavenumber i for i < n/2
/// and i - n otherwise (so the Nyquist index n/2 carries k = -n/2).
///
/// Forward transforms are normalized by 1/n per axis, so coefficients are
/// those of the trigonometric interpolant. Transforms are backed by FFTW
/// plans created once per grid; execution is safe from several threads.
class SpectralGrid {
 public:
  /// Throws InvalidArgument unless n is a power of two and n >= 8.
  SpectralGrid(const TorusGeometry& geom, std::size_t n);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  static std::shared_ptr<const SpectralGrid> create(const TorusGeometry& geom, std::size_t n);

  const TorusGeometry& geometry() const noexcept { return geom_; }
  int dim() const noexcept { return geom_.dim(); }
  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  /// Volume of one grid cell, prod_i L_i / n.
  double cell_volume() const noexcept { return cell_volume_; }

  Vec node(std::size_t index) const noexcept;
  std::array<int, 2> wavenumber(std::size_t index) const noexcept;
  /// Index of the coefficient at -k.
  std::size_t mirror(std::size_t index) const noexcept;
  /// Frequency |kappa| with kappa_i = 2 pi k_i / L_i.
  double omega(std::size_t index) const noexcept { return omega_[index]; }
  std::span<const double> omegas() const noexcept { return omega_; }
  /// Physical wave vector kappa for a coefficient index.
  Vec kappa(std::size_t index) const noexcept;
  /// Flat index of the coefficient with signed wavenumber k (|k_i| <= n/2).
  std::size_t index_of(std::array<int, 2> k) const;

  /// nodal -> coefficients (scaled by 1/size). Spans must have size().
  void forward(std::span<const Complex> nodal, std::span<Complex> coeffs) const;
  /// coefficients -> nodal values (unscaled synthesis).
  void inverse(std::span<const Complex> coeffs, std::span<Complex> nodal) const;

 private:
  struct Plans;

  TorusGeometry geom_;
  std::size_t n_;
  std::size_t size_;
  double cell_volume_;
  std::vector<double> omega_;
  std::unique_ptr<Plans> plans_;
};

/// Version string of the FFT backend.
const char* fft_backend_version() noexcept;

}  // namespace dampwave
