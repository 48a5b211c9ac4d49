#include "dampwave/spectral_grid.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <mutex>
#include <string>

#include "dampwave/error.hpp"

namespace dampwave {

namespace {

// FFTW's planner and plan destruction are not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const Complex* p) {
  // Out-of-place c2c transforms preserve their input.
  return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p));
}

}  // namespace

struct SpectralGrid::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  Plans(int dim, int n) {
    // Plans are created on scratch buffers and later executed through the
    // new-array interface; FFTW_UNALIGNED makes that valid for any buffer.
    const std::size_t total = dim == 1 ? static_cast<std::size_t>(n)
                                       : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    std::vector<Complex> a(total), b(total);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(planner_mutex());
    if (dim == 1) {
      forward = fftw_plan_dft_1d(n, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
      backward = fftw_plan_dft_1d(n, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
    } else {
      forward = fftw_plan_dft_2d(n, n, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
      backward = fftw_plan_dft_2d(n, n, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
    }
  }

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }

  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

SpectralGrid::SpectralGrid(const TorusGeometry& geom, std::size_t n) : geom_(geom), n_(n) {
  if (n < 8 || !std::has_single_bit(n)) {
    throw InvalidArgument("spectral grid needs a power-of-two n >= 8, got " + std::to_string(n));
  }
  size_ = geom.dim() == 1 ? n : n * n;
  cell_volume_ = geom.volume() / static_cast<double>(size_);
  omega_.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const Vec k = kappa(i);
    omega_[i] = std::hypot(k[0], k[1]);
  }
  plans_ = std::make_unique<Plans>(geom.dim(), static_cast<int>(n));
}

SpectralGrid::~SpectralGrid() = default;

std::shared_ptr<const SpectralGrid> SpectralGrid::create(const TorusGeometry& geom, std::size_t n) {
  return std::make_shared<const SpectralGrid>(geom, n);
}

Vec SpectralGrid::node(std::size_t index) const noexcept {
  const double n = static_cast<double>(n_);
  if (dim() == 1) return Vec{geom_.period(0) * static_cast<double>(index) / n, 0.0};
  return Vec{geom_.period(0) * static_cast<double>(index / n_) / n,
             geom_.period(1) * static_cast<double>(index % n_) / n};
}

std::array<int, 2> SpectralGrid::wavenumber(std::size_t index) const noexcept {
  const auto signed_k = [this](std::size_t i) {
    const int ii = static_cast<int>(i);
    const int nn = static_cast<int>(n_);
    return ii < nn / 2 ? ii : ii - nn;
  };
  if (dim() == 1) return {signed_k(index), 0};
  return {signed_k(index / n_), signed_k(index % n_)};
}

Vec SpectralGrid::kappa(std::size_t index) const noexcept {
  const auto k = wavenumber(index);
  Vec out{TorusGeometry::kTwoPi * k[0] / geom_.period(0), 0.0};
  if (dim() == 2) out[1] = TorusGeometry::kTwoPi * k[1] / geom_.period(1);
  return out;
}

std::size_t SpectralGrid::mirror(std::size_t index) const noexcept {
  const auto flip = [this](std::size_t i) { return i == 0 ? 0 : n_ - i; };
  if (dim() == 1) return flip(index);
  return flip(index / n_) * n_ + flip(index % n_);
}

std::size_t SpectralGrid::index_of(std::array<int, 2> k) const {
  const int nn = static_cast<int>(n_);
  const auto wrap = [nn](int ki) {
    if (ki < -nn / 2 || ki > nn / 2) throw InvalidArgument("wavenumber outside grid");
    return static_cast<std::size_t>((ki % nn + nn) % nn);
  };
  if (dim() == 1) return wrap(k[0]);
  return wrap(k[0]) * n_ + wrap(k[1]);
}

void SpectralGrid::forward(std::span<const Complex> nodal, std::span<Complex> coeffs) const {
  if (nodal.size() != size_ || coeffs.size() != size_) {
    throw InvalidArgument("SpectralGrid::forward: span size mismatch");
  }
  fftw_execute_dft(plans_->forward, as_fftw(nodal.data()), as_fftw(coeffs.data()));
  const double scale = 1.0 / static_cast<double>(size_);
  for (Complex& c : coeffs) c *= scale;
}

void SpectralGrid::inverse(std::span<const Complex> coeffs, std::span<Complex> nodal) const {
  if (nodal.size() != size_ || coeffs.size() != size_) {
    throw InvalidArgument("SpectralGrid::inverse: span size mismatch");
  }
  fftw_execute_dft(plans_->backward, as_fftw(coeffs.data()), as_fftw(nodal.data()));
}

const char* fft_backend_version() noexcept { return fftw_version; }

}  // namespace dampwave
