#pragma once

#include <complex>
#include <cstddef>

#include "ghostsim/optics_core.hpp"

namespace ghostsim {

// Move-only buffer on the FFTW allocator (aligned for SIMD plans).
template <typename T>
class FftwArray {
 public:
  FftwArray() = default;
  explicit FftwArray(std::size_t n);
  ~FftwArray();
  FftwArray(FftwArray&& other) noexcept;
  FftwArray& operator=(FftwArray&& other) noexcept;
  FftwArray(const FftwArray&) = delete;
  FftwArray& operator=(const FftwArray&) = delete;

  T* data() { return p_; }
  const T* data() const { return p_; }
  std::size_t size() const { return n_; }
  T& operator[](std::size_t i) { return p_[i]; }
  const T& operator[](std::size_t i) const { return p_[i]; }
  void fill_zero();

 private:
  T* p_ = nullptr;
  std::size_t n_ = 0;
};

extern template class FftwArray<double>;
extern template class FftwArray<cplx>;

// Thin cached-plan wrappers around FFTW. Plans are FFTW_ESTIMATE only, so
// repeated runs are bit-identical; the cache is mutex-guarded and plans are
// shared across threads (execution on distinct buffers is thread-safe).
// Buffers must come from FftwArray. n is the per-axis length; dims is 1 or 2
// (2D transforms are n x n, row-major).
namespace fft {

// In-place complex transforms; backward is scaled by 1/N^dims so that
// forward then backward reproduces the input.
void c2c_forward(cplx* data, int dims, int n);
void c2c_backward(cplx* data, int dims, int n);

// half-spectrum layouts: 1D -> n/2+1, 2D -> n x (n/2+1), row-major
void r2c(const double* in, cplx* out, int dims, int n);
void c2r(cplx* in, double* out, int dims, int n);  // clobbers in; scaled by 1/N^dims

std::size_t half_spectrum_size(int dims, int n);

// unshifted-spectrum frequency of bin i for sample pitch `pitch`
double bin_frequency(int i, int n, double pitch);

}  // namespace fft

}  // namespace ghostsim
