#include "ghostsim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace ghostsim {

template <typename T>
FftwArray<T>::FftwArray(std::size_t n) : n_(n) {
  if (n == 0) return;
  p_ = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p_) throw std::bad_alloc();
}

template <typename T>
FftwArray<T>::~FftwArray() {
  if (p_) fftw_free(p_);
}

template <typename T>
FftwArray<T>::FftwArray(FftwArray&& other) noexcept : p_(other.p_), n_(other.n_) {
  other.p_ = nullptr;
  other.n_ = 0;
}

template <typename T>
FftwArray<T>& FftwArray<T>::operator=(FftwArray&& other) noexcept {
  if (this != &other) {
    if (p_) fftw_free(p_);
    p_ = other.p_;
    n_ = other.n_;
    other.p_ = nullptr;
    other.n_ = 0;
  }
  return *this;
}

template <typename T>
void FftwArray<T>::fill_zero() {
  for (std::size_t i = 0; i < n_; ++i) p_[i] = T{};
}

template class FftwArray<double>;
template class FftwArray<cplx>;

namespace fft {

namespace {

enum class Kind { c2c_fwd, c2c_bwd, r2c_t, c2r_t };

std::size_t total(int dims, int n) {
  std::size_t c = static_cast<std::size_t>(n);
  return dims == 2 ? c * c : c;
}

// The c2c plans are created in-place (that is how every call site runs
// them); r2c/c2r are two-buffer. All execution goes through the new-array
// interface, which is safe because every buffer comes from fftw_malloc and
// keeps the planned in-place/out-of-place split.
struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<Kind, int, int>, fftw_plan> plans;

  fftw_plan get(Kind kind, int dims, int n) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(kind, dims, n);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;

    std::size_t count = total(dims, n);
    fftw_plan p = nullptr;
    if (kind == Kind::c2c_fwd || kind == Kind::c2c_bwd) {
      FftwArray<cplx> a(count);
      auto* fa = reinterpret_cast<fftw_complex*>(a.data());
      int sign = kind == Kind::c2c_fwd ? FFTW_FORWARD : FFTW_BACKWARD;
      p = dims == 1 ? fftw_plan_dft_1d(n, fa, fa, sign, FFTW_ESTIMATE)
                    : fftw_plan_dft_2d(n, n, fa, fa, sign, FFTW_ESTIMATE);
    } else if (kind == Kind::r2c_t) {
      FftwArray<double> a(count);
      FftwArray<cplx> b(half_spectrum_size(dims, n));
      auto* fb = reinterpret_cast<fftw_complex*>(b.data());
      p = dims == 1 ? fftw_plan_dft_r2c_1d(n, a.data(), fb, FFTW_ESTIMATE)
                    : fftw_plan_dft_r2c_2d(n, n, a.data(), fb, FFTW_ESTIMATE);
    } else {
      FftwArray<cplx> a(half_spectrum_size(dims, n));
      FftwArray<double> b(count);
      auto* fa = reinterpret_cast<fftw_complex*>(a.data());
      p = dims == 1 ? fftw_plan_dft_c2r_1d(n, fa, b.data(), FFTW_ESTIMATE)
                    : fftw_plan_dft_c2r_2d(n, n, fa, b.data(), FFTW_ESTIMATE);
    }
    if (!p) throw std::runtime_error("FFTW planner failed");
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

std::size_t half_spectrum_size(int dims, int n) {
  std::size_t h = static_cast<std::size_t>(n / 2 + 1);
  return dims == 2 ? static_cast<std::size_t>(n) * h : h;
}

void c2c_forward(cplx* data, int dims, int n) {
  fftw_plan p = cache().get(Kind::c2c_fwd, dims, n);
  auto* fd = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, fd, fd);
}

void c2c_backward(cplx* data, int dims, int n) {
  fftw_plan p = cache().get(Kind::c2c_bwd, dims, n);
  auto* fd = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, fd, fd);
  double scale = 1.0 / static_cast<double>(total(dims, n));
  std::size_t m = total(dims, n);
  for (std::size_t i = 0; i < m; ++i) data[i] *= scale;
}

void r2c(const double* in, cplx* out, int dims, int n) {
  fftw_plan p = cache().get(Kind::r2c_t, dims, n);
  fftw_execute_dft_r2c(p, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void c2r(cplx* in, double* out, int dims, int n) {
  fftw_plan p = cache().get(Kind::c2r_t, dims, n);
  fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(in), out);
  double scale = 1.0 / static_cast<double>(total(dims, n));
  std::size_t m = total(dims, n);
  for (std::size_t i = 0; i < m; ++i) out[i] *= scale;
}

double bin_frequency(int i, int n, double pitch) {
  int k = i <= n / 2 ? i : i - n;
  return static_cast<double>(k) / (static_cast<double>(n) * pitch);
}

}  // namespace fft

}  // namespace ghostsim
