#include "ghostsim/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ghostsim/fft.hpp"

namespace ghostsim {
namespace {

constexpr double kPi = std::numbers::pi;

void check_field(const ComplexField& f) {
  if (f.samples.size() != static_cast<std::size_t>(f.grid.sample_count()))
    throw std::invalid_argument("field sample count does not match its grid");
}

// Centered DFT (both index origins at n/2) == fftshift . FFT . ifftshift,
// exact for even n with no extra phase factors.
void centered_forward(FftwArray<cplx>& buf, int dims, int n) {
  int half = n / 2;
  auto rotate_half = [&] {  // fftshift == ifftshift for even n
    if (dims == 1) {
      std::rotate(buf.data(), buf.data() + half, buf.data() + n);
      return;
    }
    std::vector<cplx> tmp(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
      cplx* row = buf.data() + static_cast<std::size_t>(r) * n;
      std::copy(row, row + n, tmp.begin());
      for (int c = 0; c < n; ++c) row[c] = tmp[static_cast<std::size_t>((c + half) % n)];
    }
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < n; ++r) tmp[static_cast<std::size_t>(r)] = buf.data()[static_cast<std::size_t>(r) * n + c];
      for (int r = 0; r < n; ++r)
        buf.data()[static_cast<std::size_t>(r) * n + c] = tmp[static_cast<std::size_t>((r + half) % n)];
    }
  };
  rotate_half();
  fft::c2c_forward(buf.data(), dims, n);
  rotate_half();
}

}  // namespace

double alias_free_band_limit(double wavelength, double distance, int frame_n, double pitch) {
  if (distance == 0) return 1.0 / (2 * pitch);
  double df = 1.0 / (frame_n * pitch);
  double a = 2 * df * std::abs(distance);
  return 1.0 / (wavelength * std::sqrt(a * a + 1.0));
}

ComplexField angular_spectrum(const ComplexField& in, double distance, double wavelength,
                              int pad_factor, PropagationStats* stats) {
  check_field(in);
  if (wavelength <= 0) throw std::invalid_argument("angular_spectrum: wavelength must be positive");
  if (pad_factor < 1) throw std::invalid_argument("angular_spectrum: pad_factor must be >= 1");
  const Grid& g = in.grid;
  int m = g.n * pad_factor;
  int dims = g.dims;
  std::size_t frame = (dims == 1) ? static_cast<std::size_t>(m)
                                  : static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  FftwArray<cplx> buf(frame);
  buf.fill_zero();
  int off = (m - g.n) / 2;
  if (dims == 1) {
    for (int i = 0; i < g.n; ++i) buf.data()[off + i] = in.samples[static_cast<std::size_t>(i)];
  } else {
    for (int r = 0; r < g.n; ++r)
      std::copy(in.samples.begin() + static_cast<std::size_t>(r) * g.n,
                in.samples.begin() + static_cast<std::size_t>(r + 1) * g.n,
                buf.data() + static_cast<std::size_t>(r + off) * m + off);
  }
  fft::c2c_forward(buf.data(), dims, m);

  double inv_wl2 = 1.0 / (wavelength * wavelength);
  double band = alias_free_band_limit(wavelength, distance, m, g.pitch);
  double total = 0, evan = 0, beyond = 0;
  if (dims == 1) {
    for (int i = 0; i < m; ++i) {
      double f = fft::bin_frequency(i, m, g.pitch);
      double power = std::norm(buf.data()[i]);
      total += power;
      double rad = inv_wl2 - f * f;
      if (rad <= 0) {
        evan += power;
        buf.data()[i] = 0.0;
      } else {
        buf.data()[i] *= std::polar(1.0, 2 * kPi * distance * std::sqrt(rad));
        if (std::abs(f) > band) beyond += power;
      }
    }
  } else {
    for (int r = 0; r < m; ++r) {
      double fy = fft::bin_frequency(r, m, g.pitch);
      cplx* row = buf.data() + static_cast<std::size_t>(r) * m;
      for (int c = 0; c < m; ++c) {
        double fx = fft::bin_frequency(c, m, g.pitch);
        double power = std::norm(row[c]);
        total += power;
        double rad = inv_wl2 - fx * fx - fy * fy;
        if (rad <= 0) {
          evan += power;
          row[c] = 0.0;
        } else {
          row[c] *= std::polar(1.0, 2 * kPi * distance * std::sqrt(rad));
          if (std::abs(fx) > band || std::abs(fy) > band) beyond += power;
        }
      }
    }
  }
  fft::c2c_backward(buf.data(), dims, m);

  ComplexField out;
  out.grid = g;
  out.samples.resize(static_cast<std::size_t>(g.sample_count()));
  if (dims == 1) {
    for (int i = 0; i < g.n; ++i) out.samples[static_cast<std::size_t>(i)] = buf.data()[off + i];
  } else {
    for (int r = 0; r < g.n; ++r)
      std::copy(buf.data() + static_cast<std::size_t>(r + off) * m + off,
                buf.data() + static_cast<std::size_t>(r + off) * m + off + g.n,
                out.samples.begin() + static_cast<std::size_t>(r) * g.n);
  }
  if (stats) {
    stats->evanescent_fraction = (total > 0) ? evan / total : 0.0;
    stats->beyond_band_limit_fraction = (total > 0) ? beyond / total : 0.0;
    stats->band_limit = band;
  }
  return out;
}

ComplexField fresnel_single_step(const ComplexField& in, double distance, double wavelength) {
  check_field(in);
  if (distance <= 0) throw std::invalid_argument("fresnel_single_step: distance must be positive");
  if (wavelength <= 0) throw std::invalid_argument("fresnel_single_step: wavelength must be positive");
  const Grid& g = in.grid;
  int n = g.n, dims = g.dims;
  double wz = wavelength * distance;
  double pitch_out = wz / (n * g.pitch);
  std::size_t count = static_cast<std::size_t>(g.sample_count());

  FftwArray<cplx> buf(count);
  // Input chirp, separable across axes.
  std::vector<cplx> chirp_in(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double u = g.coordinate(i);
    chirp_in[static_cast<std::size_t>(i)] = std::polar(1.0, kPi * u * u / wz);
  }
  if (dims == 1) {
    for (int i = 0; i < n; ++i)
      buf.data()[i] = in.samples[static_cast<std::size_t>(i)] * chirp_in[static_cast<std::size_t>(i)];
  } else {
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        buf.data()[static_cast<std::size_t>(r) * n + c] =
            in.samples[static_cast<std::size_t>(r) * n + c] *
            chirp_in[static_cast<std::size_t>(r)] * chirp_in[static_cast<std::size_t>(c)];
  }
  centered_forward(buf, dims, n);

  ComplexField out;
  out.grid = Grid(dims, n, pitch_out);
  out.samples.resize(count);
  // (i wl z)^(-1/2) per axis: magnitude 1/sqrt(wl z), phase -pi/4.
  cplx lead = std::polar(std::pow(wz, -0.5 * dims), -kPi / 4 * dims) *
              std::pow(g.pitch, static_cast<double>(dims));
  std::vector<cplx> chirp_out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double x = out.grid.coordinate(j);
    chirp_out[static_cast<std::size_t>(j)] = std::polar(1.0, kPi * x * x / wz);
  }
  if (dims == 1) {
    for (int j = 0; j < n; ++j)
      out.samples[static_cast<std::size_t>(j)] =
          lead * chirp_out[static_cast<std::size_t>(j)] * buf.data()[j];
  } else {
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        out.samples[static_cast<std::size_t>(r) * n + c] =
            lead * chirp_out[static_cast<std::size_t>(r)] * chirp_out[static_cast<std::size_t>(c)] *
            buf.data()[static_cast<std::size_t>(r) * n + c];
  }
  return out;
}

namespace {

// One axis of the rescaled Fourier transform out(j) = sum_m in(m) W^((j-c)(m-c))
// with W = exp(-i 2 pi alpha), alpha = pitch^2 / (wl f), via the chirp
// factorization (j-c)(m-c) = ((j-c)^2 + (m-c)^2 - (j-m)^2) / 2 and a linear
// convolution on a frame of size 2n.
struct ChirpZ {
  int n, m;
  std::vector<cplx> a;       // exp(-i pi alpha (k-c)^2), k in [0, n)
  FftwArray<cplx> b_hat;     // FFT of the +i chirp kernel on the 2n frame

  ChirpZ(int n_, double alpha) : n(n_), m(2 * n_), b_hat(static_cast<std::size_t>(2 * n_)) {
    int c = n / 2;
    a.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      double q = static_cast<double>(k - c);
      a[static_cast<std::size_t>(k)] = std::polar(1.0, -kPi * alpha * q * q);
    }
    b_hat.fill_zero();
    for (int d = -(n - 1); d <= n - 1; ++d) {
      double q = static_cast<double>(d);
      b_hat.data()[(d + m) % m] = std::polar(1.0, kPi * alpha * q * q);
    }
    fft::c2c_forward(b_hat.data(), 1, m);
  }

  // In-place on n contiguous samples, using a caller-provided 2n scratch.
  void apply(cplx* x, FftwArray<cplx>& scratch) const {
    scratch.fill_zero();
    for (int k = 0; k < n; ++k) scratch.data()[k] = x[k] * a[static_cast<std::size_t>(k)];
    fft::c2c_forward(scratch.data(), 1, m);
    for (int k = 0; k < m; ++k) scratch.data()[k] *= b_hat.data()[k];
    fft::c2c_backward(scratch.data(), 1, m);
    for (int k = 0; k < n; ++k) x[k] = scratch.data()[k] * a[static_cast<std::size_t>(k)];
  }
};

}  // namespace

ComplexField lens_2f(const ComplexField& in, double focal_length, double wavelength) {
  check_field(in);
  if (focal_length <= 0) throw std::invalid_argument("lens_2f: focal length must be positive");
  if (wavelength <= 0) throw std::invalid_argument("lens_2f: wavelength must be positive");
  const Grid& g = in.grid;
  int n = g.n, dims = g.dims;
  double alpha = g.pitch * g.pitch / (wavelength * focal_length);
  ChirpZ cz(n, alpha);
  FftwArray<cplx> scratch(static_cast<std::size_t>(2 * n));

  ComplexField out;
  out.grid = g;
  out.samples = in.samples;
  if (dims == 1) {
    cz.apply(out.samples.data(), scratch);
  } else {
    for (int r = 0; r < n; ++r)
      cz.apply(out.samples.data() + static_cast<std::size_t>(r) * n, scratch);
    std::vector<cplx> col(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < n; ++r)
        col[static_cast<std::size_t>(r)] = out.samples[static_cast<std::size_t>(r) * n + c];
      cz.apply(col.data(), scratch);
      for (int r = 0; r < n; ++r)
        out.samples[static_cast<std::size_t>(r) * n + c] = col[static_cast<std::size_t>(r)];
    }
  }
  double norm = std::pow(wavelength * focal_length, -0.5 * dims) *
                std::pow(g.pitch, static_cast<double>(dims));
  for (cplx& z : out.samples) z *= norm;
  return out;
}

std::vector<cplx> direct_integral_oracle(const ComplexField& in, double distance,
                                         double wavelength, const std::vector<double>& out_axis) {
  check_field(in);
  if (in.grid.dims != 1)
    throw std::invalid_argument("direct_integral_oracle: 1D fields only");
  if (distance <= 0 || wavelength <= 0)
    throw std::invalid_argument("direct_integral_oracle: distance and wavelength must be positive");
  double work = static_cast<double>(in.grid.n) * static_cast<double>(out_axis.size());
  if (work > 1e7)
    throw std::invalid_argument(
        "direct_integral_oracle: quadrature exceeds 1e7 terms; shrink the field or axis");
  double wz = wavelength * distance;
  cplx lead = std::polar(1.0 / std::sqrt(wz), -kPi / 4) * in.grid.pitch;
  std::vector<cplx> out(out_axis.size());
  for (std::size_t j = 0; j < out_axis.size(); ++j) {
    cplx acc = 0.0;
    for (int i = 0; i < in.grid.n; ++i) {
      double d = out_axis[j] - in.grid.coordinate(i);
      acc += in.samples[static_cast<std::size_t>(i)] * std::polar(1.0, kPi * d * d / wz);
    }
    out[j] = lead * acc;
  }
  return out;
}

}  // namespace ghostsim
