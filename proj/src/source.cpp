#include "ghostsim/source.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ghostsim/fft.hpp"
#include "ghostsim/propagate.hpp"

namespace ghostsim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLightSpeed = 299792458.0;
}  // namespace

void SpeckleSpec::validate() const {
  if (spot_diameter <= 0)
    throw std::invalid_argument("speckle source: spot diameter must be positive");
  if (spot_diameter > grid.span() / 2)
    throw std::invalid_argument(
        "speckle source: spot diameter exceeds half the grid span; widen the grid");
}

std::vector<double> source_amplitude(const SpeckleSpec& spec) {
  spec.validate();
  const Grid& g = spec.grid;
  std::vector<double> amp(static_cast<std::size_t>(g.sample_count()), 0.0);
  double half = spec.spot_diameter / 2;
  if (g.dims == 1) {
    for (int i = 0; i < g.n; ++i) {
      double x = g.coordinate(i);
      if (spec.profile == SourceProfile::hard)
        amp[static_cast<std::size_t>(i)] = (std::abs(x) <= half) ? 1.0 : 0.0;
      else
        amp[static_cast<std::size_t>(i)] = std::exp(-(x * x) / (half * half));
    }
  } else {
    for (int iy = 0; iy < g.n; ++iy) {
      double y = g.coordinate(iy);
      for (int ix = 0; ix < g.n; ++ix) {
        double x = g.coordinate(ix);
        double r2 = x * x + y * y;
        double& a = amp[static_cast<std::size_t>(iy) * g.n + ix];
        if (spec.profile == SourceProfile::hard)
          a = (r2 <= half * half) ? 1.0 : 0.0;
        else
          a = std::exp(-r2 / (half * half));
      }
    }
  }
  return amp;
}

ComplexField generate_speckle(const SpeckleSpec& spec, const RealizationSeed& seed,
                              StreamContext context) {
  std::vector<double> amp = source_amplitude(spec);
  CounterStream stream(seed.master_seed, context, seed.realization);
  ComplexField out;
  out.grid = spec.grid;
  out.samples.resize(amp.size());
  for (std::size_t i = 0; i < amp.size(); ++i) {
    // Draw index == sample index, so skipping dark samples cannot shift the
    // phases of the lit ones.
    if (amp[i] == 0.0) {
      out.samples[i] = 0.0;
      continue;
    }
    out.samples[i] = std::polar(amp[i], kTwoPi * stream.uniform(i));
  }
  return out;
}

double transverse_coherence_length(double wavelength, double d1, double d0) {
  if (wavelength <= 0 || d1 <= 0 || d0 <= 0)
    throw std::invalid_argument("transverse_coherence_length: all arguments must be positive");
  return wavelength * d1 / d0;
}

double coherence_time(double wavelength, double monochromaticity) {
  if (wavelength <= 0 || monochromaticity <= 0)
    throw std::invalid_argument("coherence_time: all arguments must be positive");
  return wavelength * monochromaticity / kLightSpeed;
}

double curve_fwhm(const std::vector<double>& axis, const std::vector<double>& values) {
  if (axis.size() != values.size() || axis.size() < 3)
    throw std::invalid_argument("curve_fwhm: need at least 3 samples");
  std::size_t ipk = static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
  double half = values[ipk] / 2;
  if (values[ipk] <= 0) throw std::invalid_argument("curve_fwhm: peak is not positive");

  auto crossing = [&](bool leftward) -> double {
    std::size_t i = ipk;
    while (true) {
      std::size_t next = leftward ? i - 1 : i + 1;
      if ((leftward && i == 0) || (!leftward && next >= values.size()))
        throw std::invalid_argument(
            "curve_fwhm: curve does not fall to half maximum inside the window");
      if (values[next] < half) {
        double w = (values[i] - half) / (values[i] - values[next]);
        return axis[i] + w * (axis[next] - axis[i]);
      }
      i = next;
    }
  };
  return crossing(false) - crossing(true);
}

int auto_pad_factor(const SpeckleSpec& spec, double wavelength, double distance) {
  spec.validate();
  double s = std::min(wavelength / (2 * spec.grid.pitch), 0.999);
  double throw_len = s / std::sqrt(1 - s * s) * std::abs(distance);
  double need = spec.grid.span() / 2 + spec.spot_diameter / 2 + throw_len;
  int pad = static_cast<int>(std::ceil(need / spec.grid.span())) + 1;
  return std::max(pad, 2);
}

SpeckleStatsResult measure_intensity_autocovariance(const SpeckleSpec& spec, double wavelength,
                                                    double distance, std::uint64_t realizations,
                                                    std::uint64_t master_seed) {
  spec.validate();
  if (spec.grid.dims != 1)
    throw std::invalid_argument("measure_intensity_autocovariance: 1D grids only");
  if (realizations < 100)
    throw std::invalid_argument(
        "measure_intensity_autocovariance: at least 100 realizations needed for a stable width");
  int pad = auto_pad_factor(spec, wavelength, distance);
  int n = spec.grid.n;
  int m = 2 * n;  // zero-padded frame => linear (not circular) correlation
  std::size_t mh = fft::half_spectrum_size(1, m);

  std::vector<double> sum_i(static_cast<std::size_t>(n), 0.0);
  std::vector<double> acc_spec(mh, 0.0);
  FftwArray<double> work(static_cast<std::size_t>(m));
  FftwArray<cplx> spec_buf(mh);

  for (std::uint64_t k = 0; k < realizations; ++k) {
    ComplexField field = generate_speckle(spec, {master_seed, k});
    ComplexField far = angular_spectrum(field, distance, wavelength, pad);
    work.fill_zero();
    for (int i = 0; i < n; ++i) {
      double inten = std::norm(far.samples[static_cast<std::size_t>(i)]);
      sum_i[static_cast<std::size_t>(i)] += inten;
      work.data()[i] = inten;
    }
    fft::r2c(work.data(), spec_buf.data(), 1, m);
    for (std::size_t j = 0; j < mh; ++j) acc_spec[j] += std::norm(spec_buf.data()[j]);
  }

  double inv_n = 1.0 / static_cast<double>(realizations);
  // <I I> correlogram summed over realizations...
  for (std::size_t j = 0; j < mh; ++j) spec_buf.data()[j] = acc_spec[j] * inv_n;
  FftwArray<double> corr_raw(static_cast<std::size_t>(m));
  fft::c2r(spec_buf.data(), corr_raw.data(), 1, m);
  // ...minus the correlogram of the mean profile.
  work.fill_zero();
  for (int i = 0; i < n; ++i) work.data()[i] = sum_i[static_cast<std::size_t>(i)] * inv_n;
  fft::r2c(work.data(), spec_buf.data(), 1, m);
  for (std::size_t j = 0; j < mh; ++j)
    spec_buf.data()[j] = cplx(std::norm(spec_buf.data()[j]), 0.0);
  FftwArray<double> corr_mean(static_cast<std::size_t>(m));
  fft::c2r(spec_buf.data(), corr_mean.data(), 1, m);

  int max_lag = std::min(n - 1, 4 * n / 10);
  SpeckleStatsResult out;
  out.pad_factor_used = pad;
  out.realizations = realizations;
  double mean_all = 0;
  for (double v : sum_i) mean_all += v;
  out.mean_intensity = mean_all * inv_n / n;
  out.lag_axis.resize(static_cast<std::size_t>(2 * max_lag + 1));
  out.autocovariance.resize(out.lag_axis.size());
  double c0 = (corr_raw.data()[0] - corr_mean.data()[0]) / n;
  if (c0 <= 1e-12 * out.mean_intensity * out.mean_intensity)
    throw std::invalid_argument(
        "measure_intensity_autocovariance: intensity has no variance (degenerate source?)");
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    int idx = (lag + m) % m;
    int pairs = n - std::abs(lag);
    double c = (corr_raw.data()[idx] - corr_mean.data()[idx]) / pairs;
    std::size_t j = static_cast<std::size_t>(lag + max_lag);
    out.lag_axis[j] = lag * spec.grid.pitch;
    out.autocovariance[j] = c / c0;
  }
  out.fwhm = curve_fwhm(out.lag_axis, out.autocovariance);
  return out;
}

}  // namespace ghostsim
