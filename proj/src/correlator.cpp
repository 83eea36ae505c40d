#include "ghostsim/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ghostsim {
namespace {

std::size_t frame_count(int dims, int m) {
  return (dims == 1) ? static_cast<std::size_t>(m)
                     : static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
}

// Embed an n^dims intensity block in the zero-padded 2n frame (corner-
// anchored; the cross-correlation only cares about relative lags).
void embed(const Grid& g, const std::vector<double>& v, FftwArray<double>& frame, int m) {
  frame.fill_zero();
  if (g.dims == 1) {
    std::copy(v.begin(), v.end(), frame.data());
  } else {
    for (int r = 0; r < g.n; ++r)
      std::copy(v.begin() + static_cast<std::size_t>(r) * g.n,
                v.begin() + static_cast<std::size_t>(r + 1) * g.n,
                frame.data() + static_cast<std::size_t>(r) * m);
  }
}

}  // namespace

CorrelatorWorkspace::CorrelatorWorkspace(const Grid& detector)
    : frame(frame_count(detector.dims, 2 * detector.n)),
      spec_ref(fft::half_spectrum_size(detector.dims, 2 * detector.n)),
      spec_test(fft::half_spectrum_size(detector.dims, 2 * detector.n)),
      frame_n(2 * detector.n) {}

CorrelationAccumulator::CorrelationAccumulator(const Grid& detector, CorrelatorModes modes,
                                               int fixed_sample)
    : grid_(detector), modes_(modes), fixed_sample_(fixed_sample) {
  if (!modes.fixed_point && !modes.shift_averaged)
    throw std::invalid_argument("correlator: at least one estimator must be enabled");
  std::size_t n = static_cast<std::size_t>(grid_.sample_count());
  if (fixed_sample < 0 || static_cast<std::size_t>(fixed_sample) >= n)
    throw std::invalid_argument("correlator: fixed sample index outside the detector grid");
  sum_ref_.assign(n, 0.0);
  sum_test_.assign(n, 0.0);
  if (modes.fixed_point) sum_cross_fixed_.assign(n, 0.0);
  if (modes.diagnostics) sum_ref_sq_.assign(n, 0.0);
  if (modes.shift_averaged)
    cross_spectrum_.assign(fft::half_spectrum_size(grid_.dims, 2 * grid_.n), cplx(0.0));
}

void CorrelationAccumulator::accumulate(const ArmIntensities& arms, CorrelatorWorkspace& ws) {
  if (!(arms.grid == grid_))
    throw std::invalid_argument("correlator: arm intensities on a different grid");
  std::size_t n = sum_ref_.size();
  if (arms.ref.size() != n || arms.test.size() != n)
    throw std::invalid_argument("correlator: arm sample count does not match the grid");
  if (ws.frame_n != 2 * grid_.n)
    throw std::invalid_argument("correlator: workspace built for a different grid");

  double t_fixed = arms.test[static_cast<std::size_t>(fixed_sample_)];
  for (std::size_t i = 0; i < n; ++i) {
    sum_ref_[i] += arms.ref[i];
    sum_test_[i] += arms.test[i];
  }
  if (modes_.fixed_point)
    for (std::size_t i = 0; i < n; ++i) sum_cross_fixed_[i] += arms.ref[i] * t_fixed;
  if (modes_.diagnostics)
    for (std::size_t i = 0; i < n; ++i) sum_ref_sq_[i] += arms.ref[i] * arms.ref[i];
  if (modes_.shift_averaged) {
    embed(grid_, arms.ref, ws.frame, ws.frame_n);
    fft::r2c(ws.frame.data(), ws.spec_ref.data(), grid_.dims, ws.frame_n);
    embed(grid_, arms.test, ws.frame, ws.frame_n);
    fft::r2c(ws.frame.data(), ws.spec_test.data(), grid_.dims, ws.frame_n);
    for (std::size_t j = 0; j < cross_spectrum_.size(); ++j)
      cross_spectrum_[j] += std::conj(ws.spec_ref.data()[j]) * ws.spec_test.data()[j];
  }
  ++n_acc_;
}

void CorrelationAccumulator::check_compatible(const CorrelationAccumulator& other) const {
  bool modes_match = modes_.fixed_point == other.modes_.fixed_point &&
                     modes_.shift_averaged == other.modes_.shift_averaged &&
                     modes_.diagnostics == other.modes_.diagnostics;
  if (!(grid_ == other.grid_) || !modes_match || fixed_sample_ != other.fixed_sample_)
    throw std::invalid_argument("correlator: cannot merge accumulators with different configs");
}

void CorrelationAccumulator::merge_from(const CorrelationAccumulator& other) {
  check_compatible(other);
  n_acc_ += other.n_acc_;
  for (std::size_t i = 0; i < sum_ref_.size(); ++i) {
    sum_ref_[i] += other.sum_ref_[i];
    sum_test_[i] += other.sum_test_[i];
  }
  for (std::size_t i = 0; i < sum_cross_fixed_.size(); ++i)
    sum_cross_fixed_[i] += other.sum_cross_fixed_[i];
  for (std::size_t i = 0; i < sum_ref_sq_.size(); ++i) sum_ref_sq_[i] += other.sum_ref_sq_[i];
  for (std::size_t i = 0; i < cross_spectrum_.size(); ++i)
    cross_spectrum_[i] += other.cross_spectrum_[i];
}

namespace {

// Shared tail of both finalizers: clamp negatives, normalize the peak,
// package with axis values displacement / (wavelength d2).
GhostResult package(std::vector<double>&& shifts, std::vector<double>&& values, int dims,
                    double wavelength, double d2, std::uint64_t n, const char* name) {
  double raw_peak = *std::max_element(values.begin(), values.end());
  double raw_min = *std::min_element(values.begin(), values.end());
  if (raw_peak <= 0)
    throw std::runtime_error(std::string(name) + ": covariance peak is not positive; "
                             "the estimate is pure noise or the arms are unrelated");
  for (double& v : values) v = std::max(v, 0.0) / raw_peak;
  GhostResult out;
  out.pattern.dims = dims;
  out.pattern.kind = AxisKind::frequency;
  out.pattern.axis.resize(shifts.size());
  for (std::size_t i = 0; i < shifts.size(); ++i)
    out.pattern.axis[i] = shifts[i] / (wavelength * d2);
  out.pattern.values = std::move(values);
  out.pattern.validate();
  out.realizations = n;
  out.min_before_clamp = std::min(raw_min, 0.0);
  out.raw_peak = raw_peak;
  out.estimator = name;
  return out;
}

}  // namespace

GhostResult CorrelationAccumulator::finalize_fixed_point(double wavelength, double d2,
                                                         double halfwidth) const {
  if (!modes_.fixed_point)
    throw std::logic_error("correlator: fixed-point estimator was not accumulated");
  if (n_acc_ < 2) throw std::runtime_error("correlator: need at least 2 realizations");
  double inv_n = 1.0 / static_cast<double>(n_acc_);
  double t_fixed_mean = sum_test_[static_cast<std::size_t>(fixed_sample_)] * inv_n;
  int n = grid_.n;
  if (halfwidth <= 0) halfwidth = grid_.span() / 4;
  int max_off = std::min(static_cast<int>(std::floor(halfwidth / grid_.pitch)), n / 2);

  if (grid_.dims == 1) {
    int i0 = fixed_sample_;
    int lo = std::max(0, i0 - max_off), hi = std::min(n - 1, i0 + max_off);
    std::vector<double> shifts, vals;
    for (int i = lo; i <= hi; ++i) {
      shifts.push_back(grid_.coordinate(i) - grid_.coordinate(i0));
      vals.push_back(sum_cross_fixed_[static_cast<std::size_t>(i)] * inv_n -
                     sum_ref_[static_cast<std::size_t>(i)] * inv_n * t_fixed_mean);
    }
    if (shifts.size() < 8) throw std::runtime_error("correlator: window too narrow");
    return package(std::move(shifts), std::move(vals), 1, wavelength, d2, n_acc_, "fixed_point");
  }

  int iy0 = fixed_sample_ / n, ix0 = fixed_sample_ % n;
  int off = std::min({max_off, ix0, n - 1 - ix0, iy0, n - 1 - iy0});
  if (2 * off + 1 < 8) throw std::runtime_error("correlator: window too narrow");
  std::vector<double> shifts, vals;
  for (int d = -off; d <= off; ++d) shifts.push_back(d * grid_.pitch);
  for (int dy = -off; dy <= off; ++dy)
    for (int dx = -off; dx <= off; ++dx) {
      std::size_t i = static_cast<std::size_t>(iy0 + dy) * n + (ix0 + dx);
      vals.push_back(sum_cross_fixed_[i] * inv_n - sum_ref_[i] * inv_n * t_fixed_mean);
    }
  return package(std::move(shifts), std::move(vals), 2, wavelength, d2, n_acc_, "fixed_point");
}

GhostResult CorrelationAccumulator::finalize_shift_averaged(double wavelength, double d2,
                                                            double halfwidth) const {
  if (!modes_.shift_averaged)
    throw std::logic_error("correlator: shift-averaged estimator was not accumulated");
  if (n_acc_ < 2) throw std::runtime_error("correlator: need at least 2 realizations");
  double inv_n = 1.0 / static_cast<double>(n_acc_);
  int n = grid_.n, m = 2 * n;
  std::size_t mh = fft::half_spectrum_size(grid_.dims, m);
  std::size_t mcount = frame_count(grid_.dims, m);

  // Lagged products averaged over realizations, then with the product of the
  // mean profiles at the same lags removed: a covariance, not a correlation.
  FftwArray<cplx> spec(mh);
  FftwArray<double> corr_cross(mcount);
  for (std::size_t j = 0; j < mh; ++j) spec.data()[j] = cross_spectrum_[j] * inv_n;
  fft::c2r(spec.data(), corr_cross.data(), grid_.dims, m);

  CorrelatorWorkspace ws(grid_);
  std::vector<double> mean_r = mean_ref(), mean_t = mean_test();
  embed(grid_, mean_r, ws.frame, m);
  fft::r2c(ws.frame.data(), ws.spec_ref.data(), grid_.dims, m);
  embed(grid_, mean_t, ws.frame, m);
  fft::r2c(ws.frame.data(), ws.spec_test.data(), grid_.dims, m);
  for (std::size_t j = 0; j < mh; ++j)
    spec.data()[j] = std::conj(ws.spec_ref.data()[j]) * ws.spec_test.data()[j];
  FftwArray<double> corr_mean(mcount);
  fft::c2r(spec.data(), corr_mean.data(), grid_.dims, m);

  if (halfwidth <= 0) halfwidth = grid_.span() / 2;
  int max_lag = std::min(static_cast<int>(std::floor(halfwidth / grid_.pitch)), n - 1);

  // Pattern displacement = reference minus test position = minus the lag of
  // sum_x ref(x) test(x + lag).
  if (grid_.dims == 1) {
    std::vector<double> shifts, vals;
    for (int s = -max_lag; s <= max_lag; ++s) {
      int lag = -s;
      std::size_t idx = static_cast<std::size_t>((lag + m) % m);
      double pairs = static_cast<double>(n - std::abs(lag));
      shifts.push_back(s * grid_.pitch);
      vals.push_back((corr_cross.data()[idx] - corr_mean.data()[idx]) / pairs);
    }
    return package(std::move(shifts), std::move(vals), 1, wavelength, d2, n_acc_,
                   "shift_averaged");
  }

  std::vector<double> shifts, vals;
  for (int d = -max_lag; d <= max_lag; ++d) shifts.push_back(d * grid_.pitch);
  for (int sy = -max_lag; sy <= max_lag; ++sy)
    for (int sx = -max_lag; sx <= max_lag; ++sx) {
      int ly = -sy, lx = -sx;
      std::size_t idx =
          static_cast<std::size_t>((ly + m) % m) * m + static_cast<std::size_t>((lx + m) % m);
      double pairs = static_cast<double>(n - std::abs(ly)) * static_cast<double>(n - std::abs(lx));
      vals.push_back((corr_cross.data()[idx] - corr_mean.data()[idx]) / pairs);
    }
  return package(std::move(shifts), std::move(vals), 2, wavelength, d2, n_acc_, "shift_averaged");
}

double CorrelationAccumulator::g2_at(int sample) const {
  if (!modes_.diagnostics)
    throw std::logic_error("correlator: g2 needs the diagnostics mode");
  if (n_acc_ == 0) throw std::runtime_error("correlator: no realizations accumulated");
  if (sample < 0 || static_cast<std::size_t>(sample) >= sum_ref_.size())
    throw std::invalid_argument("correlator: sample index outside the detector grid");
  double m1 = sum_ref_[static_cast<std::size_t>(sample)] / static_cast<double>(n_acc_);
  double m2 = sum_ref_sq_[static_cast<std::size_t>(sample)] / static_cast<double>(n_acc_);
  if (m1 <= 0) throw std::runtime_error("correlator: zero mean intensity at this sample");
  return m2 / (m1 * m1);
}

std::vector<double> CorrelationAccumulator::mean_ref() const {
  if (n_acc_ == 0) throw std::runtime_error("correlator: no realizations accumulated");
  std::vector<double> out = sum_ref_;
  for (double& v : out) v /= static_cast<double>(n_acc_);
  return out;
}

std::vector<double> CorrelationAccumulator::mean_test() const {
  if (n_acc_ == 0) throw std::runtime_error("correlator: no realizations accumulated");
  std::vector<double> out = sum_test_;
  for (double& v : out) v /= static_cast<double>(n_acc_);
  return out;
}

double CorrelationAccumulator::summed_lag_product(int lag_x, int lag_y) const {
  if (!modes_.shift_averaged)
    throw std::logic_error("correlator: lagged products need the shift_averaged mode");
  int m = 2 * grid_.n;
  std::size_t mh = fft::half_spectrum_size(grid_.dims, m);
  std::size_t mcount = frame_count(grid_.dims, m);
  FftwArray<cplx> spec(mh);
  std::copy(cross_spectrum_.begin(), cross_spectrum_.end(), spec.data());
  FftwArray<double> corr(mcount);
  fft::c2r(spec.data(), corr.data(), grid_.dims, m);
  std::size_t ix = static_cast<std::size_t>((lag_x + m) % m);
  if (grid_.dims == 1) return corr.data()[ix];
  return corr.data()[static_cast<std::size_t>((lag_y + m) % m) * m + ix];
}

Checkpoint CorrelationAccumulator::to_checkpoint(std::uint64_t config_hash) const {
  Checkpoint c;
  c.realizations_done = n_acc_;
  c.config_hash = config_hash;
  std::vector<std::uint32_t> ext;
  if (grid_.dims == 1)
    ext = {static_cast<std::uint32_t>(grid_.n)};
  else
    ext = {static_cast<std::uint32_t>(grid_.n), static_cast<std::uint32_t>(grid_.n)};
  c.real_records.push_back({ext, sum_ref_});
  c.record_order.push_back(0);
  c.real_records.push_back({ext, sum_test_});
  c.record_order.push_back(0);
  if (modes_.fixed_point) {
    c.real_records.push_back({ext, sum_cross_fixed_});
    c.record_order.push_back(0);
  }
  if (modes_.diagnostics) {
    c.real_records.push_back({ext, sum_ref_sq_});
    c.record_order.push_back(0);
  }
  if (modes_.shift_averaged) {
    std::vector<std::uint32_t> sext;
    int m = 2 * grid_.n;
    if (grid_.dims == 1)
      sext = {static_cast<std::uint32_t>(m / 2 + 1)};
    else
      sext = {static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(m / 2 + 1)};
    c.complex_records.push_back({sext, cross_spectrum_});
    c.record_order.push_back(1);
  }
  return c;
}

CorrelationAccumulator CorrelationAccumulator::from_checkpoint(const Checkpoint& c,
                                                               const Grid& detector,
                                                               CorrelatorModes modes,
                                                               int fixed_sample) {
  CorrelationAccumulator acc(detector, modes, fixed_sample);
  std::size_t want_real = 2 + (modes.fixed_point ? 1 : 0) + (modes.diagnostics ? 1 : 0);
  std::size_t want_cplx = modes.shift_averaged ? 1 : 0;
  if (c.real_records.size() != want_real || c.complex_records.size() != want_cplx)
    throw FormatError("checkpoint: record layout does not match the configured estimators");
  std::size_t n = acc.sum_ref_.size();
  for (const RealArray& r : c.real_records)
    if (r.values.size() != n)
      throw FormatError("checkpoint: record size does not match the detector grid");
  std::size_t ri = 0;
  acc.sum_ref_ = c.real_records[ri++].values;
  acc.sum_test_ = c.real_records[ri++].values;
  if (modes.fixed_point) acc.sum_cross_fixed_ = c.real_records[ri++].values;
  if (modes.diagnostics) acc.sum_ref_sq_ = c.real_records[ri++].values;
  if (modes.shift_averaged) {
    if (c.complex_records[0].values.size() != acc.cross_spectrum_.size())
      throw FormatError("checkpoint: cross-spectrum size does not match the detector grid");
    acc.cross_spectrum_ = c.complex_records[0].values;
  }
  acc.n_acc_ = c.realizations_done;
  return acc;
}

}  // namespace ghostsim
