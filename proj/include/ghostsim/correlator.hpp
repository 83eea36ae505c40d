#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ghostsim/array_io.hpp"
#include "ghostsim/fft.hpp"
#include "ghostsim/optics_core.hpp"

namespace ghostsim {

// Per-realization detector read-out of both arms, on the shared detector grid.
struct ArmIntensities {
  Grid grid;
  std::vector<double> ref;
  std::vector<double> test;
};

struct CorrelatorModes {
  bool fixed_point = true;
  bool shift_averaged = true;
  bool diagnostics = false;  // second moments for g2 and mean profiles
};

// Extracted diffraction pattern: intensity covariance against transverse
// displacement, reported on a spatial-frequency axis (displacement divided
// by wavelength times object-to-detector distance), clamped at zero and
// peak-normalized.
struct GhostResult {
  Pattern pattern;
  std::uint64_t realizations = 0;
  double min_before_clamp = 0.0;  // most negative raw estimate, covariance units
  double raw_peak = 0.0;          // covariance at the peak before normalization
  std::string estimator;
};

// FFT scratch shared across accumulations; one per worker thread.
class CorrelatorWorkspace {
 public:
  explicit CorrelatorWorkspace(const Grid& detector);
  FftwArray<double> frame;       // 2x zero-padded intensity frame
  FftwArray<cplx> spec_ref;
  FftwArray<cplx> spec_test;
  int frame_n;

 private:
  friend class CorrelationAccumulator;
};

// Plain sums over realizations; merging two accumulators is exact, so block
// results can be folded in a fixed order regardless of which thread produced
// them. All heavy lifting happens in accumulate() and the finalizers.
class CorrelationAccumulator {
 public:
  CorrelationAccumulator(const Grid& detector, CorrelatorModes modes, int fixed_sample);

  void accumulate(const ArmIntensities& arms, CorrelatorWorkspace& ws);
  void merge_from(const CorrelationAccumulator& other);  // other must match config

  std::uint64_t count() const { return n_acc_; }
  const Grid& detector() const { return grid_; }
  CorrelatorModes modes() const { return modes_; }
  int fixed_sample() const { return fixed_sample_; }

  // Covariance of the scanned reference intensity against the fixed test
  // sample, against reference-minus-fixed displacement. Needs >= 2
  // realizations and the fixed_point mode.
  GhostResult finalize_fixed_point(double wavelength, double d2, double halfwidth) const;

  // Covariance against displacement averaged over every detector pair at
  // that separation (per-pair normalized). Needs >= 2 realizations and the
  // shift_averaged mode.
  GhostResult finalize_shift_averaged(double wavelength, double d2, double halfwidth) const;

  // Normalized second moment <I^2>/<I>^2 of the reference arm at one sample;
  // 2 for fully developed speckle. Diagnostics mode only.
  double g2_at(int sample) const;

  std::vector<double> mean_ref() const;
  std::vector<double> mean_test() const;

  // Raw summed lagged product sum_k sum_x ref(x) test(x + lag), for checking
  // the spectral accumulation against a brute-force loop in tests.
  double summed_lag_product(int lag_x, int lag_y = 0) const;

  // Checkpoint round-trip. Loading validates shape and mode agreement.
  Checkpoint to_checkpoint(std::uint64_t config_hash) const;
  static CorrelationAccumulator from_checkpoint(const Checkpoint& c, const Grid& detector,
                                                CorrelatorModes modes, int fixed_sample);

 private:
  Grid grid_;
  CorrelatorModes modes_;
  int fixed_sample_ = 0;
  std::uint64_t n_acc_ = 0;
  std::vector<double> sum_ref_, sum_test_;
  std::vector<double> sum_cross_fixed_;  // fixed_point
  std::vector<double> sum_ref_sq_;       // diagnostics
  std::vector<cplx> cross_spectrum_;     // shift_averaged, half-spectrum of the 2x frame

  void check_compatible(const CorrelationAccumulator& other) const;
};

}  // namespace ghostsim
