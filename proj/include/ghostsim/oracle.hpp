#pragma once

#include <cstdint>
#include <vector>

#include "ghostsim/objects.hpp"
#include "ghostsim/optics_core.hpp"

namespace ghostsim {

// Peak-normalized |T(nu)|^2 of a transmission by direct summation over its
// samples -- deliberately transform-free so it cannot share a failure mode
// with the FFT pipeline. 1D evaluates on the given frequency axis; 2D
// evaluates the same axis along both directions and only visits the
// object's nonzero samples. Work is capped: nonzero samples times output
// points must stay below 2^33 terms.
Pattern fraunhofer_modulus(const Transmission& obj, const std::vector<double>& frequency_axis);

// Closed-form pattern of two clear slits: sinc^2 envelope times cos^2
// fringes, peak-normalized on the given frequency axis.
Pattern analytic_double_slit(double width, double separation,
                             const std::vector<double>& frequency_axis);

// Pattern-vs-reference report. The reference is linearly resampled onto the
// pattern axis; both are peak-normalized over the compared range first.
struct CompareReport {
  double rms_error = 0.0;          // RMS difference as a fraction of peak (= 1)
  double fringe_period = 0.0;      // dominant oscillation period of the pattern, axis units
  double reference_period = 0.0;   // same measurement on the resampled reference
  std::vector<double> peak_offsets;  // pattern-peak minus nearest reference-peak positions
  std::size_t compared_samples = 0;
};

// Requires overlapping axes (throws std::invalid_argument when disjoint) and
// 1D patterns of the same axis kind.
CompareReport compare_patterns(const Pattern& pattern, const Pattern& reference);

// Dominant non-constant oscillation period of a uniformly sampled series, by
// discrete Fourier magnitude with quadratic peak interpolation. Returns 0
// when the series has no oscillation above the mean. Meant for near-tonal
// series; on an envelope-times-fringes pattern the envelope wins, so fringe
// readings should use central_fringe_period instead.
double dominant_period(const std::vector<double>& axis, const std::vector<double>& values);

// Width of the central bright fringe: the distance between the two intensity
// minima flanking the tallest sample. Each minimum is located by fitting the
// square root of the valley (after subtracting the valley's own floor, so a
// contrast-reduced dark fringe still yields straight walls) with two straight
// walls and a scanned crossing, falling back to a least-squares parabola when
// the valley holds too few samples. For a two-slit pattern the width equals
// the fringe period 1/separation; for a single aperture it is twice the first
// zero. Throws std::invalid_argument when a flanking minimum cannot be found
// on either side.
double central_fringe_period(const std::vector<double>& axis, const std::vector<double>& values);

}  // namespace ghostsim
