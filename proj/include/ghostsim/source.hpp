#pragma once

#include <cstdint>
#include <vector>

#include "ghostsim/optics_core.hpp"
#include "ghostsim/rng.hpp"

namespace ghostsim {

enum class SourceProfile { hard, gaussian };

// A rotating ground glass illuminated by a laser spot: fully developed
// speckle with a delta-correlated phase screen across the spot.
struct SpeckleSpec {
  Grid grid;
  double spot_diameter = 0.0;  // hard: aperture diameter; gaussian: 1/e^2 intensity diameter
  SourceProfile profile = SourceProfile::hard;

  // spot must be positive and no wider than half the grid span, so the
  // embedding pad always has room to keep wrap-around copies dark.
  void validate() const;
};

struct RealizationSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t realization = 0;
};

// Deterministic per-sample amplitude profile of the spot (no randomness).
std::vector<double> source_amplitude(const SpeckleSpec& spec);

// One field realization: amplitude profile times exp(i phi) with phi drawn
// uniformly on [0, 2 pi) per sample, keyed by (master_seed, realization,
// row-major sample index). Identical inputs give bit-identical fields, on
// any machine, in any evaluation order.
ComplexField generate_speckle(const SpeckleSpec& spec, const RealizationSeed& seed,
                              StreamContext context = StreamContext::speckle_phase);

// Expected transverse coherence length at distance d1 from a spot of
// diameter d0 (the classic far-field speckle grain scale).
double transverse_coherence_length(double wavelength, double d1, double d0);

// Coherence time of a line of fractional width 1/monochromaticity
// (= wavelength / linewidth): wavelength * monochromaticity / c.
double coherence_time(double wavelength, double monochromaticity);

// Full width at half maximum of a sampled curve by linear interpolation of
// the half-peak crossings on each side of the maximum. Throws when the curve
// never falls below half peak inside the window.
double curve_fwhm(const std::vector<double>& axis, const std::vector<double>& values);

struct SpeckleStatsResult {
  std::vector<double> lag_axis;        // meters
  std::vector<double> autocovariance;  // normalized to 1 at zero lag
  double fwhm = 0.0;                   // meters
  double mean_intensity = 0.0;
  int pad_factor_used = 0;
  std::uint64_t realizations = 0;
};

// Ensemble-measured transverse autocovariance of the intensity a distance
// `distance` downstream of the source, averaged over positions and
// realizations. The embedding pad is chosen automatically so wrap-around
// copies of the spot cannot reach the measurement window at any angle the
// grid can carry. 1D grids; at least 100 realizations; throws a degenerate-
// statistics error when the intensity has no variance.
SpeckleStatsResult measure_intensity_autocovariance(const SpeckleSpec& spec, double wavelength,
                                                    double distance, std::uint64_t realizations,
                                                    std::uint64_t master_seed);

// The pad factor the measurement above picks: ceil((half span + half spot +
// steepest-ray throw) / span) + 1.
int auto_pad_factor(const SpeckleSpec& spec, double wavelength, double distance);

}  // namespace ghostsim
