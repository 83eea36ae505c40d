#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "ghostsim/optics_core.hpp"
#include "ghostsim/source.hpp"

using namespace ghostsim;

TEST_CASE("speckle fields are reproducible and keyed by every seed part") {
  SpeckleSpec spec{Grid(1, 256, 2e-6), 200e-6, SourceProfile::hard};
  RealizationSeed s{42, 7};
  ComplexField a = generate_speckle(spec, s);
  ComplexField b = generate_speckle(spec, s);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);

  ComplexField c = generate_speckle(spec, RealizationSeed{42, 8});
  ComplexField d = generate_speckle(spec, RealizationSeed{43, 7});
  ComplexField e = generate_speckle(spec, s, StreamContext::decoupled_arm);
  bool c_differs = false, d_differs = false, e_differs = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    if (std::abs(a.samples[i]) > 0) {
      c_differs |= a.samples[i] != c.samples[i];
      d_differs |= a.samples[i] != d.samples[i];
      e_differs |= a.samples[i] != e.samples[i];
    }
  }
  CHECK(c_differs);
  CHECK(d_differs);
  CHECK(e_differs);
}

TEST_CASE("hard spot: unit modulus inside the spot, dark outside") {
  SpeckleSpec spec{Grid(1, 512, 1e-6), 200e-6, SourceProfile::hard};
  std::vector<double> amp = source_amplitude(spec);
  ComplexField f = generate_speckle(spec, RealizationSeed{5, 0});
  const Grid& g = spec.grid;
  for (int i = 0; i < g.n; ++i) {
    double x = g.coordinate(i);
    if (std::abs(x) <= 100e-6 - g.pitch) {
      CHECK(amp[i] == 1.0);
      CHECK(std::abs(f.samples[i]) == doctest::Approx(1.0).epsilon(1e-12));
    }
    if (std::abs(x) >= 100e-6 + g.pitch) {
      CHECK(amp[i] == 0.0);
      CHECK(std::abs(f.samples[i]) == 0.0);
    }
  }
}

TEST_CASE("gaussian spot: 1/e^2 intensity diameter") {
  SpeckleSpec spec{Grid(1, 512, 1e-6), 200e-6, SourceProfile::gaussian};
  std::vector<double> amp = source_amplitude(spec);
  const Grid& g = spec.grid;
  CHECK(amp[g.n / 2] == doctest::Approx(1.0));
  // at x = d0/2 the intensity is down by e^-2
  int i_edge = g.n / 2 + 100;
  CHECK(amp[i_edge] * amp[i_edge] == doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
}

TEST_CASE("spot validation") {
  CHECK_THROWS_AS(SpeckleSpec({Grid(1, 64, 1e-6), 0.0, SourceProfile::hard}).validate(),
                  std::invalid_argument);
  // spot wider than half the span leaves no room for the embedding pad
  CHECK_THROWS_AS(SpeckleSpec({Grid(1, 64, 1e-6), 40e-6, SourceProfile::hard}).validate(),
                  std::invalid_argument);
  CHECK_NOTHROW(SpeckleSpec({Grid(1, 64, 1e-6), 32e-6, SourceProfile::hard}).validate());
}

TEST_CASE("far-field speckle grain and coherence-time formulas") {
  CHECK(transverse_coherence_length(0.532e-6, 60e-3, 2.7e-3) ==
        doctest::Approx(1.1822e-5).epsilon(1e-4));
  CHECK(coherence_time(0.532e-6, 1e6) == doctest::Approx(1.77456e-9).epsilon(1e-4));
  CHECK_THROWS_AS(transverse_coherence_length(0.532e-6, 0.0, 2.7e-3), std::invalid_argument);
  CHECK_THROWS_AS(coherence_time(-1.0, 1e6), std::invalid_argument);
}

TEST_CASE("FWHM of a sampled curve by half-peak crossings") {
  std::vector<double> ax, v;
  for (int i = 0; i <= 80; ++i) {
    double x = -2.0 + i * 0.05;
    ax.push_back(x);
    v.push_back(std::max(0.0, 1.0 - std::abs(x)));
  }
  CHECK(curve_fwhm(ax, v) == doctest::Approx(1.0).epsilon(1e-9));

  std::vector<double> rising = {0.0, 1.0, 2.0};
  CHECK_THROWS_AS(curve_fwhm({0.0, 1.0, 2.0}, rising), std::invalid_argument);
}

TEST_CASE("measured intensity autocovariance width matches the far-field grain") {
  SpeckleSpec spec{Grid(1, 1024, 1e-6), 200e-6, SourceProfile::hard};
  double d1 = 10e-3;
  SpeckleStatsResult r = measure_intensity_autocovariance(spec, 0.532e-6, d1, 300, 11);
  CHECK(r.realizations == 300);
  CHECK(r.pad_factor_used == auto_pad_factor(spec, 0.532e-6, d1));
  CHECK(r.pad_factor_used >= 2);
  // two-sided lag axis centered on zero, normalized peak there
  REQUIRE(r.lag_axis.size() == r.autocovariance.size());
  std::size_t mid = r.lag_axis.size() / 2;
  CHECK(r.lag_axis[mid] == doctest::Approx(0.0));
  CHECK(r.autocovariance[mid] == doctest::Approx(1.0));
  // sinc^2 autocovariance of a hard spot: FWHM = 0.886 wl d1 / d0
  double expect = 0.886 * 0.532e-6 * d1 / 200e-6;
  CHECK(r.fwhm == doctest::Approx(expect).epsilon(0.15));
  CHECK(r.mean_intensity > 0);
}

TEST_CASE("autocovariance guards: realization floor and degenerate statistics") {
  SpeckleSpec spec{Grid(1, 256, 1e-6), 60e-6, SourceProfile::hard};
  CHECK_THROWS_AS(measure_intensity_autocovariance(spec, 0.532e-6, 5e-3, 99, 1),
                  std::invalid_argument);
  // at zero distance the intensity is the deterministic spot profile:
  // no variance anywhere, so no normalizable correlation
  CHECK_THROWS_AS(measure_intensity_autocovariance(spec, 0.532e-6, 0.0, 100, 1),
                  std::invalid_argument);
}
