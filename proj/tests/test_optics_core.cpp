#include "doctest.h"
#include "ghostsim/optics_core.hpp"

#include <cmath>
#include <stdexcept>

using namespace ghostsim;

TEST_CASE("grid is centered on sample n/2") {
  Grid g(1, 8, 0.5);
  CHECK(g.coordinate(4) == 0.0);
  CHECK(g.coordinate(0) == doctest::Approx(-2.0));
  CHECK(g.coordinate(7) == doctest::Approx(1.5));
  CHECK(g.span() == doctest::Approx(4.0));
  auto ax = g.axis();
  REQUIRE(ax.size() == 8);
  for (std::size_t i = 1; i < ax.size(); ++i) CHECK(ax[i] > ax[i - 1]);
  CHECK(ax[4] == 0.0);
}

TEST_CASE("grid sample counts and compatibility") {
  Grid a(2, 16, 1e-6), b(2, 16, 1e-6), c(1, 16, 1e-6);
  CHECK(a.sample_count() == 256);
  CHECK(c.sample_count() == 16);
  CHECK(a.compatible(b));
  CHECK(!a.compatible(c));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("grid construction rejects nonsense") {
  CHECK_THROWS_AS(Grid(3, 8, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1, 0, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1, 8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1, 7, 1e-6), std::invalid_argument);  // odd grids unsupported
}

TEST_CASE("field energy is the Riemann sum of |E|^2") {
  Grid g(1, 4, 0.25);
  ComplexField f(g);
  f.at(0) = {3.0, 4.0};  // |E|^2 = 25
  f.at(2) = {0.0, 1.0};  // |E|^2 = 1
  CHECK(energy(f) == doctest::Approx(26.0 * 0.25));

  Grid g2(2, 2, 0.5);
  ComplexField f2(g2);
  f2.at(1, 1) = {2.0, 0.0};
  CHECK(energy(f2) == doctest::Approx(4.0 * 0.25));
}

TEST_CASE("geometry validation and the matched-distance condition") {
  SetupGeometry geom{0.532e-6, 2.7e-3, 0.060, 0.075, 0.135};
  CHECK_NOTHROW(geom.validate());
  CHECK(geom.fourier_condition_met());

  SetupGeometry detuned = geom;
  detuned.d_ref = 0.145;
  CHECK_NOTHROW(detuned.validate());
  CHECK(!detuned.fourier_condition_met());

  SetupGeometry bad = geom;
  bad.wavelength = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = geom;
  bad.d1 = -0.01;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = geom;
  bad.d0 = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("pattern validation") {
  Pattern p{1, AxisKind::frequency, {0.0, 1.0, 2.0}, {0.5, 1.0, 0.5}};
  CHECK_NOTHROW(p.validate());
  Pattern bad = p;
  bad.axis = {0.0, 2.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.values.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  Pattern q{2, AxisKind::displacement, {0.0, 1.0}, {1.0, 2.0, 3.0, 4.0}};
  CHECK_NOTHROW(q.validate());
  CHECK(q.value_at(1, 0) == 3.0);
}

TEST_CASE("detector displacement maps to object frequency") {
  Grid g(1, 8, 1e-6);
  double wl = 0.532e-6, d2 = 0.075;
  auto nu = frequency_axis(g, wl, d2);
  REQUIRE(nu.size() == 8);
  CHECK(nu[4] == 0.0);
  CHECK(nu[5] - nu[4] == doctest::Approx(1e-6 / (wl * d2)));
  CHECK(nu[0] == doctest::Approx(g.coordinate(0) / (wl * d2)));
}

TEST_CASE("far-field characteristic distance") {
  CHECK(fraunhofer_distance(105e-6, 0.532e-6) == doctest::Approx(0.0651069).epsilon(1e-4));
}

TEST_CASE("axis kind names") {
  CHECK(axis_kind_name(AxisKind::displacement) == "displacement_m");
  CHECK(axis_kind_name(AxisKind::frequency) == "frequency_per_m");
}
