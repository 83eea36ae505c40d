#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ghostsim/objects.hpp"
#include "ghostsim/oracle.hpp"
#include "ghostsim/optics_core.hpp"

using namespace ghostsim;

namespace {

std::vector<double> uniform_axis(double lo, double hi, int count) {
  std::vector<double> ax(count);
  for (int i = 0; i < count; ++i) ax[i] = lo + (hi - lo) * i / (count - 1);
  return ax;
}

double sinc(double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }

}  // namespace

TEST_CASE("analytic double-slit pattern: closed-form spot values") {
  const double w = 105e-6, s = 302e-6;
  std::vector<double> nu = {0.0, 1.0 / (2 * s), 1.0 / s, 1.0 / w};
  Pattern p = analytic_double_slit(w, s, nu);
  CHECK(p.kind == AxisKind::frequency);
  CHECK(p.value_at(0) == doctest::Approx(1.0));
  // half-order fringe null
  CHECK(p.value_at(1) == doctest::Approx(0.0).epsilon(1e-12));
  // first-order bright fringe sits on the envelope alone
  double pi = std::numbers::pi;
  double env = sinc(pi * w / s) * sinc(pi * w / s);
  CHECK(p.value_at(2) == doctest::Approx(env).epsilon(1e-12));
  // envelope zero
  CHECK(p.value_at(3) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("direct-sum pattern of a sampled double slit tracks the closed form") {
  Grid g(1, 4096, 1e-6);
  Transmission obj = double_slit(105e-6, 302e-6, g);
  std::vector<double> nu = uniform_axis(-2.0e4, 2.0e4, 801);
  Pattern sum = fraunhofer_modulus(obj, nu);
  Pattern ana = analytic_double_slit(105e-6, 302e-6, nu);
  REQUIRE(sum.values.size() == ana.values.size());
  // the only gap is the rect-vs-sampled-comb correction, ~(pi nu pitch)^2/6
  double rms = 0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    double d = sum.values[i] - ana.values[i];
    rms += d * d;
  }
  rms = std::sqrt(rms / nu.size());
  CHECK(rms < 2e-3);
  // and the fringe structure reads identically on both
  double ps = central_fringe_period(sum.axis, sum.values);
  double pa = central_fringe_period(ana.axis, ana.values);
  CHECK(ps == doctest::Approx(pa).epsilon(1e-3));
  CHECK(pa == doctest::Approx(1.0 / 302e-6).epsilon(5e-3));
}

TEST_CASE("dominant period of a near-tonal series") {
  int n = 400;
  double period = 17.3;
  std::vector<double> ax(n), v(n);
  for (int i = 0; i < n; ++i) {
    ax[i] = i * 0.5;
    v[i] = 2.0 + std::cos(2 * std::numbers::pi * ax[i] / period);
  }
  CHECK(dominant_period(ax, v) == doctest::Approx(period).epsilon(2e-3));
  std::vector<double> flat(n, 3.0);
  CHECK(dominant_period(ax, flat) == 0.0);
}

TEST_CASE("central fringe width: two-slit pattern gives the fringe period") {
  const double w = 105e-6, s = 302e-6;
  std::vector<double> nu = uniform_axis(-1.2e4, 1.2e4, 961);
  Pattern p = analytic_double_slit(w, s, nu);
  CHECK(central_fringe_period(p.axis, p.values) == doctest::Approx(1.0 / s).epsilon(5e-3));
}

TEST_CASE("central fringe width: single aperture gives twice the first zero") {
  const double a = 200e-6;
  std::vector<double> nu = uniform_axis(-1.5e4, 1.5e4, 1201);
  std::vector<double> v(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i) {
    double u = std::numbers::pi * nu[i] * a;
    v[i] = sinc(u) * sinc(u);
  }
  CHECK(central_fringe_period(nu, v) == doctest::Approx(2.0 / a).epsilon(1e-2));
}

TEST_CASE("central fringe width survives a noisy floor") {
  const double w = 105e-6, s = 302e-6;
  std::vector<double> nu = uniform_axis(-1.0e4, 1.0e4, 801);
  Pattern p = analytic_double_slit(w, s, nu);
  // deterministic 1% additive ripple, like residual ensemble noise
  for (std::size_t i = 0; i < p.values.size(); ++i)
    p.values[i] += 0.01 * (0.5 + 0.5 * std::sin(12.345 * i));
  CHECK(central_fringe_period(p.axis, p.values) == doctest::Approx(1.0 / s).epsilon(2e-2));
}

TEST_CASE("central fringe width throws when no minimum is inside the window") {
  std::vector<double> ax = uniform_axis(-1.0, 1.0, 64);
  std::vector<double> v(ax.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-ax[i] * ax[i]);
  CHECK_THROWS_AS(central_fringe_period(ax, v), std::invalid_argument);
}

TEST_CASE("pattern comparison: identity, scale invariance, disjoint axes") {
  std::vector<double> nu = uniform_axis(-8e3, 8e3, 501);
  Pattern p = analytic_double_slit(105e-6, 302e-6, nu);
  CompareReport self = compare_patterns(p, p);
  CHECK(self.rms_error == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(self.compared_samples == nu.size());

  Pattern scaled = p;
  for (double& v : scaled.values) v *= 5.0;
  CHECK(compare_patterns(p, scaled).rms_error == doctest::Approx(0.0).epsilon(1e-12));

  Pattern far = p;
  for (double& a : far.axis) a += 1e6;
  CHECK_THROWS_AS(compare_patterns(p, far), std::invalid_argument);
}

TEST_CASE("comparison resamples the reference onto the pattern axis") {
  std::vector<double> coarse = uniform_axis(-8e3, 8e3, 161);
  std::vector<double> fine = uniform_axis(-6e3, 6e3, 601);
  Pattern ref = analytic_double_slit(105e-6, 302e-6, coarse);
  Pattern pat = analytic_double_slit(105e-6, 302e-6, fine);
  CompareReport rep = compare_patterns(pat, ref);
  CHECK(rep.compared_samples == fine.size());
  // linear resampling of a curved reference leaves a small but nonzero residue
  CHECK(rep.rms_error < 0.02);
  CHECK(rep.fringe_period == doctest::Approx(1.0 / 302e-6).epsilon(1e-2));
}

TEST_CASE("crossed slits factor into 1D transforms") {
  // union of vertical and horizontal slit pairs: indicator
  // u(x,y) = a(x) + b(y) - a(x) b(y) inside the grid window, so the
  // transform is a rank-2 combination of 1D sums. Check the 2D direct-sum
  // pattern against that algebra computed independently here.
  Grid g(2, 32, 10e-6);
  const double w = 60e-6, sx = 120e-6, sy = 120e-6;
  Transmission obj = crossed_double_slit(w, sx, sy, g);

  std::vector<double> nu = uniform_axis(-3e4, 3e4, 25);
  Pattern p2 = fraunhofer_modulus(obj, nu);

  Grid g1(1, 32, 10e-6);
  Transmission pair_x = double_slit(w, sx, g1);
  Transmission pair_y = double_slit(w, sy, g1);
  auto line_sum = [&](const Transmission& t, bool window, double f) {
    cplx acc = 0;
    for (int i = 0; i < g1.n; ++i) {
      double amp = window ? 1.0 : t.at(i).real();
      double ph = -2 * std::numbers::pi * f * g1.coordinate(i);
      acc += amp * cplx(std::cos(ph), std::sin(ph));
    }
    return acc * g1.pitch;
  };

  double peak = 0;
  std::vector<double> expect(nu.size() * nu.size());
  for (std::size_t iy = 0; iy < nu.size(); ++iy)
    for (std::size_t ix = 0; ix < nu.size(); ++ix) {
      cplx ax = line_sum(pair_x, false, nu[ix]);
      cplx by = line_sum(pair_y, false, nu[iy]);
      cplx wx = line_sum(pair_x, true, nu[ix]);
      cplx wy = line_sum(pair_y, true, nu[iy]);
      cplx t = ax * wy + wx * by - ax * by;
      expect[iy * nu.size() + ix] = std::norm(t);
      peak = std::max(peak, std::norm(t));
    }
  for (double& v : expect) v /= peak;

  for (std::size_t i = 0; i < expect.size(); ++i)
    CHECK(p2.values[i] == doctest::Approx(expect[i]).epsilon(1e-9));
}

TEST_CASE("direct-sum work cap rejects absurd requests") {
  Grid g(2, 256, 4e-6);
  Transmission obj = crossed_double_slit(100e-6, 150e-6, 100e-6, g);
  std::vector<double> huge = uniform_axis(-1e5, 1e5, 40000);
  CHECK_THROWS_AS(fraunhofer_modulus(obj, huge), std::invalid_argument);
}
