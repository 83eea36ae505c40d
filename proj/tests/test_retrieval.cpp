#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ghostsim/retrieval.hpp"

using namespace ghostsim;

namespace {

// centered-bin modulus of a real object, by direct sum
std::vector<double> modulus_of(const Grid& g, const std::vector<double>& obj) {
  std::vector<double> mod(obj.size());
  int n = g.n;
  for (int b = 0; b < n; ++b) {
    double f = (b - n / 2) / (n * g.pitch);
    cplx acc = 0;
    for (int i = 0; i < n; ++i) {
      double ph = -2 * std::numbers::pi * f * g.coordinate(i);
      acc += obj[static_cast<std::size_t>(i)] * cplx(std::cos(ph), std::sin(ph));
    }
    mod[static_cast<std::size_t>(b)] = std::abs(acc);
  }
  return mod;
}

RetrievalProblem slit_problem(int iterations = 400) {
  Grid g(1, 128, 10e-6);
  std::vector<double> truth(128, 0.0);
  for (int i = 54; i < 60; ++i) truth[i] = 1.0;
  for (int i = 70; i < 76; ++i) truth[i] = 1.0;
  RetrievalProblem p;
  p.grid = g;
  p.modulus = modulus_of(g, truth);
  p.support.assign(128, 0);
  for (int i = 34; i < 94; ++i) p.support[i] = 1;
  p.max_iterations = iterations;
  p.master_seed = 5;
  return p;
}

}  // namespace

TEST_CASE("exact modulus of a supported object is a fixed point") {
  Grid g(1, 64, 10e-6);
  std::vector<double> truth(64, 0.0);
  for (int i = 28; i < 34; ++i) truth[i] = 1.0 + 0.1 * (i - 28);
  RetrievalProblem p;
  p.grid = g;
  p.modulus = modulus_of(g, truth);
  p.support.assign(64, 0);
  for (int i = 20; i < 44; ++i) p.support[i] = 1;
  p.max_iterations = 300;

  RetrievalReport r = error_reduction(p);
  CHECK(r.error_history.size() <= 300);
  // the measured modulus is reproduced almost exactly...
  CHECK(r.best_error < 1e-3);
  // ...but a short discrete object admits nearly-equivalent sign-flip
  // solutions, so the reconstruction is only guaranteed close, not exact
  double err = reconstruction_error(r.object, truth);
  CHECK(err < 0.2);
}

TEST_CASE("error reduction never increases the residual") {
  RetrievalProblem p = slit_problem(250);
  RetrievalReport r = error_reduction(p);
  REQUIRE(r.error_history.size() >= 2);
  for (std::size_t i = 1; i < r.error_history.size(); ++i)
    CHECK(r.error_history[i] <= r.error_history[i - 1] + 1e-12);
}

TEST_CASE("hybrid input-output recovers a double slit through its ambiguities") {
  RetrievalProblem p = slit_problem(600);
  Grid g = p.grid;
  std::vector<double> truth(128, 0.0);
  for (int i = 54; i < 60; ++i) truth[i] = 1.0;
  for (int i = 70; i < 76; ++i) truth[i] = 1.0;

  double best = 1.0;
  for (std::uint64_t init = 0; init < 5; ++init) {
    RetrievalProblem q = p;
    q.init_index = init;
    RetrievalReport r = hio(q);
    double corr = 0;
    double err = reconstruction_error(r.object, truth, &corr);
    if (err < best) best = err;
    CHECK(corr >= 0.0);
  }
  CHECK(best < 0.1);
}

TEST_CASE("report bookkeeping: best iterate matches its recorded residual") {
  RetrievalProblem p = slit_problem(150);
  p.init_index = 3;
  RetrievalReport r = hio(p);
  REQUIRE(!r.error_history.empty());
  CHECK(r.best_iteration >= 0);
  CHECK(r.best_iteration < static_cast<int>(r.error_history.size()));
  double floor = r.error_history[0];
  for (double e : r.error_history) floor = std::min(floor, e);
  CHECK(r.best_error == doctest::Approx(floor).epsilon(1e-12));
  CHECK(r.object.size() == p.modulus.size());
  for (std::size_t i = 0; i < r.object.size(); ++i) {
    CHECK(r.object[i] >= 0.0);
    if (!p.support[i]) CHECK(r.object[i] == 0.0);
  }
}

TEST_CASE("identical seeds reproduce the iteration bit for bit") {
  RetrievalProblem p = slit_problem(80);
  RetrievalReport a = hio(p);
  RetrievalReport b = hio(p);
  REQUIRE(a.error_history.size() == b.error_history.size());
  for (std::size_t i = 0; i < a.error_history.size(); ++i)
    CHECK(a.error_history[i] == b.error_history[i]);
  for (std::size_t i = 0; i < a.object.size(); ++i) CHECK(a.object[i] == b.object[i]);

  RetrievalProblem q = p;
  q.init_index = 1;
  RetrievalReport c = hio(q);
  double diff = 0;
  for (std::size_t i = 0; i < a.object.size(); ++i) diff += std::abs(a.object[i] - c.object[i]);
  CHECK(diff > 0);
}

TEST_CASE("reconstruction distance forgives shift, mirror, and scale") {
  std::vector<double> truth(64, 0.0);
  for (int i = 20; i < 27; ++i) truth[i] = 2.0 + (i % 3);

  SUBCASE("identity") {
    CHECK(reconstruction_error(truth, truth) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("circular shift") {
    std::vector<double> shifted(64);
    for (int i = 0; i < 64; ++i) shifted[(i + 13) % 64] = truth[i];
    CHECK(reconstruction_error(shifted, truth) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("mirror image") {
    std::vector<double> mirrored(64);
    for (int i = 0; i < 64; ++i) mirrored[(64 - i) % 64] = truth[i];
    CHECK(reconstruction_error(mirrored, truth) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("positive scale") {
    std::vector<double> scaled = truth;
    for (double& v : scaled) v *= 7.5;
    double corr = 0;
    CHECK(reconstruction_error(scaled, truth, &corr) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(corr == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("genuinely different objects stay distant") {
    std::vector<double> other(64, 0.0);
    for (int i = 5; i < 40; ++i) other[i] = ((i * 7) % 5) * 0.5;
    double corr = 0;
    double err = reconstruction_error(other, truth, &corr);
    CHECK(err > 0.2);
    CHECK(corr < 0.98);
  }
}

TEST_CASE("problem validation") {
  RetrievalProblem p = slit_problem();
  p.modulus.pop_back();
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = slit_problem();
  p.support.assign(p.support.size(), 0);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = slit_problem();
  p.max_iterations = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = slit_problem();
  p.modulus[3] = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = slit_problem();
  Grid g2(2, 16, 1e-6);
  p.grid = g2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
