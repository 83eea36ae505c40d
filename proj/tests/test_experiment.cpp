#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "doctest.h"
#include "ghostsim/experiment.hpp"
#include "ghostsim/objects.hpp"
#include "ghostsim/oracle.hpp"

using namespace ghostsim;

namespace {

EnsembleConfig small_config(int n = 256) {
  EnsembleConfig cfg;
  cfg.geometry = SetupGeometry{0.532e-6, 200e-6, 5e-3, 5e-3, 10e-3};
  cfg.grid = Grid(1, n, 10e-6);
  cfg.master_seed = 17;
  cfg.realizations = 300;
  cfg.pad_factor = 2;
  cfg.workers = 1;
  cfg.modes = CorrelatorModes{true, true, true};
  return cfg;
}

double rel_rms(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    num += d * d;
    den += a[i] * a[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("empty bench with matched distances: the arms read out bit-identical") {
  EnsembleConfig cfg = small_config();
  ArmIntensities arms = run_realization(cfg, nullptr, 3);
  REQUIRE(arms.ref.size() == arms.test.size());
  for (std::size_t i = 0; i < arms.ref.size(); ++i) CHECK(arms.ref[i] == arms.test[i]);
}

TEST_CASE("a clear window behaves like no object at all") {
  EnsembleConfig cfg = small_config();
  Transmission window = identity_object(cfg.grid);
  ArmIntensities with = run_realization(cfg, &window, 5);
  ArmIntensities without = run_realization(cfg, nullptr, 5);
  // the reference leg never touches the object branch
  for (std::size_t i = 0; i < with.ref.size(); ++i) CHECK(with.ref[i] == without.ref[i]);
  // the test leg takes one extra transform round trip through the window
  CHECK(rel_rms(with.test, without.test) < 1e-12);
}

TEST_CASE("realizations are deterministic in every seed part") {
  EnsembleConfig cfg = small_config();
  ArmIntensities a = run_realization(cfg, nullptr, 11);
  ArmIntensities b = run_realization(cfg, nullptr, 11);
  for (std::size_t i = 0; i < a.ref.size(); ++i) {
    CHECK(a.ref[i] == b.ref[i]);
    CHECK(a.test[i] == b.test[i]);
  }
  ArmIntensities c = run_realization(cfg, nullptr, 12);
  double diff = 0;
  for (std::size_t i = 0; i < a.ref.size(); ++i) diff += std::abs(a.ref[i] - c.ref[i]);
  CHECK(diff > 0);

  EnsembleConfig other = cfg;
  other.master_seed = 18;
  ArmIntensities d = run_realization(other, nullptr, 11);
  diff = 0;
  for (std::size_t i = 0; i < a.ref.size(); ++i) diff += std::abs(a.ref[i] - d.ref[i]);
  CHECK(diff > 0);
}

TEST_CASE("decoupled arms keep the reference leg, redraw the test leg") {
  EnsembleConfig cfg = small_config();
  Transmission slit = double_slit(105e-6, 302e-6, cfg.grid);
  ArmIntensities coupled = run_realization(cfg, &slit, 2);
  EnsembleConfig indep = cfg;
  indep.independent_arms = true;
  ArmIntensities split = run_realization(indep, &slit, 2);
  for (std::size_t i = 0; i < coupled.ref.size(); ++i) CHECK(coupled.ref[i] == split.ref[i]);
  double diff = 0;
  for (std::size_t i = 0; i < coupled.test.size(); ++i)
    diff += std::abs(coupled.test[i] - split.test[i]);
  CHECK(diff > 0);
}

TEST_CASE("empty bench reads bit-identical in 2D as well") {
  EnsembleConfig cfg = small_config();
  cfg.geometry.d0 = 100e-6;
  cfg.grid = Grid(2, 32, 10e-6);
  ArmIntensities arms = run_realization(cfg, nullptr, 1);
  REQUIRE(arms.ref.size() == 32 * 32);
  for (std::size_t i = 0; i < arms.ref.size(); ++i) CHECK(arms.ref[i] == arms.test[i]);
}

TEST_CASE("worker count cannot change a single accumulated bit") {
  EnsembleConfig cfg = small_config(128);
  cfg.geometry.d0 = 150e-6;
  Transmission slit = double_slit(105e-6, 302e-6, cfg.grid);

  cfg.workers = 1;
  CorrelationAccumulator serial = run_ensemble(cfg, &slit);
  cfg.workers = 4;
  CorrelationAccumulator threaded = run_ensemble(cfg, &slit);

  CHECK(serial.count() == 300);
  CHECK(threaded.count() == 300);
  GhostResult s1 = serial.finalize_shift_averaged(cfg.geometry.wavelength, cfg.geometry.d2, 0.0);
  GhostResult s4 = threaded.finalize_shift_averaged(cfg.geometry.wavelength, cfg.geometry.d2, 0.0);
  REQUIRE(s1.pattern.values.size() == s4.pattern.values.size());
  for (std::size_t i = 0; i < s1.pattern.values.size(); ++i)
    CHECK(s1.pattern.values[i] == s4.pattern.values[i]);
  GhostResult f1 = serial.finalize_fixed_point(cfg.geometry.wavelength, cfg.geometry.d2, 0.0);
  GhostResult f4 = threaded.finalize_fixed_point(cfg.geometry.wavelength, cfg.geometry.d2, 0.0);
  for (std::size_t i = 0; i < f1.pattern.values.size(); ++i)
    CHECK(f1.pattern.values[i] == f4.pattern.values[i]);
  CHECK(serial.g2_at(cfg.fixed_sample_index()) == threaded.g2_at(cfg.fixed_sample_index()));
}

TEST_CASE("snapshots hand out the exact prefix accumulation") {
  EnsembleConfig cfg = small_config(128);
  cfg.workers = 2;
  std::map<std::uint64_t, std::unique_ptr<CorrelationAccumulator>> seen;
  EnsembleCallbacks cb;
  cb.snapshots = {100, 300};
  cb.on_snapshot = [&](const CorrelationAccumulator& acc, std::uint64_t done) {
    seen.emplace(done, std::make_unique<CorrelationAccumulator>(acc));
  };
  CorrelationAccumulator full = run_ensemble(cfg, nullptr, cb);
  REQUIRE(seen.size() == 2);
  REQUIRE(seen.count(100) == 1);
  CHECK(seen.at(100)->count() == 100);
  CHECK(seen.at(300)->count() == 300);

  EnsembleConfig short_cfg = cfg;
  short_cfg.realizations = 100;
  short_cfg.workers = 1;
  CorrelationAccumulator fresh = run_ensemble(short_cfg, nullptr);
  GhostResult a = seen.at(100)->finalize_shift_averaged(0.532e-6, 5e-3, 0.0);
  GhostResult b = fresh.finalize_shift_averaged(0.532e-6, 5e-3, 0.0);
  for (std::size_t i = 0; i < a.pattern.values.size(); ++i)
    CHECK(a.pattern.values[i] == b.pattern.values[i]);

  GhostResult c = seen.at(300)->finalize_shift_averaged(0.532e-6, 5e-3, 0.0);
  GhostResult d = full.finalize_shift_averaged(0.532e-6, 5e-3, 0.0);
  for (std::size_t i = 0; i < c.pattern.values.size(); ++i)
    CHECK(c.pattern.values[i] == d.pattern.values[i]);
}

TEST_CASE("a resumed run continues the identical stream") {
  EnsembleConfig cfg = small_config(128);
  cfg.workers = 2;
  Transmission slit = double_slit(105e-6, 302e-6, cfg.grid);

  std::unique_ptr<CorrelationAccumulator> at200;
  EnsembleCallbacks cb;
  cb.checkpoint_every = 100;
  cb.on_checkpoint = [&](const CorrelationAccumulator& acc, std::uint64_t done) {
    if (done == 200) at200 = std::make_unique<CorrelationAccumulator>(acc);
  };
  CorrelationAccumulator straight = run_ensemble(cfg, &slit, cb);
  REQUIRE(at200 != nullptr);
  REQUIRE(at200->count() == 200);

  CorrelationAccumulator resumed = run_ensemble(cfg, &slit, {}, at200.get());
  CHECK(resumed.count() == 300);
  GhostResult a = straight.finalize_shift_averaged(0.532e-6, 5e-3, 0.0);
  GhostResult b = resumed.finalize_shift_averaged(0.532e-6, 5e-3, 0.0);
  for (std::size_t i = 0; i < a.pattern.values.size(); ++i)
    CHECK(a.pattern.values[i] == b.pattern.values[i]);
}

TEST_CASE("ensemble configuration guards") {
  EnsembleConfig cfg = small_config();
  cfg.realizations = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.workers = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.workers = 65;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.test_point = 2e-3;  // past the detector edge
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.modes = CorrelatorModes{false, false, true};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.geometry.d_ref = 1e-3;  // shorter than d1
  CHECK_THROWS_AS(run_realization(cfg, nullptr, 0), std::invalid_argument);

  EnsembleCallbacks cb;
  cb.snapshots = {150};
  cfg = small_config();
  CHECK_THROWS_AS(run_ensemble(cfg, nullptr, cb), std::invalid_argument);

  // resuming needs a block-aligned count inside the requested total
  CorrelationAccumulator tiny(cfg.grid, cfg.modes, cfg.fixed_sample_index());
  CorrelatorWorkspace ws(cfg.grid);
  ArmIntensities arms = run_realization(cfg, nullptr, 0);
  tiny.accumulate(arms, ws);
  CHECK_THROWS_AS(run_ensemble(cfg, nullptr, {}, &tiny), std::invalid_argument);
}

TEST_CASE("nearest detector sample to the fixed test point") {
  EnsembleConfig cfg = small_config();
  cfg.test_point = 0.0;
  CHECK(cfg.fixed_sample_index() == 128);
  cfg.test_point = 3.7 * cfg.grid.pitch;
  CHECK(cfg.fixed_sample_index() == 132);
  cfg.test_point = -2.4 * cfg.grid.pitch;
  CHECK(cfg.fixed_sample_index() == 126);

  cfg.grid = Grid(2, 32, 10e-6);
  cfg.geometry.d0 = 100e-6;
  cfg.test_point = 2 * cfg.grid.pitch;
  CHECK(cfg.fixed_sample_index() == 18 * 32 + 18);
}

TEST_CASE("coherent shots: lens spectrum differs from near-field diffraction") {
  SetupGeometry geom{0.532e-6, 200e-6, 5e-3, 5e-3, 10e-3};
  Grid g(1, 1024, 10e-6);
  Transmission slit = double_slit(105e-6, 302e-6, g);
  Pattern lens = coherent_lens(geom, slit, 2e-3);
  Pattern fres = coherent_fresnel(geom, slit, 2, 2e-3);
  CHECK(lens.kind == AxisKind::frequency);
  CHECK(fres.kind == AxisKind::frequency);

  // the 2f system reads out the modulus spectrum: match the direct sum
  Pattern oracle = fraunhofer_modulus(slit, lens.axis);
  CompareReport rep = compare_patterns(lens, oracle);
  CHECK(rep.rms_error < 1e-6);

  // at this distance the slits are far from the far field, so the direct
  // shot must look nothing like the spectrum
  CompareReport rep2 = compare_patterns(fres, oracle);
  CHECK(rep2.rms_error > 0.10);
  CHECK(fraunhofer_distance(407e-6, geom.wavelength) > geom.d2);
}
