#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ghostsim/correlator.hpp"
#include "ghostsim/objects.hpp"
#include "ghostsim/optics_core.hpp"
#include "ghostsim/source.hpp"

namespace ghostsim {

// Realizations per work unit. Fixed so the fold order -- and therefore every
// accumulated bit -- is identical for any worker count. Snapshot points must
// land on multiples of this.
inline constexpr std::uint64_t kEnsembleBlock = 100;

struct EnsembleConfig {
  SetupGeometry geometry;
  Grid grid;
  SourceProfile profile = SourceProfile::hard;
  std::uint64_t master_seed = 1;
  std::uint64_t realizations = 0;
  int pad_factor = 2;
  int workers = 1;
  double test_point = 0.0;  // fixed test-arm coordinate; in 2D both axes get this offset
  CorrelatorModes modes;
  // Diagnostic: feed the test arm from a statistically independent source
  // screen, which must kill the correlation peak like 1/sqrt(realizations).
  bool independent_arms = false;
  double pattern_halfwidth = 0.0;  // 0 = estimator default

  void validate() const;
  int fixed_sample_index() const;  // nearest detector sample to test_point
};

// The two detector planes for realization k, computed through the shared
// source leg: one padded field, split spectrally into the reference arm
// (distance d_ref) and the test arm (d1, then the object, then d2).
// A null object means an empty test bench; with the distances matched
// (d_ref = d1 + d2) the arms then come out bit-identical by construction.
ArmIntensities run_realization(const EnsembleConfig& cfg, const Transmission* obj,
                               std::uint64_t k);

struct EnsembleCallbacks {
  // Fired while folding finished blocks, in realization order.
  std::function<void(std::uint64_t done, std::uint64_t total)> on_progress;
  // Ascending counts (multiples of kEnsembleBlock) at which to hand out the
  // exact prefix accumulator, e.g. for convergence studies.
  std::vector<std::uint64_t> snapshots;
  std::function<void(const CorrelationAccumulator&, std::uint64_t done)> on_snapshot;
  // Checkpoint cadence in realizations (0 = never); rounded up to blocks.
  std::uint64_t checkpoint_every = 0;
  std::function<void(const CorrelationAccumulator&, std::uint64_t done)> on_checkpoint;
};

// Runs the ensemble to completion and returns the folded accumulator.
// Workers pull fixed-size blocks; block results are folded strictly in block
// order, so the result is bit-identical for any worker count, and resuming
// from a checkpointed accumulator (count a multiple of the block size)
// continues the identical stream.
CorrelationAccumulator run_ensemble(const EnsembleConfig& cfg, const Transmission* obj,
                                    const EnsembleCallbacks& callbacks = {},
                                    const CorrelationAccumulator* resume_from = nullptr);

// Classical comparison runs with the source replaced by a coherent plane
// wave. The direct shot: free-space propagation over d2, intensity plotted
// against displacement / (wavelength d2) -- near-field diffraction, NOT the
// modulus spectrum. The lens shot: a 2f system with f = d2, which does give
// the modulus spectrum on the same axis.
Pattern coherent_fresnel(const SetupGeometry& geom, const Transmission& obj, int pad_factor,
                         double halfwidth = 0.0);
Pattern coherent_lens(const SetupGeometry& geom, const Transmission& obj,
                      double halfwidth = 0.0);

}  // namespace ghostsim
