#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "ghostsim/correlator.hpp"
#include "ghostsim/optics_core.hpp"
#include "ghostsim/source.hpp"

namespace ghostsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ObjectKind { double_slit, phase_grooves, crossed_double_slit, identity, from_file };
enum class EstimatorChoice { fixed_point, shift_averaged, both };

// Everything a run needs, straight from a sectioned key = value file.
// Distances in meters throughout ("_m" keys). Unknown sections or keys are
// hard errors with file:line positions; the [run] section is reserved for
// read-only report data and is skipped, so emitted metadata re-parses.
struct RunConfig {
  // [geometry]
  double wavelength = 0.532e-6;
  double d0 = 2.7e-3;
  double d1 = 0.060;
  double d2 = 0.075;
  double d_ref = 0.0;  // 0 = d1 + d2
  SourceProfile profile = SourceProfile::hard;

  // [grid]
  int dims = 1;
  int n = 8192;
  double pitch = 1.0e-6;
  // Propagation runs on a circularly wrapped frame pad_factor times the
  // detector span; 4 keeps the wrap replicas of a delta-correlated source far
  // enough out that they stop stretching the measured fringe comb.
  int pad_factor = 4;

  // [object]
  ObjectKind object = ObjectKind::double_slit;
  double width = 105e-6;
  double separation = 302e-6;       // also the x separation for crossed slits
  double separation_y = 100e-6;
  double depth = 0.5783e-6;
  double refractive_index = 1.46;
  double aperture = 2.0e-3;         // plate extent (phase plate / crossed-slit plate; 0 = unbounded)
  std::string object_path;          // from_file

  // [ensemble]
  std::uint64_t realizations = 10000;
  std::uint64_t master_seed = 1;
  EstimatorChoice estimator = EstimatorChoice::both;
  bool diagnostics = false;
  double test_point = 0.0;
  int workers = 0;                  // 0 = all hardware threads
  bool independent_arms = false;
  std::uint64_t checkpoint_every = 0;

  // [retrieval] -- optional section
  bool has_retrieval = false;
  bool retrieval_hio = true;        // false = error reduction
  int retrieval_iterations = 500;
  double retrieval_beta = 0.9;
  int retrieval_restarts = 11;
  double support_halfwidth = 450e-6;
  int retrieval_n = 1024;
  double retrieval_pitch = 1.0e-5;
  std::uint64_t retrieval_seed = 0;

  // [output]
  std::string out_dir = "out";
  double pattern_halfwidth = 0.0;   // 0 = estimator default
  bool write_csv = true;
  bool write_binary = true;
  bool write_pgm = true;            // 2D runs

  double resolved_d_ref() const { return d_ref > 0 ? d_ref : d1 + d2; }
  SetupGeometry geometry() const;
  Grid grid() const;
  CorrelatorModes modes() const;
  void validate() const;            // semantic checks beyond the grammar

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& name);

// Canonical text form: fixed key order, lossless doubles. parse(serialize(c))
// recovers c exactly.
std::string serialize_run_config(const RunConfig& cfg);

// Identity of the realization stream for checkpoint compatibility: hashes the
// physics and estimator setup but not realization count, worker count, or
// output options, so a run can resume with any of those changed.
std::uint64_t config_stream_hash(const RunConfig& cfg);

}  // namespace ghostsim
