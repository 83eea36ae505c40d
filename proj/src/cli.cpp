#include "ghostsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ghostsim/array_io.hpp"
#include "ghostsim/experiment.hpp"
#include "ghostsim/oracle.hpp"
#include "ghostsim/propagate.hpp"
#include "ghostsim/retrieval.hpp"

namespace ghostsim::cli {
namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Object described by the config; null means an empty bench, which the
// engine treats exactly (no object-plane round trip at all).
std::unique_ptr<Transmission> make_object(const RunConfig& cfg) {
  Grid g = cfg.grid();
  switch (cfg.object) {
    case ObjectKind::double_slit:
      return std::make_unique<Transmission>(double_slit(cfg.width, cfg.separation, g));
    case ObjectKind::phase_grooves:
      return std::make_unique<Transmission>(phase_grooves(
          cfg.width, cfg.separation, cfg.depth, cfg.refractive_index, cfg.wavelength,
          cfg.aperture, g));
    case ObjectKind::crossed_double_slit:
      return std::make_unique<Transmission>(
          crossed_double_slit(cfg.width, cfg.separation, cfg.separation_y, g, cfg.aperture));
    case ObjectKind::identity:
      return nullptr;
    case ObjectKind::from_file:
      return std::make_unique<Transmission>(transmission_from_file(cfg.object_path, g));
  }
  return nullptr;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return std::clamp(hw == 0 ? 1 : static_cast<int>(hw), 1, 64);
}

EnsembleConfig ensemble_config(const RunConfig& cfg) {
  EnsembleConfig ens;
  ens.geometry = cfg.geometry();
  ens.grid = cfg.grid();
  ens.profile = cfg.profile;
  ens.master_seed = cfg.master_seed;
  ens.realizations = cfg.realizations;
  ens.pad_factor = cfg.pad_factor;
  ens.workers = resolve_workers(cfg.workers);
  ens.test_point = cfg.test_point;
  ens.modes = cfg.modes();
  ens.independent_arms = cfg.independent_arms;
  ens.pattern_halfwidth = cfg.pattern_halfwidth;
  return ens;
}

void write_pattern_files(const RunConfig& cfg, const Pattern& p, const std::string& stem) {
  fs::path dir(cfg.out_dir);
  if (cfg.write_csv) write_pattern_csv((dir / (stem + ".csv")).string(), p);
  if (cfg.write_binary) write_pattern_array((dir / (stem + ".bin")).string(), p);
  if (cfg.write_pgm && p.dims == 2) {
    int n = static_cast<int>(p.axis.size());
    write_pgm16((dir / (stem + ".pgm")).string(), n, n, p.values);
  }
}

// Linear interpolation on a 1D pattern, zero outside the stored axis.
double sample_pattern(const Pattern& p, double x) {
  const std::vector<double>& a = p.axis;
  if (x < a.front() || x > a.back()) return 0.0;
  std::size_t hi =
      static_cast<std::size_t>(std::upper_bound(a.begin(), a.end(), x) - a.begin());
  if (hi == 0) return p.values.front();
  if (hi >= a.size()) return p.values.back();
  std::size_t lo = hi - 1;
  double w = (x - a[lo]) / (a[hi] - a[lo]);
  return p.values[lo] + w * (p.values[hi] - p.values[lo]);
}

// Shared by `retrieve` and the optional retrieval stage of `simulate`.
// The stored pattern is the (peak-normalized) squared modulus on a
// spatial-frequency axis; resample it onto the centered DFT bins of the
// retrieval grid and take the square root.
void retrieve_from_pattern(const RunConfig& cfg, const Pattern& p) {
  if (p.dims != 1)
    throw std::invalid_argument("retrieve: only 1D patterns are supported");
  if (p.kind != AxisKind::frequency)
    throw std::invalid_argument("retrieve: pattern must be on a spatial-frequency axis");

  Grid g(1, cfg.retrieval_n, cfg.retrieval_pitch);
  RetrievalProblem prob;
  prob.grid = g;
  prob.modulus.resize(g.sample_count());
  for (int j = 0; j < g.n; ++j) {
    double f = (j - g.n / 2) / (g.n * g.pitch);
    prob.modulus[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, sample_pattern(p, f)));
  }
  prob.support.resize(g.sample_count());
  for (int j = 0; j < g.n; ++j)
    prob.support[static_cast<std::size_t>(j)] =
        std::abs(g.coordinate(j)) <= cfg.support_halfwidth ? 1 : 0;
  prob.max_iterations = cfg.retrieval_iterations;
  prob.beta = cfg.retrieval_beta;
  prob.master_seed = cfg.master_seed;

  RetrievalReport best;
  bool have = false;
  for (int r = 0; r < cfg.retrieval_restarts; ++r) {
    prob.init_index = cfg.retrieval_seed + static_cast<std::uint64_t>(r);
    RetrievalReport rep = cfg.retrieval_hio ? hio(prob) : error_reduction(prob);
    std::printf("  restart %2d: modulus residual %.4g (iteration %d)\n", r, rep.best_error,
                rep.best_iteration);
    if (!have || rep.best_error < best.best_error) {
      best = std::move(rep);
      have = true;
    }
  }

  fs::create_directories(cfg.out_dir);
  Pattern obj{1, AxisKind::displacement, g.axis(), best.object};
  if (cfg.write_csv)
    write_pattern_csv((fs::path(cfg.out_dir) / "retrieved_object.csv").string(), obj);
  if (cfg.write_binary)
    write_pattern_array((fs::path(cfg.out_dir) / "retrieved_object.bin").string(), obj);

  std::ofstream hist((fs::path(cfg.out_dir) / "retrieval_errors.csv").string());
  hist << "# columns: iteration,residual\n";
  for (std::size_t i = 0; i < best.error_history.size(); ++i)
    hist << i << "," << fmt17(best.error_history[i]) << "\n";

  std::printf("best restart: residual %.4g; object written to %s\n", best.best_error,
              cfg.out_dir.c_str());
}

std::string run_metadata(const RunConfig& cfg, int workers_used,
                         const CorrelationAccumulator& acc,
                         const std::vector<std::pair<std::string, GhostResult>>& results,
                         const Transmission* obj) {
  std::ostringstream os;
  os << serialize_run_config(cfg);
  os << "\n[run]\n";
  os << "version = " << kVersion << "\n";
  os << "fourier_condition_met = "
     << (cfg.geometry().fourier_condition_met() ? "true" : "false") << "\n";
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(config_stream_hash(cfg)));
  os << "stream_hash = " << hex << "\n";
  os << "realizations_done = " << acc.count() << "\n";
  os << "workers_used = " << workers_used << "\n";
  // Worst-case kernel chirp across the legs vs what the padded frame can
  // sample. The speckle spectrum is white out to Nyquist, so with a fine
  // pitch this will flag; the wrapped orders carry no correlation, only a
  // flat background, but the flag records that they are there.
  double dmax = std::max(cfg.resolved_d_ref(), cfg.d1 + cfg.d2);
  double blim = alias_free_band_limit(cfg.wavelength, dmax, cfg.pad_factor * cfg.n, cfg.pitch);
  os << "alias_free_band_limit_per_m = " << fmt17(blim) << "\n";
  os << "source_band_exceeds_limit = " << (0.5 / cfg.pitch > blim ? "true" : "false") << "\n";
  for (const auto& [stem, r] : results) {
    os << stem << "_raw_peak = " << fmt17(r.raw_peak) << "\n";
    os << stem << "_min_before_clamp = " << fmt17(r.min_before_clamp) << "\n";
  }
  if (acc.modes().diagnostics)
    os << "g2_fixed_point = " << fmt17(acc.g2_at(acc.fixed_sample())) << "\n";
  if (obj) {
    os << "object_label = " << obj->label << "\n";
    if (obj->clamped_samples > 0) os << "object_clamped_samples = " << obj->clamped_samples << "\n";
  }
  return os.str();
}

}  // namespace

int run_simulate(const RunConfig& cfg) {
  std::unique_ptr<Transmission> obj = make_object(cfg);
  EnsembleConfig ens = ensemble_config(cfg);
  ens.validate();
  fs::create_directories(cfg.out_dir);

  std::printf("simulate: %dD n=%d pitch=%g m, %llu realizations, %d workers, %s\n", cfg.dims,
              cfg.n, cfg.pitch, static_cast<unsigned long long>(cfg.realizations), ens.workers,
              obj ? obj->label.c_str() : "empty bench");

  std::uint64_t hash = config_stream_hash(cfg);
  fs::path ckpath = fs::path(cfg.out_dir) / "checkpoint.bin";
  std::unique_ptr<CorrelationAccumulator> resume;
  if (cfg.checkpoint_every > 0 && fs::exists(ckpath)) {
    try {
      Checkpoint c = read_checkpoint(ckpath.string());
      if (c.config_hash == hash && c.realizations_done % kEnsembleBlock == 0 &&
          c.realizations_done <= cfg.realizations) {
        resume = std::make_unique<CorrelationAccumulator>(CorrelationAccumulator::from_checkpoint(
            c, ens.grid, ens.modes, ens.fixed_sample_index()));
        std::printf("resuming from checkpoint at %llu realizations\n",
                    static_cast<unsigned long long>(c.realizations_done));
      } else {
        std::fprintf(stderr, "%s does not match this run; starting fresh\n",
                     ckpath.string().c_str());
      }
    } catch (const FormatError& e) {
      std::fprintf(stderr, "ignoring unreadable checkpoint: %s\n", e.what());
    }
  }

  EnsembleCallbacks cb;
  std::uint64_t total = cfg.realizations;
  std::uint64_t stride =
      std::max<std::uint64_t>(kEnsembleBlock, total / 10 / kEnsembleBlock * kEnsembleBlock);
  std::uint64_t next_mark = stride;
  cb.on_progress = [&](std::uint64_t done, std::uint64_t tot) {
    if (done >= next_mark || done == tot) {
      std::printf("  %llu / %llu\n", static_cast<unsigned long long>(done),
                  static_cast<unsigned long long>(tot));
      std::fflush(stdout);
      while (next_mark <= done) next_mark += stride;
    }
  };
  if (cfg.checkpoint_every > 0) {
    cb.checkpoint_every = cfg.checkpoint_every;
    cb.on_checkpoint = [&](const CorrelationAccumulator& a, std::uint64_t) {
      write_checkpoint(ckpath.string(), a.to_checkpoint(hash));
    };
  }

  CorrelationAccumulator acc = run_ensemble(ens, obj.get(), cb, resume.get());

  std::vector<std::pair<std::string, GhostResult>> results;
  if (ens.modes.shift_averaged)
    results.emplace_back("pattern_shift_averaged",
                         acc.finalize_shift_averaged(cfg.wavelength, cfg.d2, cfg.pattern_halfwidth));
  if (ens.modes.fixed_point)
    results.emplace_back("pattern_fixed_point",
                         acc.finalize_fixed_point(cfg.wavelength, cfg.d2, cfg.pattern_halfwidth));

  for (const auto& [stem, r] : results) {
    write_pattern_files(cfg, r.pattern, stem);
    std::printf("%s: raw peak %.6g, clamped min %.3g\n", stem.c_str(), r.raw_peak,
                r.min_before_clamp);
  }
  if (ens.modes.diagnostics) {
    Grid g = cfg.grid();
    Pattern mr{cfg.dims, AxisKind::displacement, g.axis(), acc.mean_ref()};
    Pattern mt{cfg.dims, AxisKind::displacement, g.axis(), acc.mean_test()};
    write_pattern_csv((fs::path(cfg.out_dir) / "mean_reference.csv").string(), mr);
    write_pattern_csv((fs::path(cfg.out_dir) / "mean_test.csv").string(), mt);
  }

  std::ofstream meta((fs::path(cfg.out_dir) / "run_metadata.ini").string());
  meta << run_metadata(cfg, ens.workers, acc, results, obj.get());
  meta.close();

  if (cfg.has_retrieval && !results.empty()) {
    std::printf("retrieval from %s:\n", results.front().first.c_str());
    retrieve_from_pattern(cfg, results.front().second.pattern);
  }

  if (cfg.checkpoint_every > 0) {
    std::error_code rm;
    fs::remove(ckpath, rm);
  }
  return 0;
}

int run_oracle(const RunConfig& cfg) {
  std::unique_ptr<Transmission> owned = make_object(cfg);
  Transmission obj = owned ? *owned : identity_object(cfg.grid());
  Grid g = cfg.grid();
  std::vector<double> nu = frequency_axis(g, cfg.wavelength, cfg.d2);
  if (cfg.dims == 2) {
    // keep the direct sum tractable: at most ~129 points per axis, centered
    int step = std::max(1, (g.n + 128) / 129);
    std::vector<double> sub;
    for (int i = (g.n / 2) % step; i < g.n; i += step)
      sub.push_back(nu[static_cast<std::size_t>(i)]);
    nu = std::move(sub);
  }
  Pattern p = fraunhofer_modulus(obj, nu);
  fs::create_directories(cfg.out_dir);
  fs::path dir(cfg.out_dir);
  if (cfg.write_csv) write_pattern_csv((dir / "oracle_pattern.csv").string(), p);
  if (cfg.write_binary) write_pattern_array((dir / "oracle_pattern.bin").string(), p);
  std::printf("oracle pattern for %s: %zu axis points, written to %s\n", obj.label.c_str(),
              p.axis.size(), cfg.out_dir.c_str());
  return 0;
}

int run_coherent(const RunConfig& cfg, const std::string& mode) {
  std::unique_ptr<Transmission> owned = make_object(cfg);
  Transmission obj = owned ? *owned : identity_object(cfg.grid());
  Pattern p = mode == "lens_2f"
                  ? coherent_lens(cfg.geometry(), obj, cfg.pattern_halfwidth)
                  : coherent_fresnel(cfg.geometry(), obj, cfg.pad_factor, cfg.pattern_halfwidth);
  fs::create_directories(cfg.out_dir);
  fs::path dir(cfg.out_dir);
  std::string stem = "coherent_" + mode;
  if (cfg.write_csv) write_pattern_csv((dir / (stem + ".csv")).string(), p);
  if (cfg.write_binary) write_pattern_array((dir / (stem + ".bin")).string(), p);
  std::printf("%s pattern for %s written to %s\n", stem.c_str(), obj.label.c_str(),
              cfg.out_dir.c_str());
  return 0;
}

int run_retrieve(const RunConfig& cfg, const std::string& pattern_path) {
  Pattern p = read_pattern_csv(pattern_path);
  retrieve_from_pattern(cfg, p);
  return 0;
}

int run_speckle_stats(const RunConfig& cfg) {
  if (cfg.dims != 1)
    throw std::invalid_argument("speckle-stats: 1D grids only");
  SpeckleSpec spec{cfg.grid(), cfg.d0, cfg.profile};
  SpeckleStatsResult st = measure_intensity_autocovariance(spec, cfg.wavelength, cfg.d1,
                                                           cfg.realizations, cfg.master_seed);

  // Reference-arm intensity statistics on an otherwise empty bench.
  EnsembleConfig ens = ensemble_config(cfg);
  ens.modes = CorrelatorModes{true, false, true};
  ens.independent_arms = false;
  ens.validate();
  CorrelationAccumulator acc = run_ensemble(ens, nullptr);
  std::vector<double> mr = acc.mean_ref();
  double mx = *std::max_element(mr.begin(), mr.end());
  double g2_sum = 0.0;
  int g2_cnt = 0;
  for (int i = 0; i < static_cast<int>(mr.size()); ++i) {
    if (mr[static_cast<std::size_t>(i)] > 0.5 * mx) {
      g2_sum += acc.g2_at(i);
      ++g2_cnt;
    }
  }

  fs::create_directories(cfg.out_dir);
  Pattern cov{1, AxisKind::displacement, st.lag_axis, st.autocovariance};
  write_pattern_csv((fs::path(cfg.out_dir) / "autocovariance.csv").string(), cov);

  std::printf("speckle statistics at d1 = %g m, %llu realizations (pad %d):\n", cfg.d1,
              static_cast<unsigned long long>(st.realizations), st.pad_factor_used);
  std::printf("  intensity autocovariance fwhm: %.6g m\n", st.fwhm);
  std::printf("  coherence scale wavelength*d1/d0: %.6g m\n",
              transverse_coherence_length(cfg.wavelength, cfg.d1, cfg.d0));
  std::printf("  reference-arm g2 over the lit window (%d samples): %.4f\n", g2_cnt,
              g2_cnt > 0 ? g2_sum / g2_cnt : 0.0);
  return 0;
}

int run_compare(const std::string& pattern_path, const std::string& reference_path) {
  Pattern a = read_pattern_csv(pattern_path);
  Pattern b = read_pattern_csv(reference_path);
  CompareReport rep = compare_patterns(a, b);
  double worst = 0.0;
  for (double off : rep.peak_offsets) worst = std::max(worst, std::abs(off));
  std::printf("compared %zu samples\n", rep.compared_samples);
  std::printf("rms difference: %.6g (fraction of peak)\n", rep.rms_error);
  std::printf("central fringe period: %.6g vs reference %.6g\n", rep.fringe_period,
              rep.reference_period);
  std::printf("matched peaks: %zu, largest offset %.6g\n", rep.peak_offsets.size(), worst);
  return 0;
}

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"two-arm speckle correlation bench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    int workers = -1;
    std::int64_t seed = -1;
    std::int64_t realizations = -1;
  };
  auto add_common = [](CLI::App* s, CommonOpts& o) {
    s->add_option("--config", o.config_path, "run configuration file")
        ->check(CLI::ExistingFile);
    s->add_option("--out", o.out_dir, "output directory (overrides config)");
    s->add_option("--workers", o.workers, "worker threads, 0 = all cores (overrides config)")
        ->check(CLI::NonNegativeNumber);
    s->add_option("--seed", o.seed, "master seed (overrides config)")
        ->check(CLI::NonNegativeNumber);
    s->add_option("--realizations", o.realizations, "ensemble size (overrides config)")
        ->check(CLI::PositiveNumber);
  };
  auto load_config = [](const CommonOpts& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : parse_run_config(o.config_path);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.workers >= 0) cfg.workers = o.workers;
    if (o.seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(o.seed);
    if (o.realizations > 0) cfg.realizations = static_cast<std::uint64_t>(o.realizations);
    cfg.validate();
    return cfg;
  };

  CommonOpts so, oo, co, ro, po;
  std::string mode = "fresnel_d2";
  std::string pattern_path, cmp_a, cmp_b;

  CLI::App* sim =
      app.add_subcommand("simulate", "run the speckle ensemble and correlate the arms");
  add_common(sim, so);
  CLI::App* orc =
      app.add_subcommand("oracle", "direct-sum far-field pattern of the configured object");
  add_common(orc, oo);
  CLI::App* coh =
      app.add_subcommand("coherent", "single-shot coherent bench (free space or 2f lens)");
  add_common(coh, co);
  coh->add_option("--mode", mode, "fresnel_d2 | lens_2f")
      ->check(CLI::IsMember({"fresnel_d2", "lens_2f"}));
  CLI::App* ret = app.add_subcommand("retrieve", "recover the object from a stored pattern");
  add_common(ret, ro);
  ret->add_option("--pattern", pattern_path, "pattern CSV to invert")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::App* spk =
      app.add_subcommand("speckle-stats", "source coherence scale and reference-arm moments");
  add_common(spk, po);
  CLI::App* cmp = app.add_subcommand("compare", "compare two stored patterns");
  cmp->add_option("pattern", cmp_a, "measured pattern CSV")->required()->check(CLI::ExistingFile);
  cmp->add_option("reference", cmp_b, "reference pattern CSV")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sim)) return run_simulate(load_config(so));
    if (app.got_subcommand(orc)) return run_oracle(load_config(oo));
    if (app.got_subcommand(coh)) return run_coherent(load_config(co), mode);
    if (app.got_subcommand(ret)) return run_retrieve(load_config(ro), pattern_path);
    if (app.got_subcommand(spk)) return run_speckle_stats(load_config(po));
    if (app.got_subcommand(cmp)) return run_compare(cmp_a, cmp_b);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "file format error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace ghostsim::cli
