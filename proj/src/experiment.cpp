#include "ghostsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "ghostsim/fft.hpp"
#include "ghostsim/propagate.hpp"

namespace ghostsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t frame_count(int dims, int m) {
  return (dims == 1) ? static_cast<std::size_t>(m)
                     : static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
}

// Everything realization-independent, shared read-only by all workers.
struct EnsembleTables {
  int m = 0;      // padded frame edge
  int off = 0;    // embedding offset per axis
  std::vector<double> amp;        // source amplitude, unpadded
  std::vector<cplx> object_pad;   // object on the padded frame (empty when no object)
  std::vector<cplx> h_d1;         // source -> object leg
  std::vector<cplx> h_rest;       // object plane -> reference detector (d_ref - d1)
  std::vector<cplx> h_d2;         // object -> test detector
  bool rest_equals_d2 = false;    // matched distances: share one table

  EnsembleTables(const EnsembleConfig& cfg, const Transmission* obj) {
    const Grid& g = cfg.grid;
    m = g.n * cfg.pad_factor;
    off = (m - g.n) / 2;
    SpeckleSpec spec{g, cfg.geometry.d0, cfg.profile};
    amp = source_amplitude(spec);
    if (obj) {
      object_pad.assign(frame_count(g.dims, m), cplx(obj->pad_fill));
      if (g.dims == 1) {
        for (int i = 0; i < g.n; ++i)
          object_pad[static_cast<std::size_t>(off + i)] = obj->t[static_cast<std::size_t>(i)];
      } else {
        for (int r = 0; r < g.n; ++r)
          std::copy(obj->t.begin() + static_cast<std::size_t>(r) * g.n,
                    obj->t.begin() + static_cast<std::size_t>(r + 1) * g.n,
                    object_pad.begin() + static_cast<std::size_t>(r + off) * m + off);
      }
    }
    double wl = cfg.geometry.wavelength;
    h_d1 = transfer_table(cfg.geometry.d1, wl, g);
    h_d2 = transfer_table(cfg.geometry.d2, wl, g);
    double rest = cfg.geometry.d_ref - cfg.geometry.d1;
    if (rest < 0)
      throw std::invalid_argument("ensemble: reference distance must be at least d1");
    rest_equals_d2 = (rest == cfg.geometry.d2);
    if (!rest_equals_d2) h_rest = transfer_table(rest, wl, g);
  }

  const std::vector<cplx>& rest_table() const { return rest_equals_d2 ? h_d2 : h_rest; }

 private:
  std::vector<cplx> transfer_table(double dist, double wl, const Grid& g) const {
    std::vector<cplx> h(frame_count(g.dims, m));
    double inv_wl2 = 1.0 / (wl * wl);
    if (g.dims == 1) {
      for (int i = 0; i < m; ++i) {
        double f = fft::bin_frequency(i, m, g.pitch);
        double rad = inv_wl2 - f * f;
        h[static_cast<std::size_t>(i)] =
            (rad <= 0) ? cplx(0.0) : std::polar(1.0, kTwoPi * dist * std::sqrt(rad));
      }
    } else {
      for (int r = 0; r < m; ++r) {
        double fy = fft::bin_frequency(r, m, g.pitch);
        for (int c = 0; c < m; ++c) {
          double fx = fft::bin_frequency(c, m, g.pitch);
          double rad = inv_wl2 - fx * fx - fy * fy;
          h[static_cast<std::size_t>(r) * m + c] =
              (rad <= 0) ? cplx(0.0) : std::polar(1.0, kTwoPi * dist * std::sqrt(rad));
        }
      }
    }
    return h;
  }
};

// Per-worker buffers running the five-transform pipeline.
class RealizationEngine {
 public:
  RealizationEngine(const EnsembleConfig& cfg, const EnsembleTables& tables)
      : cfg_(cfg),
        tables_(tables),
        frame_(frame_count(cfg.grid.dims, tables.m)),
        spec_(frame_count(cfg.grid.dims, tables.m)),
        mid_(frame_count(cfg.grid.dims, tables.m)) {}

  void compute(std::uint64_t k, ArmIntensities& out) {
    const Grid& g = cfg_.grid;
    out.grid = g;
    out.ref.resize(static_cast<std::size_t>(g.sample_count()));
    out.test.resize(out.ref.size());

    fill_source(k, StreamContext::speckle_phase);
    fft::c2c_forward(frame_.data(), g.dims, tables_.m);          // source spectrum
    std::copy(frame_.data(), frame_.data() + count_(), spec_.data());

    if (!cfg_.independent_arms) {
      // Shared leg: spectrum times H(d1) serves both arms.
      multiply(spec_.data(), tables_.h_d1);
      if (!tables_.object_pad.empty()) {
        std::copy(spec_.data(), spec_.data() + count_(), mid_.data());
        fft::c2c_backward(mid_.data(), g.dims, tables_.m);       // field at the object
        for (std::size_t i = 0; i < count_(); ++i) mid_.data()[i] *= tables_.object_pad[i];
        fft::c2c_forward(mid_.data(), g.dims, tables_.m);
        multiply(mid_.data(), tables_.h_d2);
        fft::c2c_backward(mid_.data(), g.dims, tables_.m);       // test detector
        crop_intensity(mid_.data(), out.test);
      } else {
        // Empty bench: the mid-plane round trip is the identity, so the test
        // arm is the d1 + d2 kernel applied directly.
        std::copy(spec_.data(), spec_.data() + count_(), mid_.data());
        multiply(mid_.data(), tables_.h_d2);
        fft::c2c_backward(mid_.data(), g.dims, tables_.m);
        crop_intensity(mid_.data(), out.test);
      }
      multiply(spec_.data(), tables_.rest_table());
      fft::c2c_backward(spec_.data(), g.dims, tables_.m);        // reference detector
      crop_intensity(spec_.data(), out.ref);
      return;
    }

    // Decoupled arms: reference from this screen, test from an independent
    // screen drawn under a different stream context.
    multiply(spec_.data(), tables_.h_d1);
    multiply(spec_.data(), tables_.rest_table());
    fft::c2c_backward(spec_.data(), g.dims, tables_.m);
    crop_intensity(spec_.data(), out.ref);

    fill_source(k, StreamContext::decoupled_arm);
    fft::c2c_forward(frame_.data(), g.dims, tables_.m);
    multiply(frame_.data(), tables_.h_d1);
    fft::c2c_backward(frame_.data(), g.dims, tables_.m);
    if (!tables_.object_pad.empty())
      for (std::size_t i = 0; i < count_(); ++i) frame_.data()[i] *= tables_.object_pad[i];
    fft::c2c_forward(frame_.data(), g.dims, tables_.m);
    multiply(frame_.data(), tables_.h_d2);
    fft::c2c_backward(frame_.data(), g.dims, tables_.m);
    crop_intensity(frame_.data(), out.test);
  }

 private:
  std::size_t count_() const { return frame_count(cfg_.grid.dims, tables_.m); }

  void fill_source(std::uint64_t k, StreamContext ctx) {
    const Grid& g = cfg_.grid;
    CounterStream stream(cfg_.master_seed, ctx, k);
    frame_.fill_zero();
    if (g.dims == 1) {
      for (int i = 0; i < g.n; ++i) {
        double a = tables_.amp[static_cast<std::size_t>(i)];
        if (a == 0.0) continue;
        frame_.data()[tables_.off + i] =
            std::polar(a, kTwoPi * stream.uniform(static_cast<std::uint64_t>(i)));
      }
    } else {
      for (int r = 0; r < g.n; ++r)
        for (int c = 0; c < g.n; ++c) {
          std::size_t i = static_cast<std::size_t>(r) * g.n + c;
          double a = tables_.amp[i];
          if (a == 0.0) continue;
          frame_.data()[static_cast<std::size_t>(r + tables_.off) * tables_.m + tables_.off + c] =
              std::polar(a, kTwoPi * stream.uniform(static_cast<std::uint64_t>(i)));
        }
    }
  }

  void multiply(cplx* buf, const std::vector<cplx>& table) {
    for (std::size_t i = 0; i < count_(); ++i) buf[i] *= table[i];
  }

  void crop_intensity(const cplx* frame, std::vector<double>& out) {
    const Grid& g = cfg_.grid;
    if (g.dims == 1) {
      for (int i = 0; i < g.n; ++i)
        out[static_cast<std::size_t>(i)] = std::norm(frame[tables_.off + i]);
    } else {
      for (int r = 0; r < g.n; ++r)
        for (int c = 0; c < g.n; ++c)
          out[static_cast<std::size_t>(r) * g.n + c] =
              std::norm(frame[static_cast<std::size_t>(r + tables_.off) * tables_.m +
                              tables_.off + c]);
    }
  }

  const EnsembleConfig& cfg_;
  const EnsembleTables& tables_;
  FftwArray<cplx> frame_, spec_, mid_;
};

}  // namespace

void EnsembleConfig::validate() const {
  geometry.validate();
  SpeckleSpec spec{grid, geometry.d0, profile};
  spec.validate();
  if (realizations == 0) throw std::invalid_argument("ensemble: realizations must be positive");
  if (pad_factor < 1) throw std::invalid_argument("ensemble: pad_factor must be >= 1");
  if (workers < 1 || workers > 64)
    throw std::invalid_argument("ensemble: workers must be between 1 and 64");
  if (std::abs(test_point) > grid.span() / 2 - grid.pitch)
    throw std::invalid_argument("ensemble: test point falls outside the detector");
  if (!modes.fixed_point && !modes.shift_averaged)
    throw std::invalid_argument("ensemble: no estimator enabled");
}

int EnsembleConfig::fixed_sample_index() const {
  int i = static_cast<int>(std::lround(test_point / grid.pitch)) + grid.n / 2;
  i = std::clamp(i, 0, grid.n - 1);
  if (grid.dims == 1) return i;
  return i * grid.n + i;
}

ArmIntensities run_realization(const EnsembleConfig& cfg, const Transmission* obj,
                               std::uint64_t k) {
  cfg.validate();
  if (obj) {
    obj->validate();
    if (!(obj->grid == cfg.grid))
      throw std::invalid_argument("ensemble: object sampled on a different grid");
  }
  EnsembleTables tables(cfg, obj);
  RealizationEngine engine(cfg, tables);
  ArmIntensities out;
  engine.compute(k, out);
  return out;
}

CorrelationAccumulator run_ensemble(const EnsembleConfig& cfg, const Transmission* obj,
                                    const EnsembleCallbacks& callbacks,
                                    const CorrelationAccumulator* resume_from) {
  cfg.validate();
  if (obj) {
    obj->validate();
    if (!(obj->grid == cfg.grid))
      throw std::invalid_argument("ensemble: object sampled on a different grid");
  }
  for (std::uint64_t s : callbacks.snapshots)
    if (s == 0 || s % kEnsembleBlock != 0 || s > cfg.realizations)
      throw std::invalid_argument("ensemble: snapshot counts must be positive block multiples "
                                  "within the run");

  EnsembleTables tables(cfg, obj);
  int fixed = cfg.fixed_sample_index();
  CorrelationAccumulator prefix(cfg.grid, cfg.modes, fixed);
  std::uint64_t start_block = 0;
  if (resume_from) {
    if (resume_from->count() % kEnsembleBlock != 0)
      throw std::invalid_argument("ensemble: resume point is not block-aligned");
    if (resume_from->count() > cfg.realizations)
      throw std::invalid_argument("ensemble: resume point is beyond the requested run");
    prefix.merge_from(*resume_from);  // also validates grid and modes agreement
    start_block = resume_from->count() / kEnsembleBlock;
  }
  std::uint64_t total = cfg.realizations;
  std::uint64_t nblocks = (total + kEnsembleBlock - 1) / kEnsembleBlock;

  // Warm the FFT plan cache from this thread so workers never plan.
  {
    RealizationEngine warm(cfg, tables);
    ArmIntensities arms;
    warm.compute(0, arms);
    CorrelatorWorkspace ws(cfg.grid);
    CorrelationAccumulator scratch(cfg.grid, cfg.modes, fixed);
    scratch.accumulate(arms, ws);
  }

  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::uint64_t> next_block{start_block};
  std::map<std::uint64_t, std::unique_ptr<CorrelationAccumulator>> pending;
  std::uint64_t fold_next = start_block;
  std::uint64_t last_checkpoint = resume_from ? resume_from->count() : 0;
  std::exception_ptr first_error;
  bool stop = false;
  std::size_t backlog_limit = static_cast<std::size_t>(2 * cfg.workers + 2);

  auto fold_ready = [&] {
    // Called with the lock held. Folds every contiguous finished block and
    // fires callbacks at the exact realization counts they cross.
    bool folded = false;
    while (true) {
      auto it = pending.find(fold_next);
      if (it == pending.end()) break;
      folded = true;
      std::uint64_t prev_done = std::min(fold_next * kEnsembleBlock, total);
      prefix.merge_from(*it->second);
      pending.erase(it);
      ++fold_next;
      std::uint64_t done = std::min(fold_next * kEnsembleBlock, total);
      if (callbacks.on_progress) callbacks.on_progress(done, total);
      if (callbacks.on_snapshot)
        for (std::uint64_t s : callbacks.snapshots)
          if (s > prev_done && s <= done) callbacks.on_snapshot(prefix, done);
      if (callbacks.checkpoint_every > 0 && callbacks.on_checkpoint &&
          (done - last_checkpoint >= callbacks.checkpoint_every || done == total)) {
        callbacks.on_checkpoint(prefix, done);
        last_checkpoint = done;
      }
    }
    if (folded) cv.notify_all();
  };

  auto worker = [&] {
    try {
      RealizationEngine engine(cfg, tables);
      CorrelatorWorkspace ws(cfg.grid);
      ArmIntensities arms;
      while (true) {
        {
          std::unique_lock<std::mutex> lock(mu);
          cv.wait(lock, [&] { return stop || pending.size() < backlog_limit; });
          if (stop) return;
        }
        std::uint64_t b = next_block.fetch_add(1);
        if (b >= nblocks) return;
        auto acc = std::make_unique<CorrelationAccumulator>(cfg.grid, cfg.modes, fixed);
        std::uint64_t k_end = std::min((b + 1) * kEnsembleBlock, total);
        for (std::uint64_t k = b * kEnsembleBlock; k < k_end; ++k) {
          engine.compute(k, arms);
          acc->accumulate(arms, ws);
        }
        std::unique_lock<std::mutex> lock(mu);
        pending[b] = std::move(acc);
        fold_ready();
      }
    } catch (...) {
      std::unique_lock<std::mutex> lock(mu);
      if (!first_error) first_error = std::current_exception();
      stop = true;
      lock.unlock();
      cv.notify_all();
    }
  };

  if (cfg.workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(cfg.workers));
    for (int w = 0; w < cfg.workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  if (fold_next != nblocks)
    throw std::runtime_error("ensemble: internal fold bookkeeping out of step");
  return prefix;
}

namespace {

Pattern intensity_pattern(const ComplexField& field, double wavelength, double d2,
                          double halfwidth) {
  const Grid& g = field.grid;
  if (halfwidth <= 0) halfwidth = g.span() / 4;
  int max_off = std::min(static_cast<int>(std::floor(halfwidth / g.pitch)), g.n / 2 - 1);
  int c = g.n / 2;
  Pattern p;
  p.dims = g.dims;
  p.kind = AxisKind::frequency;
  for (int d = -max_off; d <= max_off; ++d)
    p.axis.push_back(d * g.pitch / (wavelength * d2));
  if (g.dims == 1) {
    for (int d = -max_off; d <= max_off; ++d)
      p.values.push_back(std::norm(field.samples[static_cast<std::size_t>(c + d)]));
  } else {
    for (int dy = -max_off; dy <= max_off; ++dy)
      for (int dx = -max_off; dx <= max_off; ++dx)
        p.values.push_back(
            std::norm(field.samples[static_cast<std::size_t>(c + dy) * g.n + (c + dx)]));
  }
  double peak = *std::max_element(p.values.begin(), p.values.end());
  if (peak <= 0) throw std::runtime_error("coherent pattern is identically zero");
  for (double& v : p.values) v /= peak;
  p.validate();
  return p;
}

}  // namespace

Pattern coherent_fresnel(const SetupGeometry& geom, const Transmission& obj, int pad_factor,
                         double halfwidth) {
  geom.validate();
  obj.validate();
  ComplexField in{obj.grid, obj.t};
  ComplexField out = angular_spectrum(in, geom.d2, geom.wavelength, pad_factor);
  return intensity_pattern(out, geom.wavelength, geom.d2, halfwidth);
}

Pattern coherent_lens(const SetupGeometry& geom, const Transmission& obj, double halfwidth) {
  geom.validate();
  obj.validate();
  ComplexField in{obj.grid, obj.t};
  ComplexField out = lens_2f(in, geom.d2, geom.wavelength);
  return intensity_pattern(out, geom.wavelength, geom.d2, halfwidth);
}

}  // namespace ghostsim
