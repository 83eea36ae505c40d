#pragma once

#include <array>
#include <cstdint>

namespace ghostsim {

// Counter-based generator (Philox 4x32, 10 rounds). Stateless: every draw is
// a pure function of (key, counter), so sample j of realization k is the same
// no matter which worker computes it or in which order. That is what makes
// ensemble runs bit-reproducible at any worker count.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                            const std::array<std::uint32_t, 2>& key);
};

// Stream contexts keep independent uses of the same master seed from
// colliding (speckle phases vs. retrieval starts vs. decorrelated arms).
enum class StreamContext : std::uint32_t {
  speckle_phase = 0,
  retrieval_init = 1,
  decoupled_arm = 2,
};

// Uniform doubles in [0,1) drawn by sample index from a keyed stream.
class CounterStream {
 public:
  CounterStream(std::uint64_t master_seed, StreamContext ctx, std::uint64_t realization);

  // value for sample index i; any order, any thread
  double uniform(std::uint64_t i) const;

  // fills out[0..count) with uniforms for samples [first, first+count)
  void fill_uniform(std::uint64_t first, std::uint64_t count, double* out) const;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t realization_lo_;
  std::uint32_t realization_hi_;
  std::uint32_t ctx_;
};

}  // namespace ghostsim
