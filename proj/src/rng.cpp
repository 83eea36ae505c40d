#include "ghostsim/rng.hpp"

namespace ghostsim {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(const std::array<std::uint32_t, 4>& counter,
                                               const std::array<std::uint32_t, 2>& key) {
  std::uint32_t c0 = counter[0], c1 = counter[1], c2 = counter[2], c3 = counter[3];
  std::uint32_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c0, hi0, lo0);
    mulhilo(kMul1, c2, hi1, lo1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c0, c1, c2, c3};
}

CounterStream::CounterStream(std::uint64_t master_seed, StreamContext ctx,
                             std::uint64_t realization)
    : key_{static_cast<std::uint32_t>(master_seed),
           static_cast<std::uint32_t>(master_seed >> 32)},
      realization_lo_(static_cast<std::uint32_t>(realization)),
      realization_hi_(static_cast<std::uint32_t>(realization >> 32)),
      ctx_(static_cast<std::uint32_t>(ctx)) {}

double CounterStream::uniform(std::uint64_t i) const {
  std::array<std::uint32_t, 4> ctr{realization_lo_, realization_hi_, ctx_,
                                   static_cast<std::uint32_t>(i >> 2)};
  auto out = Philox4x32::block(ctr, key_);
  // 2^-32; half-offset keeps the value strictly inside [0,1)
  return (static_cast<double>(out[i & 3]) + 0.5) * 0x1p-32;
}

void CounterStream::fill_uniform(std::uint64_t first, std::uint64_t count, double* out) const {
  std::uint64_t i = first;
  std::uint64_t end = first + count;
  while (i < end) {
    std::array<std::uint32_t, 4> ctr{realization_lo_, realization_hi_, ctx_,
                                     static_cast<std::uint32_t>(i >> 2)};
    auto blk = Philox4x32::block(ctr, key_);
    std::uint64_t lane = i & 3;
    for (; lane < 4 && i < end; ++lane, ++i)
      *out++ = (static_cast<double>(blk[lane]) + 0.5) * 0x1p-32;
  }
}

}  // namespace ghostsim
