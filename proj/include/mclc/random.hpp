#pragma once

#include <cstdint>

namespace mclc {

// PCG32 (O'Neill's pcg32_random_r, the minimal C variant). Chosen because the
// generator is fully specified by integer arithmetic, so streams are
// reproducible bit for bit on every platform.
class Pcg32 {
 public:
  Pcg32() { seed(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL); }
  Pcg32(std::uint64_t initstate, std::uint64_t initseq) { seed(initstate, initseq); }

  void seed(std::uint64_t initstate, std::uint64_t initseq) {
    state_ = 0u;
    inc_ = (initseq << 1u) | 1u;
    next_u32();
    state_ += initstate;
    next_u32();
  }

  std::uint32_t next_u32() {
    std::uint64_t oldstate = state_;
    state_ = oldstate * 6364136223846793005ULL + inc_;
    std::uint32_t xorshifted =
        static_cast<std::uint32_t>(((oldstate >> 18u) ^ oldstate) >> 27u);
    std::uint32_t rot = static_cast<std::uint32_t>(oldstate >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Unbiased draw from [0, bound) by rejection.
  std::uint32_t bounded(std::uint32_t bound) {
    std::uint32_t threshold = (-bound) % bound;
    for (;;) {
      std::uint32_t r = next_u32();
      if (r >= threshold) return r % bound;
    }
  }

  /// 53-bit uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

/// Derives an independent deterministic substream for task (a, b, c, d).
/// Used wherever work is fanned out so thread scheduling cannot change draws.
Pcg32 substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                std::uint64_t c = 0, std::uint64_t d = 0);

/// Quantile of the standard normal distribution (Wichura's AS241, double
/// precision). p in (0, 1).
double inverse_normal_cdf(double p);

}  // namespace mclc
