#pragma once

#include <cstdint>

namespace fiberent {

// Counter-based generator: output t of stream (seed, stream) is a strong
// 64-bit mix of (key, t), so substreams are independent by construction and
// any variate is addressable. Mixer is the splitmix64 finalizer.
class CounterRng {
 public:
  static constexpr std::uint64_t kVersion = 1;

  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  CounterRng substream(std::uint64_t stream) const {
    CounterRng r(0, 0);
    r.key_ = mix(key_ ^ mix(stream + 0x9e6c63d0876a9a62ULL));
    r.counter_ = 0;
    return r;
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform on [0,1); 53 random bits, never returns 1.0.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace fiberent
