#pragma once

#include <array>
#include <cstdint>

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw,
// "Parallel random numbers: as easy as 1, 2, 3", SC 2011). A stream is
// keyed by (seed, stream id); draws within a stream advance a 64-bit block
// counter. Streams are independent of each other and of execution order,
// which is what makes per-trial substreams reproducible under any degree
// of parallelism.

namespace extdeg {

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0, 0, static_cast<std::uint32_t>(stream),
             static_cast<std::uint32_t>(stream >> 32)} {}

  std::uint64_t next_u64() {
    if (idx_ > 2) refill();
    const std::uint64_t lo = out_[idx_], hi = out_[idx_ + 1];
    idx_ += 2;
    return (hi << 32) | lo;
  }

  // Uniform on the open interval (0,1); never returns an endpoint.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal();  // Box-Muller, pair-cached

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint64_t, 4> out_{};
  int idx_ = 4;  // forces refill on first draw
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// Stream-id layout. Graph trials use the trial index directly; other
// consumers get disjoint bases so equal seeds never alias streams.
inline constexpr std::uint64_t kBaselineTrialStream = 1ull << 61;
inline constexpr std::uint64_t kBootstrapStream = 1ull << 62;

}  // namespace extdeg
