#pragma once

#include <cmath>
#include <cstdint>

namespace trendbreak {

// Philox4x64-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3"). Stateless block function; the same
// (key, counter) always produces the same block.
struct Philox4x64 {
  std::uint64_t key0 = 0;
  std::uint64_t key1 = 0;

  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                      std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  void block(const std::uint64_t counter[4], std::uint64_t out[4]) const {
    constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
    constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
    constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;
    std::uint64_t x0 = counter[0], x1 = counter[1], x2 = counter[2], x3 = counter[3];
    std::uint64_t k0 = key0, k1 = key1;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 += kWeyl0;
        k1 += kWeyl1;
      }
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(kMul0, x0, hi0, lo0);
      mulhilo(kMul1, x2, hi1, lo1);
      const std::uint64_t n0 = hi1 ^ x1 ^ k0;
      const std::uint64_t n2 = hi0 ^ x3 ^ k1;
      x0 = n0;
      x1 = lo1;
      x2 = n2;
      x3 = lo0;
    }
    out[0] = x0;
    out[1] = x1;
    out[2] = x2;
    out[3] = x3;
  }
};

// Draw stream keyed by (seed, stream). Streams are independent: generating
// stream 7 never touches stream 3's values, so testbench profiles are
// reproducible in any order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : phi_{seed, stream} {}

  std::uint64_t next_u64() {
    if (buf_pos_ == 4) {
      const std::uint64_t counter[4] = {block_index_++, 0, 0, 0};
      phi_.block(counter, buf_);
      buf_pos_ = 0;
    }
    return buf_[buf_pos_++];
  }

  // [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // inclusive bounds
  int uniform_int(int lo, int hi) {
    const double span = static_cast<double>(hi) - lo + 1.0;
    return lo + static_cast<int>(uniform01() * span);
  }

  // Box-Muller on counter-indexed uniforms; platform-independent sequence.
  double gaussian() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
  }

 private:
  Philox4x64 phi_;
  std::uint64_t block_index_ = 0;
  std::uint64_t buf_[4] = {};
  int buf_pos_ = 4;
};

}  // namespace trendbreak
