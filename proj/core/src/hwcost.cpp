#include "trendbreak/hwcost.hpp"

#include <algorithm>
#include <stdexcept>

namespace trendbreak::hw {

void DatapathConfig::validate(bool stream_model) const {
  if (s < 3) throw std::domain_error("shift register length must be at least 3");
  if (s > n) throw std::domain_error("shift register longer than the profile");
  if (stream_model && s % 2 == 0)
    throw std::domain_error("stream model needs an odd shift register length");
}

std::int64_t estimate_cycles(const DatapathConfig& cfg,
                             const std::vector<int>& peak_positions) {
  cfg.validate(true);
  for (std::size_t i = 0; i < peak_positions.size(); ++i) {
    const int p = peak_positions[i];
    if (p < 1 || p > cfg.n) throw std::domain_error("peak position out of range 1..N");
    if (i > 0 && p < peak_positions[i - 1])
      throw std::domain_error("peak positions must be sorted");
  }

  // One entry streams per clock; every cluster window active at that entry
  // costs one additional cycle (length of the cluster index list).
  const int half = (cfg.s - 1) / 2;
  std::vector<std::int32_t> delta(static_cast<std::size_t>(cfg.n) + 2, 0);
  for (int p : peak_positions) {
    const int lo = std::max(1, p - half);
    const int hi = std::min(cfg.n, p + half);
    ++delta[static_cast<std::size_t>(lo)];
    --delta[static_cast<std::size_t>(hi) + 1];
  }
  std::int64_t cycles = 0;
  std::int32_t active = 0;
  for (int t = 1; t <= cfg.n; ++t) {
    active += delta[static_cast<std::size_t>(t)];
    cycles += 1 + active;
  }
  return cycles;
}

std::int64_t worst_case_cycles(const DatapathConfig& cfg, int n_peaks) {
  if (cfg.s < 1) throw std::domain_error("shift register length must be positive");
  if (cfg.n < 1) throw std::domain_error("profile length must be positive");
  if (n_peaks < 0) throw std::domain_error("peak count must be non-negative");
  return static_cast<std::int64_t>(cfg.n) +
         static_cast<std::int64_t>(cfg.s) * static_cast<std::int64_t>(n_peaks);
}

}  // namespace trendbreak::hw
