#pragma once

#include <cstdint>
#include <vector>

namespace trendbreak::hw {

// Compensation datapath: shift register of length s (matching the
// compensation vector), coefficient ROM, multiplier list, cluster index list.
struct DatapathConfig {
  int s = 65;      // shift register / compensation length
  int n = 15000;   // profile length

  void validate(bool stream_model) const;  // stream model additionally needs s odd
};

// Stream simulation: one entry per clock, plus one extra cycle per active
// cluster window (half-width (s-1)/2) covering the position.
std::int64_t estimate_cycles(const DatapathConfig& cfg,
                             const std::vector<int>& peak_positions);

// Closed form N + s*p (all p windows fully on-profile).
std::int64_t worst_case_cycles(const DatapathConfig& cfg, int n_peaks);

}  // namespace trendbreak::hw
