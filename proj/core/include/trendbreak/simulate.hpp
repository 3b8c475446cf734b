#pragma once

#include <utility>
#include <vector>

#include "trendbreak/types.hpp"

namespace trendbreak {

struct TestbenchConfig {
  int n_profiles = 100;
  int n = 15000;
  int n_events = 5;
  double mag_min = 0.1;  // dB, loss magnitudes (applied with negative sign)
  double mag_max = 5.0;
  double slope = -0.0002;  // dB per sample
  int min_separation = 0;  // minimum pairwise event distance (0 = distinct only)
  NoiseConfig noise{NoiseConfig::Kind::gaussian, 0.008, 1.6e-4};
  std::uint64_t seed = 0;

  void validate() const;
};

using TestbenchItem = std::pair<FiberProfile, EventList>;
using Testbench = std::vector<TestbenchItem>;

// Deterministic given (cfg.seed, profile_index); independent of generation order.
TestbenchItem generate_profile(const TestbenchConfig& cfg, int profile_index);

Testbench generate_testbench(const TestbenchConfig& cfg);

// Noiseless profile with exactly two steps at p1 and p1+delta.
TestbenchItem two_fault_scenario(int n, int p1, int delta, double m1, double m2,
                                 double slope);

}  // namespace trendbreak
