#pragma once

#include <cmath>

namespace trendbreak::detail {

// Dictionary equilibration shared by the fast kernel and the dense reference.
// Step atom c is divided by (L-c+1)^kStepExponent; the ramp atom is scaled by
// sqrt(L / sum k^2). Quarter-power equilibration keeps the activation
// threshold profile shallow enough to gate noise at the block front while
// making the convergence rate nearly uniform across positions.
inline constexpr double kStepExponent = 0.25;

inline double inv_step_weight(int block_len, int c) {
  return std::pow(static_cast<double>(block_len - c + 1), -kStepExponent);
}

inline double ramp_scale(int block_len) {
  double q = 0.0;
  for (int k = 1; k <= block_len; ++k) q += static_cast<double>(k) * k;
  return std::sqrt(static_cast<double>(block_len) / q);
}

}  // namespace trendbreak::detail
