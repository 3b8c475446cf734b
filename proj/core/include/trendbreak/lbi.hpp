#pragma once

#include <cmath>
#include <vector>

#include "trendbreak/types.hpp"

namespace trendbreak {

struct SolverConfig {
  int alpha = 200;           // sweeps over all rows ("iterations per sample")
  double lambda = 0.5;       // shrink threshold on the equilibrated duals
  int split_len = 0;         // block length for split_profile_run; 0 = single block
  double relaxation = 1.0;   // Kaczmarz relaxation factor, (0, 2)
  bool shrink_slope = false; // subject the slope dual to shrink as well

  void validate() const;
};

struct SolverTrace {
  std::vector<double> residual_norms;  // one entry per completed sweep
  std::vector<int> active_sizes;       // nonzero coefficient counts per sweep
};

struct SolveResult {
  SparseEstimate estimate;
  SolverTrace trace;
};

// Soft threshold: max(|x|-lambda, 0) * sign(x).
inline double shrink(double x, double lambda) {
  const double m = std::fabs(x) - lambda;
  return m > 0.0 ? std::copysign(m, x) : 0.0;
}

// Cyclic sparse-Kaczmarz Bregman iteration over the implicit dictionary.
// Requires cfg.split_len == 0; profile splitting goes through split_profile_run.
SolveResult sparse_kaczmarz(const FiberProfile& y, const SolverConfig& cfg);

// Partitions y into blocks of cfg.split_len (a short final remainder is merged
// into the previous block), solves each block independently with its own slope
// coefficient, and maps local step indices back to global positions. The
// returned slope is the first block's. split_len > n falls back to one block.
SolveResult split_profile_run(const FiberProfile& y, const SolverConfig& cfg);

// Literal reference implementation with an explicitly materialized matrix and
// strict floating-point flags; the test oracle for sparse_kaczmarz. n <= 200.
SparseEstimate dense_reference_solver(const FiberProfile& y, const SolverConfig& cfg);

// Block partition used by split_profile_run, exposed for tests.
std::vector<int> split_block_lengths(int n, int split_len);

}  // namespace trendbreak
