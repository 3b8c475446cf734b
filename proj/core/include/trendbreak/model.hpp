#pragma once

#include <cstdint>

#include "trendbreak/types.hpp"

namespace trendbreak {

// Implicit view of row k of the design matrix: the slope column carries k,
// step candidates 1..k carry 1, candidates k+1..n carry 0. The matrix is
// never materialized for large n; dense() exists for tests.
struct DictionaryRowView {
  int k = 0;  // row index, 1..n
  int n = 0;

  double slope_entry() const { return static_cast<double>(k); }
  int step_support_end() const { return k; }
  double squared_norm() const { return static_cast<double>(k) * k + k; }
  double dot(const SparseEstimate& beta) const;
  std::vector<double> dense() const;  // length n+1
};

DictionaryRowView design_matrix_row(int k, int n);

// y_k = slope * k + sum of step coefficients at positions <= k.
FiberProfile synthesize(const SparseEstimate& beta, int n);

// y - synthesize(beta); the caller uses its norm as a fit diagnostic.
std::vector<double> residual(const FiberProfile& y, const SparseEstimate& beta);

// Sample count for a fiber of length X (m), refractive index n_idx and
// detector bandwidth delta_nu (Hz): round(4*pi*X*c / (n_idx*delta_nu)).
std::int64_t samples_for_fiber(double fiber_length, double refractive_index,
                               double detector_bandwidth);

}  // namespace trendbreak
