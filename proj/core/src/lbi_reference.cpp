#include <stdexcept>
#include <vector>

#include "lbi_detail.hpp"
#include "trendbreak/lbi.hpp"

namespace trendbreak {

// Materializes the equilibrated dictionary and runs the row iteration
// literally. Compiled with strict FP flags (unlike the kernel), so agreement
// with sparse_kaczmarz is a meaningful cross-check rather than a tautology.
SparseEstimate dense_reference_solver(const FiberProfile& y, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.split_len != 0)
    throw std::domain_error("dense reference runs single-block only");
  validate_profile(y);
  const int n = y.n();
  if (n > 200) throw std::domain_error("dense reference is limited to n <= 200");

  const double rho = detail::ramp_scale(n);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
  std::vector<double> row_norm2(static_cast<std::size_t>(n), 0.0);
  for (int k = 1; k <= n; ++k) {
    auto& row = rows[static_cast<std::size_t>(k - 1)];
    row.assign(static_cast<std::size_t>(n) + 1, 0.0);
    row[0] = rho * static_cast<double>(k);
    for (int c = 1; c <= k; ++c)
      row[static_cast<std::size_t>(c)] = detail::inv_step_weight(n, c);
    double norm2 = 0.0;
    for (double a : row) norm2 += a * a;
    row_norm2[static_cast<std::size_t>(k - 1)] = norm2;
  }

  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);      // duals
  std::vector<double> gamma(static_cast<std::size_t>(n) + 1, 0.0);  // equilibrated primal

  const long long total = static_cast<long long>(cfg.alpha) * n;
  for (long long i = 1; i <= total; ++i) {
    const int k = static_cast<int>((i - 1) % n) + 1;
    const auto& row = rows[static_cast<std::size_t>(k - 1)];

    double dot = 0.0;
    for (int j = 0; j <= n; ++j) dot += row[static_cast<std::size_t>(j)] * gamma[static_cast<std::size_t>(j)];
    const double mu = cfg.relaxation * (y.samples[static_cast<std::size_t>(k - 1)] - dot) /
                      row_norm2[static_cast<std::size_t>(k - 1)];

    for (int j = 0; j <= k; ++j) v[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)] * mu;
    gamma[0] = cfg.shrink_slope ? shrink(v[0], cfg.lambda) : v[0];
    for (int j = 1; j <= k; ++j)
      gamma[static_cast<std::size_t>(j)] = shrink(v[static_cast<std::size_t>(j)], cfg.lambda);
  }

  SparseEstimate beta(n);
  beta.slope() = rho * gamma[0];
  for (int c = 1; c <= n; ++c)
    beta.step(c) = gamma[static_cast<std::size_t>(c)] * detail::inv_step_weight(n, c);
  return beta;
}

}  // namespace trendbreak
