#include "trendbreak/model.hpp"

#include <cmath>
#include <stdexcept>

namespace trendbreak {

double DictionaryRowView::dot(const SparseEstimate& beta) const {
  if (beta.n() != n) throw std::domain_error("estimate length does not match row");
  double acc = slope_entry() * beta.slope();
  for (int c = 1; c <= k; ++c) acc += beta.step(c);
  return acc;
}

std::vector<double> DictionaryRowView::dense() const {
  std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
  row[0] = slope_entry();
  for (int c = 1; c <= k; ++c) row[static_cast<std::size_t>(c)] = 1.0;
  return row;
}

DictionaryRowView design_matrix_row(int k, int n) {
  if (n < 1) throw std::domain_error("n must be positive");
  if (k < 1 || k > n) throw std::domain_error("row index out of range 1..n");
  return DictionaryRowView{k, n};
}

FiberProfile synthesize(const SparseEstimate& beta, int n) {
  if (beta.n() != n)
    throw std::domain_error("estimate must have n+1 coefficients");
  FiberProfile y;
  y.samples.resize(static_cast<std::size_t>(n));
  const double slope = beta.slope();
  double steps = 0.0;
  for (int k = 1; k <= n; ++k) {
    steps += beta.step(k);
    y.samples[static_cast<std::size_t>(k - 1)] = slope * k + steps;
  }
  return y;
}

std::vector<double> residual(const FiberProfile& y, const SparseEstimate& beta) {
  if (beta.n() != y.n())
    throw std::domain_error("profile and estimate lengths do not match");
  const FiberProfile fit = synthesize(beta, y.n());
  std::vector<double> r(y.samples.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y.samples[i] - fit.samples[i];
  return r;
}

std::int64_t samples_for_fiber(double fiber_length, double refractive_index,
                               double detector_bandwidth) {
  if (fiber_length <= 0.0 || refractive_index <= 0.0 || detector_bandwidth <= 0.0)
    throw std::domain_error("fiber parameters must be positive");
  constexpr double kSpeedOfLight = 299792458.0;  // m/s
  const double n = 4.0 * 3.141592653589793 * fiber_length * kSpeedOfLight /
                   (refractive_index * detector_bandwidth);
  return std::llround(n);
}

}  // namespace trendbreak
