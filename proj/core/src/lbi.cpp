#include "trendbreak/lbi.hpp"

#include <stdexcept>

#include "lbi_detail.hpp"

namespace trendbreak {

void SolverConfig::validate() const {
  if (alpha < 1) throw std::domain_error("alpha must be at least 1");
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
  if (split_len != 0 && split_len < 2)
    throw std::domain_error("split_len must be 0 or at least 2");
  if (!(relaxation > 0.0) || relaxation >= 2.0)
    throw std::domain_error("relaxation must lie in (0, 2)");
}

std::vector<int> split_block_lengths(int n, int split_len) {
  if (n < 2) throw std::domain_error("n must be at least 2");
  if (split_len <= 0 || split_len >= n) return {n};
  std::vector<int> lens(static_cast<std::size_t>(n / split_len), split_len);
  const int rem = n % split_len;
  if (rem > 0) {
    if (2 * rem < split_len)
      lens.back() += rem;  // a short remainder would be ill-conditioned
    else
      lens.push_back(rem);
  }
  return lens;
}

namespace {

struct BlockResult {
  std::vector<double> beta;  // block_len + 1, local coordinates
  std::vector<double> residual_norms;
  std::vector<int> active_sizes;
};

// One dictionary block. y points at block_len samples. The dual state lives
// in equilibrated coordinates; the running prefix sum P tracks the physical
// step values so the row product k*beta0 + sum(steps) never drifts across
// sweeps (it is rebuilt from scratch every row).
BlockResult solve_block(const double* y, int block_len, const SolverConfig& cfg) {
  const int n = block_len;
  const double lambda = cfg.lambda;
  const double omega = cfg.relaxation;

  std::vector<double> invw(static_cast<std::size_t>(n));
  for (int c = 1; c <= n; ++c)
    invw[static_cast<std::size_t>(c - 1)] = detail::inv_step_weight(n, c);
  const double rho = detail::ramp_scale(n);
  std::vector<double> row_norm2(static_cast<std::size_t>(n));
  {
    double h = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double w = invw[static_cast<std::size_t>(k - 1)];
      h += w * w;
      row_norm2[static_cast<std::size_t>(k - 1)] = rho * rho * static_cast<double>(k) * k + h;
    }
  }

  std::vector<double> vs(static_cast<std::size_t>(n), 0.0);  // step duals
  double v0 = 0.0;      // slope dual
  double beta0 = 0.0;   // physical slope

  BlockResult out;
  out.residual_norms.reserve(static_cast<std::size_t>(cfg.alpha));
  out.active_sizes.reserve(static_cast<std::size_t>(cfg.alpha));

  for (int sweep = 0; sweep < cfg.alpha; ++sweep) {
    double pref = 0.0;  // physical sum of steps 1..k after row k's update
    for (int k = 1; k <= n; ++k) {
      const double stale = shrink(vs[static_cast<std::size_t>(k - 1)], lambda) *
                           invw[static_cast<std::size_t>(k - 1)];
      const double t = static_cast<double>(k) * beta0 + pref + stale;
      const double mu = omega * (y[k - 1] - t) / row_norm2[static_cast<std::size_t>(k - 1)];
      v0 += rho * static_cast<double>(k) * mu;
      beta0 = cfg.shrink_slope ? rho * shrink(v0, lambda) : rho * v0;

      double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
      double* __restrict__ v = vs.data();
      const double* __restrict__ iw = invw.data();
      int c = 0;
      for (; c + 4 <= k; c += 4) {
        const double a = v[c] + mu * iw[c];
        const double b = v[c + 1] + mu * iw[c + 1];
        const double d = v[c + 2] + mu * iw[c + 2];
        const double e = v[c + 3] + mu * iw[c + 3];
        v[c] = a;
        v[c + 1] = b;
        v[c + 2] = d;
        v[c + 3] = e;
        acc0 += shrink(a, lambda) * iw[c];
        acc1 += shrink(b, lambda) * iw[c + 1];
        acc2 += shrink(d, lambda) * iw[c + 2];
        acc3 += shrink(e, lambda) * iw[c + 3];
      }
      for (; c < k; ++c) {
        const double a = v[c] + mu * iw[c];
        v[c] = a;
        acc0 += shrink(a, lambda) * iw[c];
      }
      pref = (acc0 + acc1) + (acc2 + acc3);
    }

    // per-sweep diagnostics on the physical estimate
    double norm2 = 0.0;
    double steps = 0.0;
    int active = beta0 != 0.0 ? 1 : 0;
    for (int k = 1; k <= n; ++k) {
      const double b = shrink(vs[static_cast<std::size_t>(k - 1)], lambda) *
                       invw[static_cast<std::size_t>(k - 1)];
      if (b != 0.0) ++active;
      steps += b;
      const double r = y[k - 1] - (beta0 * k + steps);
      norm2 += r * r;
    }
    out.residual_norms.push_back(std::sqrt(norm2));
    out.active_sizes.push_back(active);
  }

  out.beta.assign(static_cast<std::size_t>(n) + 1, 0.0);
  out.beta[0] = beta0;
  for (int c = 1; c <= n; ++c)
    out.beta[static_cast<std::size_t>(c)] =
        shrink(vs[static_cast<std::size_t>(c - 1)], lambda) * invw[static_cast<std::size_t>(c - 1)];
  return out;
}

}  // namespace

SolveResult sparse_kaczmarz(const FiberProfile& y, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.split_len != 0)
    throw std::domain_error("sparse_kaczmarz runs single-block; use split_profile_run");
  validate_profile(y);

  BlockResult block = solve_block(y.samples.data(), y.n(), cfg);
  SolveResult result;
  result.estimate.coeffs = std::move(block.beta);
  result.trace.residual_norms = std::move(block.residual_norms);
  result.trace.active_sizes = std::move(block.active_sizes);
  return result;
}

SolveResult split_profile_run(const FiberProfile& y, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.split_len < 2)
    throw std::domain_error("split_profile_run needs split_len >= 2");
  validate_profile(y);

  const int n = y.n();
  const std::vector<int> lens = split_block_lengths(n, cfg.split_len);

  SolveResult result;
  result.estimate = SparseEstimate(n);
  result.trace.residual_norms.assign(static_cast<std::size_t>(cfg.alpha), 0.0);
  result.trace.active_sizes.assign(static_cast<std::size_t>(cfg.alpha), 0);

  int offset = 0;
  for (std::size_t b = 0; b < lens.size(); ++b) {
    const int len = lens[b];
    BlockResult block = solve_block(y.samples.data() + offset, len, cfg);
    if (b == 0) result.estimate.slope() = block.beta[0];
    // The local step-1 coefficient of later blocks absorbs the accumulated
    // level of everything before the block; it is baseline, not an event.
    const int first_mapped = (b == 0) ? 1 : 2;
    for (int c = first_mapped; c <= len; ++c)
      result.estimate.step(offset + c) = block.beta[static_cast<std::size_t>(c)];
    for (int s = 0; s < cfg.alpha; ++s) {
      result.trace.residual_norms[static_cast<std::size_t>(s)] +=
          block.residual_norms[static_cast<std::size_t>(s)] *
          block.residual_norms[static_cast<std::size_t>(s)];
      result.trace.active_sizes[static_cast<std::size_t>(s)] +=
          block.active_sizes[static_cast<std::size_t>(s)];
    }
    offset += len;
  }
  for (double& r : result.trace.residual_norms) r = std::sqrt(r);
  return result;
}

}  // namespace trendbreak
