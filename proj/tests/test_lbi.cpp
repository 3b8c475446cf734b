#include <doctest.h>

#include <cmath>
#include <random>

#include "trendbreak/lbi.hpp"
#include "trendbreak/model.hpp"
#include "trendbreak/simulate.hpp"

using namespace trendbreak;

namespace {

double norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

FiberProfile random_profile(std::mt19937_64& gen, int n) {
  std::normal_distribution<double> noise(0.0, 0.3);
  std::uniform_real_distribution<double> mag(0.2, 4.0);
  std::uniform_int_distribution<int> pos(1, n);
  SparseEstimate beta(n);
  beta.slope() = -0.002;
  for (int e = 0; e < 3; ++e) beta.step(pos(gen)) = -mag(gen);
  FiberProfile y = synthesize(beta, n);
  for (double& s : y.samples) s += noise(gen);
  return y;
}

}  // namespace

TEST_CASE("shrink") {
  CHECK(shrink(0.7, 0.5) == doctest::Approx(0.2));
  CHECK(shrink(-0.7, 0.5) == doctest::Approx(-0.2));
  CHECK(shrink(0.3, 0.5) == 0.0);
  CHECK(shrink(0.0, 0.5) == 0.0);
  CHECK(shrink(0.5, 0.5) == 0.0);

  std::mt19937_64 gen(1);
  std::normal_distribution<double> d(0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = d(gen);
    const double s = shrink(x, 0.5);
    CHECK(std::fabs(s) <= std::max(std::fabs(x) - 0.5, 0.0) + 1e-15);
    if (s != 0.0) CHECK(std::signbit(s) == std::signbit(x));
  }
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  cfg.alpha = 0;
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
  cfg = SolverConfig{};
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
  cfg = SolverConfig{};
  cfg.split_len = 1;
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
  cfg = SolverConfig{};
  cfg.relaxation = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
}

TEST_CASE("zero input stays zero") {
  FiberProfile y;
  y.samples.assign(64, 0.0);
  SolverConfig cfg;
  cfg.alpha = 37;
  const SolveResult result = sparse_kaczmarz(y, cfg);
  for (double c : result.estimate.coeffs) CHECK(c == 0.0);
  CHECK(dense_reference_solver(y, cfg).coeffs == result.estimate.coeffs);
}

TEST_CASE("non-finite input is rejected") {
  FiberProfile y;
  y.samples = {0.0, std::nan(""), 1.0};
  SolverConfig cfg;
  CHECK_THROWS_AS(sparse_kaczmarz(y, cfg), std::domain_error);
}

TEST_CASE("noiseless single-step recovery at n=50") {
  // -0.01 dB/sample is already an order of magnitude beyond real fiber loss;
  // the trend regularizer is sized for physical slopes.
  SparseEstimate truth(50);
  truth.slope() = -0.01;
  truth.step(20) = -3.0;
  const FiberProfile y = synthesize(truth, 50);

  SolverConfig cfg;
  cfg.alpha = 2000;
  const SolveResult result = sparse_kaczmarz(y, cfg);
  CHECK(std::fabs(result.estimate.slope() + 0.01) < 1e-3);
  CHECK(std::fabs(result.estimate.step(20) + 3.0) < 1e-3);
  for (int c = 1; c <= 50; ++c)
    if (c != 20) CHECK(std::fabs(result.estimate.step(c)) < 1e-3);

  // exact-construction check: the fitted model reproduces the data
  CHECK(norm(residual(y, result.estimate)) < 1e-2);
}

TEST_CASE("two-sample sweep traced by hand") {
  // L=2, y=(1,2), lambda=0.5, one sweep. Atom weights: w1 = 2^(1/4), w2 = 1;
  // ramp scale rho = sqrt(2/5). Worked through the two row updates below.
  FiberProfile y;
  y.samples = {1.0, 2.0};
  SolverConfig cfg;
  cfg.alpha = 1;

  const double iw1 = std::pow(2.0, -0.25);
  const double rho = std::sqrt(2.0 / 5.0);
  const double n1 = rho * rho + iw1 * iw1;            // row 1 squared norm
  const double n2 = 4.0 * rho * rho + iw1 * iw1 + 1;  // row 2 squared norm

  // row 1: residual 1, dual moves, step 1 activates partially
  const double mu1 = 1.0 / n1;
  double v0 = rho * mu1;
  double vs1 = mu1 * iw1;
  double beta0 = rho * v0;
  double beta1 = shrink(vs1, 0.5) * iw1;

  // row 2: prediction 2*beta0 + beta1, step 2 stays below threshold
  const double t2 = 2.0 * beta0 + beta1;
  const double mu2 = (2.0 - t2) / n2;
  v0 += 2.0 * rho * mu2;
  vs1 += mu2 * iw1;
  const double vs2 = mu2;
  beta0 = rho * v0;
  beta1 = shrink(vs1, 0.5) * iw1;
  const double beta2 = shrink(vs2, 0.5);

  const SolveResult result = sparse_kaczmarz(y, cfg);
  CHECK(result.estimate.slope() == doctest::Approx(beta0).epsilon(1e-12));
  CHECK(result.estimate.step(1) == doctest::Approx(beta1).epsilon(1e-12));
  CHECK(result.estimate.step(2) == doctest::Approx(beta2).epsilon(1e-12));

  const SparseEstimate dense = dense_reference_solver(y, cfg);
  CHECK(dense.slope() == doctest::Approx(beta0).epsilon(1e-12));
  CHECK(dense.step(1) == doctest::Approx(beta1).epsilon(1e-12));
  CHECK(dense.step(2) == doctest::Approx(beta2).epsilon(1e-12));
}

TEST_CASE("implicit solver matches the dense reference") {
  std::mt19937_64 gen(42);
  std::uniform_int_distribution<int> pick_n(2, 120);
  std::uniform_int_distribution<int> pick_alpha(1, 300);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = pick_n(gen);
    const FiberProfile y = random_profile(gen, n);
    SolverConfig cfg;
    cfg.alpha = pick_alpha(gen);
    cfg.shrink_slope = trial % 5 == 0;
    cfg.relaxation = trial % 3 == 0 ? 1.5 : 1.0;
    const SolveResult fast = sparse_kaczmarz(y, cfg);
    const SparseEstimate reference = dense_reference_solver(y, cfg);
    for (int j = 0; j <= n; ++j)
      CHECK(std::fabs(fast.estimate.coeffs[static_cast<std::size_t>(j)] -
                      reference.coeffs[static_cast<std::size_t>(j)]) < 1e-9);
  }
}

TEST_CASE("dense reference refuses large problems and split mode") {
  FiberProfile y;
  y.samples.assign(201, 0.0);
  SolverConfig cfg;
  CHECK_THROWS_AS(dense_reference_solver(y, cfg), std::domain_error);
  y.samples.assign(50, 0.0);
  cfg.split_len = 25;
  CHECK_THROWS_AS(dense_reference_solver(y, cfg), std::domain_error);
  CHECK_THROWS_AS(sparse_kaczmarz(y, cfg), std::domain_error);
}

TEST_CASE("split block partition rule") {
  CHECK(split_block_lengths(15000, 4500) == std::vector<int>{4500, 4500, 6000});
  CHECK(split_block_lengths(9000, 4500) == std::vector<int>{4500, 4500});
  CHECK(split_block_lengths(2000, 4500) == std::vector<int>{2000});
  CHECK(split_block_lengths(10, 4) == std::vector<int>{4, 4, 2});   // 2*2 >= 4: own block
  CHECK(split_block_lengths(9, 4) == std::vector<int>{4, 5});       // 2*1 < 4: merged
  CHECK(split_block_lengths(4500, 4500) == std::vector<int>{4500});
}

TEST_CASE("split_len >= n falls back to a single block") {
  std::mt19937_64 gen(8);
  const FiberProfile y = random_profile(gen, 80);
  SolverConfig single;
  single.alpha = 60;
  SolverConfig split = single;
  split.split_len = 200;
  const SolveResult a = sparse_kaczmarz(y, single);
  const SolveResult b = split_profile_run(y, split);
  CHECK(a.estimate.coeffs == b.estimate.coeffs);
  CHECK(a.trace.residual_norms == b.trace.residual_norms);
}

TEST_CASE("split run recovers one fault per block at exact global positions") {
  SparseEstimate truth(600);
  truth.slope() = -0.0005;
  truth.step(80) = -2.0;   // block 1: 1..200
  truth.step(315) = -1.2;  // block 2: 201..400
  truth.step(512) = -3.5;  // block 3: 401..600
  const FiberProfile y = synthesize(truth, 600);

  SolverConfig cfg;
  cfg.alpha = 2500;
  cfg.split_len = 200;
  const SolveResult result = split_profile_run(y, cfg);
  CHECK(std::fabs(result.estimate.step(80) + 2.0) < 1e-2);
  CHECK(std::fabs(result.estimate.step(315) + 1.2) < 1e-2);
  CHECK(std::fabs(result.estimate.step(512) + 3.5) < 1e-2);
  for (int c = 1; c <= 600; ++c) {
    if (c == 80 || c == 315 || c == 512) continue;
    CHECK(std::fabs(result.estimate.step(c)) < 1e-2);
  }
  CHECK(result.trace.residual_norms.size() == 2500);
  CHECK(result.trace.active_sizes.size() == 2500);
}

TEST_CASE("monotone refinement on noiseless data") {
  TestbenchConfig bench_cfg;
  bench_cfg.n_profiles = 20;
  bench_cfg.n = 300;
  bench_cfg.n_events = 3;
  bench_cfg.mag_min = 0.5;
  bench_cfg.mag_max = 4.0;
  bench_cfg.noise = NoiseConfig{};
  bench_cfg.seed = 21;
  const Testbench bench = generate_testbench(bench_cfg);
  for (const auto& [y, truth] : bench) {
    for (int a : {50, 100, 200}) {
      SolverConfig lo, hi;
      lo.alpha = a;
      hi.alpha = 2 * a;
      const double r_lo = sparse_kaczmarz(y, lo).trace.residual_norms.back();
      const double r_hi = sparse_kaczmarz(y, hi).trace.residual_norms.back();
      CHECK(r_hi <= r_lo + 1e-12);
    }
  }
}

TEST_CASE("sparse solutions on well-separated noiseless faults") {
  TestbenchConfig bench_cfg;
  bench_cfg.n_profiles = 8;
  bench_cfg.n = 160;
  bench_cfg.n_events = 3;
  bench_cfg.mag_min = 0.8;
  bench_cfg.mag_max = 4.0;
  bench_cfg.min_separation = 30;
  bench_cfg.noise = NoiseConfig{};
  bench_cfg.seed = 31;
  for (int idx = 0; idx < bench_cfg.n_profiles; ++idx) {
    auto [y, truth] = generate_profile(bench_cfg, idx);
    SolverConfig cfg;
    cfg.alpha = 4000;
    const SolveResult result = sparse_kaczmarz(y, cfg);
    int active = result.estimate.slope() != 0.0 ? 1 : 0;
    for (int c = 1; c <= bench_cfg.n; ++c)
      if (std::fabs(result.estimate.step(c)) > 1e-6) ++active;
    CHECK(active <= static_cast<int>(truth.size()) + 1);
  }
}

TEST_CASE("trace lengths equal the completed sweeps") {
  std::mt19937_64 gen(12);
  const FiberProfile y = random_profile(gen, 64);
  SolverConfig cfg;
  cfg.alpha = 17;
  const SolveResult result = sparse_kaczmarz(y, cfg);
  CHECK(result.trace.residual_norms.size() == 17);
  CHECK(result.trace.active_sizes.size() == 17);
  // the trace reports the physical residual of the final estimate
  const double reported = result.trace.residual_norms.back();
  CHECK(reported == doctest::Approx(norm(residual(y, result.estimate))).epsilon(1e-9));
}
