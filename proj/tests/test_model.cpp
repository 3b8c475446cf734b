#include <doctest.h>

#include <cmath>
#include <random>

#include "trendbreak/model.hpp"

using namespace trendbreak;

namespace {

// Brute-force oracle: y = A * beta with the explicitly built matrix.
std::vector<double> dense_multiply(const SparseEstimate& beta, int n) {
  std::vector<double> y(static_cast<std::size_t>(n), 0.0);
  for (int k = 1; k <= n; ++k) {
    const auto row = design_matrix_row(k, n).dense();
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) acc += row[static_cast<std::size_t>(j)] * beta.coeffs[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(k - 1)] = acc;
  }
  return y;
}

SparseEstimate random_estimate(std::mt19937_64& gen, int n) {
  std::normal_distribution<double> coeff(0.0, 1.0);
  std::uniform_real_distribution<double> keep(0.0, 1.0);
  SparseEstimate beta(n);
  beta.slope() = 0.01 * coeff(gen);
  for (int c = 1; c <= n; ++c)
    if (keep(gen) < 0.2) beta.step(c) = coeff(gen);
  return beta;
}

}  // namespace

TEST_CASE("design_matrix_row matches the displayed rows") {
  CHECK(design_matrix_row(1, 5).dense() == std::vector<double>{1, 1, 0, 0, 0, 0});
  CHECK(design_matrix_row(5, 5).dense() == std::vector<double>{5, 1, 1, 1, 1, 1});
  CHECK(design_matrix_row(3, 5).squared_norm() == doctest::Approx(12.0));
}

TEST_CASE("design_matrix_row rejects out-of-range rows") {
  CHECK_THROWS_AS(design_matrix_row(0, 5), std::domain_error);
  CHECK_THROWS_AS(design_matrix_row(6, 5), std::domain_error);
  CHECK_THROWS_AS(design_matrix_row(1, 0), std::domain_error);
}

TEST_CASE("row squared norm is k^2 + k") {
  for (int k = 1; k <= 10000; ++k) {
    const auto row = design_matrix_row(k, 10000);
    CHECK(row.squared_norm() == static_cast<double>(k) * k + k);
  }
}

TEST_CASE("synthesize: zero input") {
  const FiberProfile y = synthesize(SparseEstimate(4), 4);
  CHECK(y.samples == std::vector<double>{0, 0, 0, 0});
}

TEST_CASE("synthesize: pure ramp") {
  SparseEstimate beta(3);
  beta.slope() = -0.1;
  const FiberProfile y = synthesize(beta, 3);
  CHECK(y.samples[0] == doctest::Approx(-0.1));
  CHECK(y.samples[1] == doctest::Approx(-0.2));
  CHECK(y.samples[2] == doctest::Approx(-0.3));
}

TEST_CASE("synthesize: ramp plus one step, against the dense multiply") {
  SparseEstimate beta(4);
  beta.slope() = -0.1;
  beta.step(3) = -1.0;
  const FiberProfile y = synthesize(beta, 4);
  const std::vector<double> expect{-0.1, -0.2, -1.3, -1.4};
  for (int i = 0; i < 4; ++i)
    CHECK(y.samples[static_cast<std::size_t>(i)] == doctest::Approx(expect[static_cast<std::size_t>(i)]));
  const auto oracle = dense_multiply(beta, 4);
  for (int i = 0; i < 4; ++i)
    CHECK(y.samples[static_cast<std::size_t>(i)] == doctest::Approx(oracle[static_cast<std::size_t>(i)]));
}

TEST_CASE("synthesize equals the dense multiply for random estimates up to n=200") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> pick_n(2, 200);
    const int n = pick_n(gen);
    const SparseEstimate beta = random_estimate(gen, n);
    const FiberProfile y = synthesize(beta, n);
    const auto oracle = dense_multiply(beta, n);
    for (int i = 0; i < n; ++i) {
      const double got = y.samples[static_cast<std::size_t>(i)];
      const double want = oracle[static_cast<std::size_t>(i)];
      CHECK(std::fabs(got - want) <= 1e-12 * std::max(1.0, std::fabs(want)));
    }
  }
}

TEST_CASE("synthesize is linear") {
  std::mt19937_64 gen(11);
  const int n = 60;
  const SparseEstimate b1 = random_estimate(gen, n);
  const SparseEstimate b2 = random_estimate(gen, n);
  const double a = 2.5, b = -1.25;
  SparseEstimate mix(n);
  for (int j = 0; j <= n; ++j)
    mix.coeffs[static_cast<std::size_t>(j)] =
        a * b1.coeffs[static_cast<std::size_t>(j)] + b * b2.coeffs[static_cast<std::size_t>(j)];
  const FiberProfile ym = synthesize(mix, n);
  const FiberProfile y1 = synthesize(b1, n);
  const FiberProfile y2 = synthesize(b2, n);
  for (int i = 0; i < n; ++i) {
    const double want = a * y1.samples[static_cast<std::size_t>(i)] + b * y2.samples[static_cast<std::size_t>(i)];
    CHECK(ym.samples[static_cast<std::size_t>(i)] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("synthesize rejects length mismatch") {
  CHECK_THROWS_AS(synthesize(SparseEstimate(4), 5), std::domain_error);
}

TEST_CASE("residual") {
  std::mt19937_64 gen(3);
  const SparseEstimate beta = random_estimate(gen, 30);
  const FiberProfile y = synthesize(beta, 30);

  SUBCASE("of the generating estimate is zero") {
    for (double r : residual(y, beta)) CHECK(r == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("of the zero estimate is the profile") {
    const auto r = residual(y, SparseEstimate(30));
    for (int i = 0; i < 30; ++i) CHECK(r[static_cast<std::size_t>(i)] == y.samples[static_cast<std::size_t>(i)]);
  }
  SUBCASE("direct evaluation") {
    FiberProfile y2;
    y2.samples = {1.0, 2.0};
    SparseEstimate slope_one(2);
    slope_one.slope() = 1.0;
    const auto r = residual(y2, slope_one);
    CHECK(r[0] == doctest::Approx(0.0));
    CHECK(r[1] == doctest::Approx(0.0));
  }
  SUBCASE("length mismatch throws") {
    CHECK_THROWS_AS(residual(y, SparseEstimate(29)), std::domain_error);
  }
}

TEST_CASE("samples_for_fiber") {
  SUBCASE("doubling the length doubles the count") {
    const auto n1 = samples_for_fiber(5000, 1.468, 125e6);
    const auto n2 = samples_for_fiber(10000, 1.468, 125e6);
    CHECK(n2 == doctest::Approx(2.0 * n1).epsilon(1e-5));
  }
  SUBCASE("doubling the bandwidth halves the count") {
    const auto n1 = samples_for_fiber(10000, 1.468, 125e6);
    const auto n2 = samples_for_fiber(10000, 1.468, 250e6);
    CHECK(n1 == doctest::Approx(2.0 * n2).epsilon(1e-5));
  }
  SUBCASE("frozen hand calculations") {
    CHECK(samples_for_fiber(10000, 1.468, 125e6) == 205303);
    CHECK(samples_for_fiber(500, 1.5, 1e9) == 1256);
  }
  SUBCASE("non-positive inputs throw") {
    CHECK_THROWS_AS(samples_for_fiber(0, 1.5, 1e9), std::domain_error);
    CHECK_THROWS_AS(samples_for_fiber(500, -1, 1e9), std::domain_error);
    CHECK_THROWS_AS(samples_for_fiber(500, 1.5, 0), std::domain_error);
  }
}

TEST_CASE("dot uses the implicit row structure") {
  std::mt19937_64 gen(5);
  const int n = 50;
  const SparseEstimate beta = random_estimate(gen, n);
  for (int k = 1; k <= n; ++k) {
    const auto view = design_matrix_row(k, n);
    const auto dense = view.dense();
    double want = 0.0;
    for (int j = 0; j <= n; ++j) want += dense[static_cast<std::size_t>(j)] * beta.coeffs[static_cast<std::size_t>(j)];
    CHECK(view.dot(beta) == doctest::Approx(want).epsilon(1e-13));
  }
}
