#include "trendbreak/simulate.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "trendbreak/model.hpp"
#include "trendbreak/rng.hpp"

namespace trendbreak {

void TestbenchConfig::validate() const {
  if (n < 2) throw std::domain_error("n must be at least 2");
  if (n_profiles < 1) throw std::domain_error("n_profiles must be at least 1");
  if (n_events < 0) throw std::domain_error("n_events must be non-negative");
  if (!(mag_min > 0.0) || !(mag_max >= mag_min))
    throw std::domain_error("need 0 < mag_min <= mag_max");
  if (min_separation < 0) throw std::domain_error("min_separation must be non-negative");
  if (noise.sigma0 < 0.0 || noise.growth < 0.0)
    throw std::domain_error("noise parameters must be non-negative");
  if (n_events > n) throw std::domain_error("more events than samples");
  const long long spacing = std::max(1, min_separation);
  if (n_events > 0 && (n_events - 1LL) * spacing + 1 > n)
    throw std::domain_error("separation constraint unsatisfiable");
}

namespace {

std::vector<int> draw_positions(CounterRng& rng, int n, int n_events, int min_separation) {
  const int spacing = std::max(1, min_separation);
  std::vector<int> positions;
  positions.reserve(static_cast<std::size_t>(n_events));
  long long attempts = 0;
  const long long attempt_cap = 20000LL * (n_events + 1);
  while (static_cast<int>(positions.size()) < n_events) {
    if (++attempts > attempt_cap)
      throw std::runtime_error("event placement rejected too often; relax min_separation");
    const int p = rng.uniform_int(1, n);
    bool ok = true;
    for (int q : positions)
      if (std::abs(q - p) < spacing) {
        ok = false;
        break;
      }
    if (ok) positions.push_back(p);
  }
  std::sort(positions.begin(), positions.end());
  return positions;
}

}  // namespace

TestbenchItem generate_profile(const TestbenchConfig& cfg, int profile_index) {
  cfg.validate();
  if (profile_index < 0) throw std::domain_error("profile_index must be non-negative");
  CounterRng rng(cfg.seed, static_cast<std::uint64_t>(profile_index));

  const std::vector<int> positions = draw_positions(rng, cfg.n, cfg.n_events, cfg.min_separation);
  EventList truth;
  truth.reserve(positions.size());
  for (int p : positions)
    truth.push_back(Event{p, -rng.uniform(cfg.mag_min, cfg.mag_max)});

  SparseEstimate beta(cfg.n);
  beta.slope() = cfg.slope;
  for (const Event& e : truth) beta.step(e.position) = e.magnitude;

  FiberProfile y = synthesize(beta, cfg.n);
  if (cfg.noise.kind == NoiseConfig::Kind::gaussian && cfg.noise.sigma0 > 0.0) {
    for (int k = 1; k <= cfg.n; ++k)
      y.samples[static_cast<std::size_t>(k - 1)] += cfg.noise.sigma_at(k) * rng.gaussian();
  }
  y.meta = ProfileMeta{cfg.seed, cfg.slope, cfg.noise,
                       "sim:" + std::to_string(profile_index)};
  return {std::move(y), std::move(truth)};
}

Testbench generate_testbench(const TestbenchConfig& cfg) {
  cfg.validate();
  Testbench bench;
  bench.reserve(static_cast<std::size_t>(cfg.n_profiles));
  for (int i = 0; i < cfg.n_profiles; ++i) bench.push_back(generate_profile(cfg, i));
  return bench;
}

TestbenchItem two_fault_scenario(int n, int p1, int delta, double m1, double m2,
                                 double slope) {
  if (n < 2) throw std::domain_error("n must be at least 2");
  if (delta < 1) throw std::domain_error("delta must be at least 1");
  if (p1 < 1 || p1 + delta > n) throw std::domain_error("fault positions out of range");
  SparseEstimate beta(n);
  beta.slope() = slope;
  beta.step(p1) = m1;
  beta.step(p1 + delta) = m2;
  FiberProfile y = synthesize(beta, n);
  return {std::move(y), EventList{{p1, m1}, {p1 + delta, m2}}};
}

}  // namespace trendbreak
