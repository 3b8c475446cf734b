#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trendbreak {

// One trend break: step position in 1..N, signed magnitude in dB.
// Fiber faults are losses, i.e. negative magnitudes.
struct Event {
  int position = 0;
  double magnitude = 0.0;

  friend bool operator==(const Event& a, const Event& b) {
    return a.position == b.position && a.magnitude == b.magnitude;
  }
};

// Ground-truth events, sorted by position, positions unique.
using EventList = std::vector<Event>;
// Peak-detector output; same layout, sorted by index.
using PeakList = std::vector<Event>;

struct NoiseConfig {
  enum class Kind { none, gaussian };
  Kind kind = Kind::none;
  double sigma0 = 0.0;  // dB, std at sample 1
  double growth = 0.0;  // per-sample: sigma(k) = sigma0 * exp(growth * k)

  double sigma_at(int k) const {
    return kind == Kind::none ? 0.0 : sigma0 * std::exp(growth * k);
  }
};

struct ProfileMeta {
  std::uint64_t seed = 0;
  double slope = 0.0;  // dB per sample used at generation time
  NoiseConfig noise;
  std::string source_id;
};

// A digitized backscatter trace, intensity in dB per sample.
struct FiberProfile {
  std::vector<double> samples;
  std::optional<ProfileMeta> meta;

  int n() const { return static_cast<int>(samples.size()); }
};

// Solution vector. coeffs[0] is the slope (dB per sample), coeffs[1..N] the
// step coefficients (dB) for candidate positions 1..N.
struct SparseEstimate {
  std::vector<double> coeffs;

  SparseEstimate() = default;
  explicit SparseEstimate(int n) : coeffs(static_cast<std::size_t>(n) + 1, 0.0) {}

  int n() const { return static_cast<int>(coeffs.size()) - 1; }
  double slope() const { return coeffs[0]; }
  double& slope() { return coeffs[0]; }
  double step(int position) const { return coeffs[static_cast<std::size_t>(position)]; }
  double& step(int position) { return coeffs[static_cast<std::size_t>(position)]; }
};

inline void validate_profile(const FiberProfile& y) {
  if (y.n() < 2) throw std::domain_error("profile must have at least 2 samples");
  for (double v : y.samples)
    if (!std::isfinite(v)) throw std::domain_error("profile contains a non-finite sample");
}

inline void validate_events(const EventList& events, int n) {
  int last = 0;
  for (const auto& e : events) {
    if (e.position < 1 || e.position > n)
      throw std::domain_error("event position out of range 1..N");
    if (e.position <= last)
      throw std::domain_error("event positions must be strictly increasing");
    last = e.position;
  }
}

inline int count_active(const SparseEstimate& beta) {
  int active = 0;
  for (double c : beta.coeffs)
    if (c != 0.0) ++active;
  return active;
}

}  // namespace trendbreak
