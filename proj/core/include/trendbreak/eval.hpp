#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trendbreak/detect.hpp"
#include "trendbreak/lbi.hpp"
#include "trendbreak/simulate.hpp"
#include "trendbreak/types.hpp"

namespace trendbreak {

struct ContingencyTable {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;
};

// Exact-position matching by default; tolerance > 0 enables greedy nearest
// matching within +/- tolerance samples, each truth event matched at most once.
ContingencyTable contingency(const PeakList& detected, const EventList& truth,
                             int n, int tolerance = 0);

// Matthews correlation coefficient; 0 when any denominator factor is 0.
double mcc(const ContingencyTable& t);

// event-count -> number of runs detecting exactly that many events
std::map<int, int> incidence_histogram(const std::vector<PeakList>& runs);

// How a profile is turned into an event list.
struct LsDeconvConfig {
  ClusterShape shape;
  int taps = 65;
};

struct PipelineConfig {
  SolverConfig solver;
  double min_magnitude = 0.05;
  std::optional<CompensationVector> comp;  // approximate deconvolution
  std::optional<LsDeconvConfig> ls;        // LS-filter comparison mode
};

struct ProfileRun {
  SparseEstimate raw;        // solver output
  SparseEstimate processed;  // after compensation / deconvolution (== raw if neither)
  PeakList events;
  SolverTrace trace;
};

ProfileRun run_profile(const FiberProfile& y, const PipelineConfig& cfg);

struct MethodScores {
  std::vector<double> mcc_values;  // one per profile, testbench order
  std::map<int, int> histogram;    // detected-event-count incidence

  double mean() const;
  double stddev() const;
};

struct SweepPoint {
  double axis_value = 0.0;
  MethodScores raw;
  std::optional<MethodScores> compensated;
};

struct SweepResult {
  std::string axis_name;  // "iterations" or "coefficients"
  std::vector<SweepPoint> points;
};

// Runs the full pipeline per (alpha, profile). comp_provider returns the
// compensation vector for a given alpha (or nullopt to score raw only);
// shapes are iteration-count dependent, so one template per axis point.
SweepResult sweep_iterations(const Testbench& bench, const std::vector<int>& alphas,
                             const SolverConfig& base, double min_magnitude,
                             const std::function<std::optional<CompensationVector>(int)>& comp_provider,
                             int threads, int tolerance = 0);

// Solves each profile once at cfg.alpha, then scores compensation templates
// cropped from `shape` at each requested tap count.
SweepResult sweep_coefficients(const Testbench& bench, const std::vector<int>& lengths,
                               const SolverConfig& cfg, const ClusterShape& shape,
                               double min_magnitude, int threads, int tolerance = 0);

}  // namespace trendbreak
