#include "trendbreak/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trendbreak/parallel.hpp"

namespace trendbreak {

ContingencyTable contingency(const PeakList& detected, const EventList& truth,
                             int n, int tolerance) {
  if (tolerance < 0) throw std::domain_error("tolerance must be non-negative");
  for (const Event& e : detected)
    if (e.position < 1 || e.position > n)
      throw std::domain_error("detected position out of range 1..N");
  for (const Event& e : truth)
    if (e.position < 1 || e.position > n)
      throw std::domain_error("truth position out of range 1..N");

  std::int64_t tp = 0;
  if (tolerance == 0) {
    std::vector<int> d, t;
    for (const Event& e : detected) d.push_back(e.position);
    for (const Event& e : truth) t.push_back(e.position);
    std::sort(d.begin(), d.end());
    std::sort(t.begin(), t.end());
    std::vector<int> both;
    std::set_intersection(d.begin(), d.end(), t.begin(), t.end(), std::back_inserter(both));
    tp = static_cast<std::int64_t>(both.size());
  } else {
    // greedy nearest match, each truth event used at most once
    struct Pair {
      int dist;
      int di;
      int ti;
    };
    std::vector<Pair> pairs;
    for (int di = 0; di < static_cast<int>(detected.size()); ++di)
      for (int ti = 0; ti < static_cast<int>(truth.size()); ++ti) {
        const int dist = std::abs(detected[static_cast<std::size_t>(di)].position -
                                  truth[static_cast<std::size_t>(ti)].position);
        if (dist <= tolerance) pairs.push_back(Pair{dist, di, ti});
      }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      if (a.di != b.di) return a.di < b.di;
      return a.ti < b.ti;
    });
    std::vector<char> d_used(detected.size(), 0), t_used(truth.size(), 0);
    for (const Pair& p : pairs) {
      if (d_used[static_cast<std::size_t>(p.di)] || t_used[static_cast<std::size_t>(p.ti)]) continue;
      d_used[static_cast<std::size_t>(p.di)] = 1;
      t_used[static_cast<std::size_t>(p.ti)] = 1;
      ++tp;
    }
  }

  ContingencyTable table;
  table.tp = tp;
  table.fp = static_cast<std::int64_t>(detected.size()) - tp;
  table.fn = static_cast<std::int64_t>(truth.size()) - tp;
  table.tn = static_cast<std::int64_t>(n) - table.tp - table.fp - table.fn;
  return table;
}

double mcc(const ContingencyTable& t) {
  const std::int64_t f1 = t.tp + t.fp;
  const std::int64_t f2 = t.tp + t.fn;
  const std::int64_t f3 = t.tn + t.fp;
  const std::int64_t f4 = t.tn + t.fn;
  if (f1 == 0 || f2 == 0 || f3 == 0 || f4 == 0) return 0.0;
  const std::int64_t num = t.tp * t.tn - t.fp * t.fn;
  const double den = std::sqrt(static_cast<double>(f1) * static_cast<double>(f2)) *
                     std::sqrt(static_cast<double>(f3) * static_cast<double>(f4));
  return static_cast<double>(num) / den;
}

std::map<int, int> incidence_histogram(const std::vector<PeakList>& runs) {
  std::map<int, int> hist;
  for (const PeakList& run : runs) ++hist[static_cast<int>(run.size())];
  return hist;
}

ProfileRun run_profile(const FiberProfile& y, const PipelineConfig& cfg) {
  if (cfg.comp && cfg.ls)
    throw std::domain_error("choose either compensation or LS deconvolution, not both");

  ProfileRun run;
  SolveResult solved = cfg.solver.split_len >= 2 && cfg.solver.split_len < y.n()
                           ? split_profile_run(y, cfg.solver)
                           : sparse_kaczmarz(y, [&] {
                               SolverConfig single = cfg.solver;
                               single.split_len = 0;
                               return single;
                             }());
  run.raw = std::move(solved.estimate);
  run.trace = std::move(solved.trace);

  if (cfg.comp) {
    DeconvolutionResult comp = approximate_deconvolution(run.raw, *cfg.comp, cfg.min_magnitude);
    run.processed = std::move(comp.estimate);
    run.events = std::move(comp.peaks);
  } else if (cfg.ls) {
    const DeconvFilter g = ls_deconv_filter(cfg.ls->shape, cfg.ls->taps);
    run.processed = apply_fir_deconvolution(run.raw, g);
    run.events = detect_peaks(run.processed, cfg.min_magnitude);
  } else {
    run.processed = run.raw;
    run.events = detect_peaks(run.raw, cfg.min_magnitude);
  }
  return run;
}

double MethodScores::mean() const {
  if (mcc_values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : mcc_values) acc += v;
  return acc / static_cast<double>(mcc_values.size());
}

double MethodScores::stddev() const {
  if (mcc_values.size() < 2) return 0.0;
  const double m = mean();
  double acc = 0.0;
  for (double v : mcc_values) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(mcc_values.size()));
}

namespace {

struct ProfileOutcome {
  double mcc_raw = 0.0;
  int count_raw = 0;
  double mcc_comp = 0.0;
  int count_comp = 0;
};

MethodScores collect_raw(const std::vector<ProfileOutcome>& outcomes) {
  MethodScores scores;
  for (const auto& o : outcomes) {
    scores.mcc_values.push_back(o.mcc_raw);
    ++scores.histogram[o.count_raw];
  }
  return scores;
}

MethodScores collect_comp(const std::vector<ProfileOutcome>& outcomes) {
  MethodScores scores;
  for (const auto& o : outcomes) {
    scores.mcc_values.push_back(o.mcc_comp);
    ++scores.histogram[o.count_comp];
  }
  return scores;
}

}  // namespace

SweepResult sweep_iterations(const Testbench& bench, const std::vector<int>& alphas,
                             const SolverConfig& base, double min_magnitude,
                             const std::function<std::optional<CompensationVector>(int)>& comp_provider,
                             int threads, int tolerance) {
  if (bench.empty()) throw std::domain_error("empty testbench");
  if (alphas.empty()) throw std::domain_error("empty iteration axis");

  SweepResult sweep;
  sweep.axis_name = "iterations";
  for (int alpha : alphas) {
    SolverConfig solver = base;
    solver.alpha = alpha;
    const std::optional<CompensationVector> comp =
        comp_provider ? comp_provider(alpha) : std::nullopt;

    std::vector<ProfileOutcome> outcomes(bench.size());
    parallel_for(static_cast<int>(bench.size()), threads, [&](int i) {
      const auto& [profile, truth] = bench[static_cast<std::size_t>(i)];
      PipelineConfig pipeline;
      pipeline.solver = solver;
      pipeline.min_magnitude = min_magnitude;
      ProfileRun raw_run = run_profile(profile, pipeline);
      ProfileOutcome& out = outcomes[static_cast<std::size_t>(i)];
      out.mcc_raw = mcc(contingency(raw_run.events, truth, profile.n(), tolerance));
      out.count_raw = static_cast<int>(raw_run.events.size());
      if (comp) {
        DeconvolutionResult comped =
            approximate_deconvolution(raw_run.raw, *comp, min_magnitude);
        out.mcc_comp = mcc(contingency(comped.peaks, truth, profile.n(), tolerance));
        out.count_comp = static_cast<int>(comped.peaks.size());
      }
    });

    SweepPoint point;
    point.axis_value = alpha;
    point.raw = collect_raw(outcomes);
    if (comp) point.compensated = collect_comp(outcomes);
    sweep.points.push_back(std::move(point));
  }
  return sweep;
}

SweepResult sweep_coefficients(const Testbench& bench, const std::vector<int>& lengths,
                               const SolverConfig& cfg, const ClusterShape& shape,
                               double min_magnitude, int threads, int tolerance) {
  if (bench.empty()) throw std::domain_error("empty testbench");
  if (lengths.empty()) throw std::domain_error("empty coefficient axis");

  // one solver run per profile, reused across template lengths
  std::vector<ProfileRun> runs(bench.size());
  parallel_for(static_cast<int>(bench.size()), threads, [&](int i) {
    PipelineConfig pipeline;
    pipeline.solver = cfg;
    pipeline.min_magnitude = min_magnitude;
    runs[static_cast<std::size_t>(i)] = run_profile(bench[static_cast<std::size_t>(i)].first, pipeline);
  });

  MethodScores raw_scores;
  for (std::size_t i = 0; i < bench.size(); ++i) {
    raw_scores.mcc_values.push_back(
        mcc(contingency(runs[i].events, bench[i].second, bench[i].first.n(), tolerance)));
    ++raw_scores.histogram[static_cast<int>(runs[i].events.size())];
  }

  SweepResult sweep;
  sweep.axis_name = "coefficients";
  for (int length : lengths) {
    const CompensationVector comp = compensation_vector(shape, length);
    std::vector<ProfileOutcome> outcomes(bench.size());
    parallel_for(static_cast<int>(bench.size()), threads, [&](int i) {
      DeconvolutionResult comped =
          approximate_deconvolution(runs[static_cast<std::size_t>(i)].raw, comp, min_magnitude);
      ProfileOutcome& out = outcomes[static_cast<std::size_t>(i)];
      out.mcc_comp = mcc(contingency(comped.peaks, bench[static_cast<std::size_t>(i)].second,
                                     bench[static_cast<std::size_t>(i)].first.n(), tolerance));
      out.count_comp = static_cast<int>(comped.peaks.size());
    });

    SweepPoint point;
    point.axis_value = length;
    point.raw = raw_scores;
    point.compensated = collect_comp(outcomes);
    sweep.points.push_back(std::move(point));
  }
  return sweep;
}

}  // namespace trendbreak
