// Command-line frontend: simulate testbenches, calibrate the cluster
// compensation, detect trend breaks, run benchmark sweeps, and evaluate the
// compensation datapath cycle cost.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "trendbreak/detect.hpp"
#include "trendbreak/eval.hpp"
#include "trendbreak/hwcost.hpp"
#include "trendbreak/io.hpp"
#include "trendbreak/lbi.hpp"
#include "trendbreak/model.hpp"
#include "trendbreak/simulate.hpp"

namespace fs = std::filesystem;
using namespace trendbreak;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 0;
  fs::path output_dir = ".";
  bool verbose = false;
};

void note(const GlobalOptions& g, const std::string& message) {
  if (g.verbose) std::cerr << message << '\n';
}

std::string indexed_name(const char* stem, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04d.csv", stem, index);
  return buf;
}

// --- simulate -------------------------------------------------------------

struct SimulateOptions {
  TestbenchConfig cfg;
  double noise_sigma = 0.008;
  double noise_growth = 1.6e-4;
};

int cmd_simulate(const GlobalOptions& g, SimulateOptions& opt) {
  opt.cfg.seed = g.seed;
  opt.cfg.noise = opt.noise_sigma > 0.0
                      ? NoiseConfig{NoiseConfig::Kind::gaussian, opt.noise_sigma, opt.noise_growth}
                      : NoiseConfig{};
  opt.cfg.validate();
  fs::create_directories(g.output_dir);
  for (int i = 0; i < opt.cfg.n_profiles; ++i) {
    auto [profile, truth] = generate_profile(opt.cfg, i);
    io::write_profile(g.output_dir / indexed_name("profile", i), profile);
    io::write_events(g.output_dir / indexed_name("truth", i), truth, opt.cfg.n);
  }
  note(g, "wrote " + std::to_string(opt.cfg.n_profiles) + " profile/truth pairs to " +
              g.output_dir.string());
  return 0;
}

// --- calibrate ------------------------------------------------------------

struct CalibrateOptions {
  ExtractionConfig cfg;
  int coeffs = 65;
  std::string shape_out = "shape.json";
  std::string comp_out = "comp.json";
};

int cmd_calibrate(const GlobalOptions& g, CalibrateOptions& opt) {
  opt.cfg.seed = g.seed;
  opt.cfg.threads = g.threads;
  opt.cfg.validate();
  if (opt.coeffs % 2 == 0 || opt.coeffs < 1 || opt.coeffs > 2 * opt.cfg.half_width + 1)
    throw CLI::ValidationError("--coeffs must be odd and at most 2*half-width+1");
  fs::create_directories(g.output_dir);

  note(g, "extracting cluster shape over " + std::to_string(opt.cfg.n_profiles) + " profiles");
  const ClusterShape shape = extract_cluster_shape(opt.cfg);
  const CompensationVector comp = compensation_vector(shape, opt.coeffs);
  io::write_cluster_shape(g.output_dir / opt.shape_out, shape);
  io::write_compensation(g.output_dir / opt.comp_out, comp);
  note(g, "wrote " + opt.shape_out + " and " + opt.comp_out);
  return 0;
}

// --- detect ---------------------------------------------------------------

struct DetectOptions {
  std::string input;
  SolverConfig solver{200, 0.5, 4500, 1.0, false};
  double min_magnitude = 0.05;
  std::string compensate_file;
  std::string ls_file;
  int ls_taps = 65;
  std::string truth_file;
  int match_tolerance = 0;
  std::string out = "result.json";
  std::string overlay;
  bool timing = false;
};

int cmd_detect(const GlobalOptions& g, DetectOptions& opt) {
  opt.solver.validate();
  const FiberProfile profile = io::read_profile(opt.input);

  PipelineConfig pipeline;
  pipeline.solver = opt.solver;
  pipeline.min_magnitude = opt.min_magnitude;

  io::DetectionResult result;
  result.solver = opt.solver;
  result.min_magnitude = opt.min_magnitude;
  if (!opt.compensate_file.empty()) {
    const CompensationVector comp = io::read_compensation(opt.compensate_file);
    if (comp.alpha != opt.solver.alpha || comp.split_len != opt.solver.split_len)
      std::cerr << "warning: compensation was calibrated at alpha=" << comp.alpha
                << " split=" << comp.split_len << " but detecting at alpha="
                << opt.solver.alpha << " split=" << opt.solver.split_len << '\n';
    pipeline.comp = comp;
    result.method = "compensated";
  } else if (!opt.ls_file.empty()) {
    pipeline.ls = LsDeconvConfig{io::read_cluster_shape(opt.ls_file), opt.ls_taps};
    result.method = "ls-deconv";
  }

  const auto start = std::chrono::steady_clock::now();
  const ProfileRun run = run_profile(profile, pipeline);
  const auto stop = std::chrono::steady_clock::now();

  result.events = run.events;
  if (opt.timing)
    result.timing_ms = std::chrono::duration<double, std::milli>(stop - start).count();

  EventList truth;
  if (!opt.truth_file.empty()) {
    auto [events, truth_n] = io::read_events(opt.truth_file);
    if (truth_n != profile.n())
      std::cerr << "warning: truth file declares n=" << truth_n << ", profile has n="
                << profile.n() << '\n';
    truth = std::move(events);
    result.table = contingency(run.events, truth, profile.n(), opt.match_tolerance);
    result.mcc = mcc(*result.table);
  }

  fs::create_directories(g.output_dir);
  io::write_result(g.output_dir / opt.out, result);
  if (!opt.overlay.empty()) {
    const SparseEstimate* processed =
        (pipeline.comp || pipeline.ls) ? &run.processed : nullptr;
    io::write_overlay(g.output_dir / opt.overlay, profile.n(), truth, run.raw, processed);
  }
  note(g, "detected " + std::to_string(run.events.size()) + " events");
  return 0;
}

// --- bench ----------------------------------------------------------------

struct BenchOptions {
  std::string testbench_dir;
  std::string sweep_iterations;  // A:B:step
  std::vector<int> sweep_coeffs;
  SolverConfig solver{350, 0.5, 4500, 1.0, false};
  double min_magnitude = 0.05;
  int match_tolerance = 0;
  bool with_compensation = true;
  int coeffs = 65;
  int shape_profiles = 32;
  int half_width = 64;
};

Testbench load_testbench(const fs::path& dir) {
  Testbench bench;
  for (int i = 0;; ++i) {
    const fs::path profile_path = dir / indexed_name("profile", i);
    const fs::path truth_path = dir / indexed_name("truth", i);
    if (!fs::exists(profile_path)) break;
    FiberProfile profile = io::read_profile(profile_path);
    auto [truth, n] = io::read_events(truth_path);
    if (n != profile.n())
      throw std::runtime_error(truth_path.string() + ": n does not match profile");
    bench.emplace_back(std::move(profile), std::move(truth));
  }
  if (bench.empty())
    throw std::runtime_error("no profile_NNNN.csv files in " + dir.string());
  return bench;
}

std::vector<int> parse_range(const std::string& spec) {
  int a = 0, b = 0, step = 0;
  if (std::sscanf(spec.c_str(), "%d:%d:%d", &a, &b, &step) != 3 || step <= 0 || b < a)
    throw CLI::ValidationError("--sweep-iterations expects A:B:STEP with STEP > 0");
  std::vector<int> values;
  for (int v = a; v <= b; v += step) values.push_back(v);
  return values;
}

// Compensation templates are cached on disk keyed by (alpha, split, length);
// the shapes depend on the iteration count, so each axis point gets its own.
CompensationVector comp_for_alpha(const GlobalOptions& g, const BenchOptions& opt,
                                  int n, int alpha) {
  char name[64];
  std::snprintf(name, sizeof name, "comp_a%d_s%d_c%d.json", alpha, opt.solver.split_len,
                opt.coeffs);
  const fs::path cache = g.output_dir / name;
  if (fs::exists(cache)) {
    note(g, std::string("using cached ") + name);
    return io::read_compensation(cache);
  }
  ExtractionConfig extraction;
  extraction.alpha = alpha;
  extraction.split_len = opt.solver.split_len;
  extraction.half_width = opt.half_width;
  extraction.n_profiles = opt.shape_profiles;
  extraction.seed = g.seed;
  extraction.n = n;
  extraction.relaxation = opt.solver.relaxation;
  extraction.threads = g.threads;
  note(g, std::string("calibrating ") + name);
  const ClusterShape shape = extract_cluster_shape(extraction);
  const CompensationVector comp = compensation_vector(shape, opt.coeffs);
  io::write_compensation(cache, comp);
  return comp;
}

int cmd_bench(const GlobalOptions& g, BenchOptions& opt) {
  opt.solver.validate();
  const Testbench bench = load_testbench(opt.testbench_dir);
  const int n = bench.front().first.n();
  fs::create_directories(g.output_dir);

  if (!opt.sweep_iterations.empty()) {
    const std::vector<int> alphas = parse_range(opt.sweep_iterations);
    auto provider = [&](int alpha) -> std::optional<CompensationVector> {
      if (!opt.with_compensation) return std::nullopt;
      return comp_for_alpha(g, opt, n, alpha);
    };
    const SweepResult sweep = sweep_iterations(bench, alphas, opt.solver, opt.min_magnitude,
                                               provider, g.threads, opt.match_tolerance);
    io::write_sweep_table(g.output_dir / "sweep_iterations.csv", sweep);
    for (const SweepPoint& point : sweep.points) {
      std::vector<std::pair<std::string, std::map<int, int>>> series;
      series.emplace_back("raw", point.raw.histogram);
      if (point.compensated) series.emplace_back("compensated", point.compensated->histogram);
      char name[64];
      std::snprintf(name, sizeof name, "histogram_iter%d.csv",
                    static_cast<int>(point.axis_value));
      io::write_histogram(g.output_dir / name, series);
    }
    note(g, "wrote sweep_iterations.csv");
  } else {
    const ClusterShape shape = [&] {
      ExtractionConfig extraction;
      extraction.alpha = opt.solver.alpha;
      extraction.split_len = opt.solver.split_len;
      extraction.half_width = opt.half_width;
      extraction.n_profiles = opt.shape_profiles;
      extraction.seed = g.seed;
      extraction.n = n;
      extraction.relaxation = opt.solver.relaxation;
      extraction.threads = g.threads;
      return extract_cluster_shape(extraction);
    }();
    const SweepResult sweep = sweep_coefficients(bench, opt.sweep_coeffs, opt.solver, shape,
                                                 opt.min_magnitude, g.threads,
                                                 opt.match_tolerance);
    io::write_sweep_table(g.output_dir / "sweep_coefficients.csv", sweep);
    note(g, "wrote sweep_coefficients.csv");
  }
  return 0;
}

// --- hw -------------------------------------------------------------------

struct HwOptions {
  int n = 15000;
  int s = 65;
  std::string peaks;  // integer count (worst case) or positions file
  std::string mode;   // optional "cycles" token
};

int cmd_hw(const GlobalOptions&, HwOptions& opt) {
  hw::DatapathConfig cfg{opt.s, opt.n};
  const bool is_count = !opt.peaks.empty() &&
                        opt.peaks.find_first_not_of("0123456789") == std::string::npos;
  if (is_count) {
    const int p = std::stoi(opt.peaks);
    const std::int64_t total = hw::worst_case_cycles(cfg, p);
    std::printf("%lld\n", static_cast<long long>(total));
    std::printf("base,%d\n", opt.n);
    std::printf("extra,%lld\n", static_cast<long long>(total) - opt.n);
    std::printf("peaks,%d\n", p);
    std::printf("model,worst-case\n");
  } else {
    auto [events, n_file] = io::read_events(opt.peaks);
    if (n_file != opt.n)
      std::cerr << "warning: positions file declares n=" << n_file << ", using --n=" << opt.n
                << '\n';
    std::vector<int> positions;
    positions.reserve(events.size());
    for (const Event& e : events) positions.push_back(e.position);
    std::sort(positions.begin(), positions.end());
    const std::int64_t total = hw::estimate_cycles(cfg, positions);
    std::printf("%lld\n", static_cast<long long>(total));
    std::printf("base,%d\n", opt.n);
    std::printf("extra,%lld\n", static_cast<long long>(total) - opt.n);
    std::printf("peaks,%zu\n", positions.size());
    std::printf("model,stream\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trend-break detection for OTDR-style fiber profiles"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "base RNG seed")->capture_default_str();
  app.add_option("--threads", global.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  app.add_option("--output-dir", global.output_dir, "directory for output files")
      ->capture_default_str();
  app.add_flag("--verbose", global.verbose, "progress notes on stderr");

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "generate a simulated testbench");
  simulate->add_option("--profiles", sim.cfg.n_profiles)->capture_default_str();
  simulate->add_option("--n", sim.cfg.n)->capture_default_str();
  simulate->add_option("--events", sim.cfg.n_events)->capture_default_str();
  simulate->add_option("--mag-min", sim.cfg.mag_min)->capture_default_str();
  simulate->add_option("--mag-max", sim.cfg.mag_max)->capture_default_str();
  simulate->add_option("--slope", sim.cfg.slope)->capture_default_str();
  simulate->add_option("--noise-sigma", sim.noise_sigma)->capture_default_str();
  simulate->add_option("--noise-growth", sim.noise_growth)->capture_default_str();
  simulate->add_option("--min-separation", sim.cfg.min_separation)->capture_default_str();

  CalibrateOptions cal;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "extract the cluster shape and compensation vector");
  calibrate->add_option("--iterations", cal.cfg.alpha)->capture_default_str();
  calibrate->add_option("--split", cal.cfg.split_len)->capture_default_str();
  calibrate->add_option("--shape-profiles", cal.cfg.n_profiles)->capture_default_str();
  calibrate->add_option("--coeffs", cal.coeffs)->capture_default_str();
  calibrate->add_option("--half-width", cal.cfg.half_width)->capture_default_str();
  calibrate->add_option("--n", cal.cfg.n)->capture_default_str();
  calibrate->add_option("--mag-min", cal.cfg.mag_min)->capture_default_str();
  calibrate->add_option("--mag-max", cal.cfg.mag_max)->capture_default_str();
  calibrate->add_option("--slope", cal.cfg.slope)->capture_default_str();
  calibrate->add_option("--relaxation", cal.cfg.relaxation)->capture_default_str();
  calibrate->add_option("--shape-out", cal.shape_out)->capture_default_str();
  calibrate->add_option("--comp-out", cal.comp_out)->capture_default_str();

  DetectOptions det;
  CLI::App* detect = app.add_subcommand("detect", "detect trend breaks in one profile");
  detect->add_option("input", det.input, "profile file")->required();
  detect->add_option("--iterations", det.solver.alpha)->capture_default_str();
  detect->add_option("--split", det.solver.split_len)->capture_default_str();
  detect->add_option("--lambda", det.solver.lambda)->capture_default_str();
  detect->add_option("--relaxation", det.solver.relaxation)->capture_default_str();
  detect->add_flag("--shrink-slope", det.solver.shrink_slope,
                   "subject the slope dual to shrink");
  detect->add_option("--min-magnitude", det.min_magnitude)->capture_default_str();
  CLI::Option* comp_opt = detect->add_option("--compensate", det.compensate_file,
                                             "compensation vector file");
  detect->add_option("--ls-deconv", det.ls_file, "cluster shape file (LS-filter mode)")
      ->excludes(comp_opt);
  detect->add_option("--ls-taps", det.ls_taps)->capture_default_str();
  detect->add_option("--truth", det.truth_file, "ground-truth events file");
  detect->add_option("--match-tolerance", det.match_tolerance)->capture_default_str();
  detect->add_option("--out", det.out)->capture_default_str();
  detect->add_option("--overlay", det.overlay, "write plot-ready overlay series");
  detect->add_flag("--timing", det.timing, "record wall time in the result file");

  BenchOptions ben;
  CLI::App* bench = app.add_subcommand("bench", "sweep a testbench directory");
  bench->add_option("--testbench", ben.testbench_dir, "directory with profile/truth pairs")
      ->required();
  CLI::Option* iter_opt =
      bench->add_option("--sweep-iterations", ben.sweep_iterations, "A:B:STEP");
  bench->add_option("--sweep-coeffs", ben.sweep_coeffs, "template lengths")
      ->delimiter(',')
      ->excludes(iter_opt);
  bench->add_option("--iterations", ben.solver.alpha)->capture_default_str();
  bench->add_option("--split", ben.solver.split_len)->capture_default_str();
  bench->add_option("--relaxation", ben.solver.relaxation)->capture_default_str();
  bench->add_option("--min-magnitude", ben.min_magnitude)->capture_default_str();
  bench->add_option("--match-tolerance", ben.match_tolerance)->capture_default_str();
  bench->add_flag("--with-compensation,!--without-compensation", ben.with_compensation,
                  "score the compensated pipeline too");
  bench->add_option("--coeffs", ben.coeffs)->capture_default_str();
  bench->add_option("--shape-profiles", ben.shape_profiles)->capture_default_str();
  bench->add_option("--half-width", ben.half_width)->capture_default_str();

  HwOptions hwo;
  CLI::App* hw_cmd = app.add_subcommand("hw", "compensation datapath cycle cost");
  hw_cmd->add_option("mode", hwo.mode, "optional 'cycles' token")
      ->check(CLI::IsMember({"cycles"}));
  hw_cmd->add_option("--n", hwo.n)->capture_default_str();
  hw_cmd->add_option("--s", hwo.s)->capture_default_str();
  hw_cmd->add_option("--peaks", hwo.peaks, "peak count (worst case) or positions file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(global, sim);
    if (calibrate->parsed()) return cmd_calibrate(global, cal);
    if (detect->parsed()) return cmd_detect(global, det);
    if (bench->parsed()) {
      if (ben.sweep_iterations.empty() && ben.sweep_coeffs.empty())
        throw CLI::ValidationError("need --sweep-iterations or --sweep-coeffs");
      return cmd_bench(global, ben);
    }
    if (hw_cmd->parsed()) return cmd_hw(global, hwo);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
