#include "trendbreak/detect.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "trendbreak/lbi.hpp"
#include "trendbreak/model.hpp"
#include "trendbreak/parallel.hpp"
#include "trendbreak/rng.hpp"

namespace trendbreak {

void ExtractionConfig::validate() const {
  if (alpha < 1) throw std::domain_error("alpha must be at least 1");
  if (half_width < 1) throw std::domain_error("half_width must be at least 1");
  if (n_profiles < 1) throw std::domain_error("n_profiles must be at least 1");
  if (n < 2) throw std::domain_error("n must be at least 2");
  if (split_len != 0 && split_len < 2)
    throw std::domain_error("split_len must be 0 or at least 2");
  if (!(mag_min > 0.0) || !(mag_max >= mag_min))
    throw std::domain_error("need 0 < mag_min <= mag_max");
  if (!(position_lo >= 0.0) || !(position_hi <= 1.0) || !(position_lo < position_hi))
    throw std::domain_error("position window must satisfy 0 <= lo < hi <= 1");
}

PeakList detect_peaks(const SparseEstimate& beta, double min_magnitude) {
  if (min_magnitude < 0.0) throw std::domain_error("min_magnitude must be non-negative");
  PeakList peaks;
  const int n = beta.n();
  for (int j = 1; j <= n; ++j) {
    const double m = std::fabs(beta.step(j));
    if (m < min_magnitude || m == 0.0) continue;
    const double left = j > 1 ? std::fabs(beta.step(j - 1)) : 0.0;
    const double right = j < n ? std::fabs(beta.step(j + 1)) : 0.0;
    if (m > left && m > right) peaks.push_back(Event{j, beta.step(j)});
  }
  return peaks;
}

namespace {

struct PositionRange {
  int lo = 0;
  int hi = 0;  // inclusive global positions
  int size() const { return hi - lo + 1; }
};

// Per-block windows where a fault's +/- half_width neighbourhood stays inside
// the block and inside the configured fraction of the block length.
std::vector<PositionRange> extraction_ranges(const ExtractionConfig& cfg) {
  const std::vector<int> lens = split_block_lengths(cfg.n, cfg.split_len);
  std::vector<PositionRange> ranges;
  int offset = 0;
  for (std::size_t b = 0; b < lens.size(); ++b) {
    const int len = lens[b];
    int lo = std::max(cfg.half_width + 2,
                      static_cast<int>(std::ceil(cfg.position_lo * len)));
    if (b > 0) lo = std::max(lo, 2);  // local step 1 is the block baseline
    const int hi = std::min(len - cfg.half_width - 1,
                            static_cast<int>(std::floor(cfg.position_hi * len)));
    if (lo <= hi) ranges.push_back(PositionRange{offset + lo, offset + hi});
    offset += len;
  }
  if (ranges.empty())
    throw std::domain_error("no valid fault positions: profile too short for half_width");
  return ranges;
}

SolveResult run_solver(const FiberProfile& y, int alpha, int split_len, double relaxation) {
  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.split_len = split_len;
  cfg.relaxation = relaxation;
  if (split_len >= 2 && split_len < y.n()) return split_profile_run(y, cfg);
  cfg.split_len = 0;
  return sparse_kaczmarz(y, cfg);
}

}  // namespace

std::vector<std::vector<double>> extract_cluster_windows(const ExtractionConfig& cfg) {
  cfg.validate();
  const std::vector<PositionRange> ranges = extraction_ranges(cfg);
  int total = 0;
  for (const auto& r : ranges) total += r.size();

  const int hw = cfg.half_width;
  const int width = 2 * hw + 1;
  std::vector<std::vector<double>> windows(static_cast<std::size_t>(cfg.n_profiles));

  parallel_for(cfg.n_profiles, cfg.threads, [&](int i) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(i));
    int pick = rng.uniform_int(0, total - 1);
    int position = 0;
    for (const auto& r : ranges) {
      if (pick < r.size()) {
        position = r.lo + pick;
        break;
      }
      pick -= r.size();
    }
    const double magnitude = -rng.uniform(cfg.mag_min, cfg.mag_max);

    SparseEstimate truth(cfg.n);
    truth.slope() = cfg.slope;
    truth.step(position) = magnitude;
    const FiberProfile y = synthesize(truth, cfg.n);

    const SolveResult solved = run_solver(y, cfg.alpha, cfg.split_len, cfg.relaxation);
    const SparseEstimate& beta = solved.estimate;

    int best = 0;
    double best_mag = 0.0;
    for (int j = 1; j <= cfg.n; ++j) {
      const double m = std::fabs(beta.step(j));
      if (m > best_mag) {
        best_mag = m;
        best = j;
      }
    }
    if (best_mag == 0.0 || best - hw < 1 || best + hw > cfg.n) return;  // discarded

    std::vector<double> window(static_cast<std::size_t>(width));
    const double center = beta.step(best);
    for (int o = -hw; o <= hw; ++o)
      window[static_cast<std::size_t>(o + hw)] = beta.step(best + o) / center;
    windows[static_cast<std::size_t>(i)] = std::move(window);
  });

  std::vector<std::vector<double>> kept;
  kept.reserve(windows.size());
  for (auto& w : windows)
    if (!w.empty()) kept.push_back(std::move(w));
  return kept;
}

ClusterShape extract_cluster_shape(const ExtractionConfig& cfg) {
  const std::vector<std::vector<double>> windows = extract_cluster_windows(cfg);
  if (windows.empty())
    throw std::runtime_error("cluster extraction failed: every run was discarded");

  const int width = 2 * cfg.half_width + 1;
  ClusterShape shape;
  shape.taps.assign(static_cast<std::size_t>(width), 0.0);
  for (const auto& w : windows)
    for (int j = 0; j < width; ++j) shape.taps[static_cast<std::size_t>(j)] += w[static_cast<std::size_t>(j)];
  for (double& t : shape.taps) t /= static_cast<double>(windows.size());
  shape.taps[static_cast<std::size_t>(cfg.half_width)] = 1.0;  // exact by construction

  shape.alpha = cfg.alpha;
  shape.split_len = cfg.split_len;
  shape.n_profiles = cfg.n_profiles;
  shape.half_width_cfg = cfg.half_width;
  shape.seed = cfg.seed;
  return shape;
}

CompensationVector compensation_vector(const ClusterShape& shape, int length) {
  const int width = static_cast<int>(shape.taps.size());
  if (length < 1 || length % 2 == 0)
    throw std::domain_error("compensation length must be odd and positive");
  if (length > width)
    throw std::domain_error("compensation length exceeds the shape length");
  const int crop = (width - length) / 2;
  CompensationVector comp;
  comp.taps.assign(shape.taps.begin() + crop, shape.taps.end() - crop);
  comp.taps[static_cast<std::size_t>(length / 2)] = 0.0;
  comp.alpha = shape.alpha;
  comp.split_len = shape.split_len;
  return comp;
}

ConvMatrix build_convolution_matrix(const ClusterShape& shape, int m) {
  if (m < 1) throw std::domain_error("filter length must be at least 1");
  const int k = static_cast<int>(shape.taps.size());
  ConvMatrix d;
  d.rows = k + m - 1;
  d.cols = m;
  d.data.assign(static_cast<std::size_t>(d.rows) * d.cols, 0.0);
  for (int r = 0; r < d.rows; ++r)
    for (int c = 0; c < m; ++c)
      if (r - c >= 0 && r - c < k)
        d.data[static_cast<std::size_t>(r) * m + c] = shape.taps[static_cast<std::size_t>(r - c)];
  return d;
}

DeconvFilter ls_deconv_filter(const ClusterShape& shape, int m, int target_center) {
  const int k = static_cast<int>(shape.taps.size());
  if (m < 1) throw std::domain_error("filter length must be at least 1");
  if (target_center < 0 || target_center >= k + m - 1)
    throw std::domain_error("target_center out of range 0..K+M-2");

  const ConvMatrix cm = build_convolution_matrix(shape, m);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      d(cm.data.data(), cm.rows, cm.cols);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(cm.rows);
  delta[target_center] = 1.0;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d);
  if (qr.rank() < m)
    throw std::runtime_error("convolution matrix is rank-deficient (rank " +
                             std::to_string(qr.rank()) + " < " + std::to_string(m) + ")");
  const Eigen::VectorXd g = qr.solve(delta);

  DeconvFilter filter;
  filter.taps.assign(g.data(), g.data() + m);
  filter.target_center = target_center;
  filter.shape_len = k;
  return filter;
}

DeconvFilter ls_deconv_filter(const ClusterShape& shape, int m) {
  const int k = static_cast<int>(shape.taps.size());
  return ls_deconv_filter(shape, m, (k + m - 1) / 2);
}

SparseEstimate apply_fir_deconvolution(const SparseEstimate& beta, const DeconvFilter& g) {
  const int n = beta.n();
  const int m = static_cast<int>(g.taps.size());
  if (m < 1) throw std::domain_error("empty deconvolution filter");
  const int lag = g.lag();

  SparseEstimate out(n);
  out.slope() = beta.slope();
  for (int i = 1; i <= n; ++i) {
    double acc = 0.0;
    for (int t = 0; t < m; ++t) {
      const int src = i + lag - t;
      if (src >= 1 && src <= n) acc += g.taps[static_cast<std::size_t>(t)] * beta.step(src);
    }
    out.step(i) = acc;
  }
  return out;
}

DeconvolutionResult approximate_deconvolution(const SparseEstimate& beta_raw,
                                              const CompensationVector& comp,
                                              double min_magnitude, double guard) {
  if (comp.taps.empty() || comp.taps.size() % 2 == 0)
    throw std::domain_error("compensation vector must have odd length");
  if (comp.taps[static_cast<std::size_t>(comp.half_width())] != 0.0)
    throw std::domain_error("compensation vector center tap must be zero");
  if (!(guard > 0.0)) throw std::domain_error("guard factor must be positive");

  const int n = beta_raw.n();
  const int hw = comp.half_width();
  const PeakList first_pass = detect_peaks(beta_raw, min_magnitude);

  DeconvolutionResult result;
  result.estimate = beta_raw;
  // joint accumulation: all first-pass subtractions apply to the same buffer
  for (const Event& peak : first_pass) {
    const double scale = guard * peak.magnitude;
    for (int o = -hw; o <= hw; ++o) {
      const int i = peak.position + o;
      if (i < 1 || i > n) continue;
      result.estimate.step(i) -= scale * comp.taps[static_cast<std::size_t>(o + hw)];
    }
  }
  // compensation removes cluster energy; it may not create or invert entries
  for (int i = 1; i <= n; ++i) {
    const double raw = beta_raw.step(i);
    double& out = result.estimate.step(i);
    if ((raw == 0.0 && out != 0.0) || raw * out < 0.0) out = 0.0;
  }
  result.peaks = detect_peaks(result.estimate, min_magnitude);
  return result;
}

}  // namespace trendbreak
