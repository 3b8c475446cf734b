#pragma once

#include <cstdint>
#include <vector>

#include "trendbreak/types.hpp"

namespace trendbreak {

// Averaged normalized fault cluster C[k]; odd tap count, center tap 1.
struct ClusterShape {
  std::vector<double> taps;
  int alpha = 0;      // iterations it was extracted at
  int split_len = 0;  // split-profile length it was extracted at
  // extraction provenance
  int n_profiles = 0;
  int half_width_cfg = 0;
  std::uint64_t seed = 0;

  int half_width() const { return static_cast<int>(taps.size()) / 2; }
  double center() const { return taps[static_cast<std::size_t>(half_width())]; }
};

// Center-zeroed, center-cropped subtraction template.
struct CompensationVector {
  std::vector<double> taps;  // odd length, center tap 0
  int alpha = 0;
  int split_len = 0;

  int half_width() const { return static_cast<int>(taps.size()) / 2; }
};

// FIR deconvolution filter g with the lag metadata needed to apply it
// position-preservingly.
struct DeconvFilter {
  std::vector<double> taps;
  int target_center = 0;  // delta position in the full-convolution output
  int shape_len = 1;      // length K of the shape the filter inverts

  // samples the filtered estimate must be advanced by
  int lag() const { return target_center - (shape_len - 1) / 2; }
};

// (K+M-1) x M linear-convolution matrix: column j holds the shape shifted
// down by j rows, so D*g is the full convolution of the shape with g.
struct ConvMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major

  double operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
};

struct ExtractionConfig {
  int alpha = 350;
  int split_len = 4500;
  int half_width = 64;  // shape covers +/- half_width around the peak
  int n_profiles = 100;
  std::uint64_t seed = 0;
  int n = 15000;  // length of the noiseless single-fault profiles
  double mag_min = 0.1;
  double mag_max = 5.0;
  double slope = -0.0002;
  // faults are placed uniformly in [lo, hi] (fractions of the block length),
  // the solver's shape-invariant region
  double position_lo = 0.35;
  double position_hi = 0.95;
  double relaxation = 1.0;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

// Step indices whose |beta| exceeds both neighbours (out-of-range neighbours
// count as 0) and min_magnitude. The slope coefficient is never a peak.
PeakList detect_peaks(const SparseEstimate& beta, double min_magnitude);

// Fig.-3 protocol: run noiseless single-fault profiles, normalize each window
// by its center value, average elementwise. Runs whose center is 0 are
// discarded; all-discarded is an error.
ClusterShape extract_cluster_shape(const ExtractionConfig& cfg);

// Per-profile normalized windows (extraction internals, exposed so the shape
// spread can be quantified).
std::vector<std::vector<double>> extract_cluster_windows(const ExtractionConfig& cfg);

// Center-crop the shape to `length` taps (odd, <= shape length), zero the center.
CompensationVector compensation_vector(const ClusterShape& shape, int length);

ConvMatrix build_convolution_matrix(const ClusterShape& shape, int m);

// Least-squares FIR inverse: g = argmin ||D g - delta(target_center)||_2,
// solved by column-pivoted QR. Default target_center = (K+M-1)/2.
DeconvFilter ls_deconv_filter(const ClusterShape& shape, int m, int target_center);
DeconvFilter ls_deconv_filter(const ClusterShape& shape, int m);

// Convolve the step coefficients with g, advancing by g.lag() so event
// positions are preserved. The slope coefficient passes through.
SparseEstimate apply_fir_deconvolution(const SparseEstimate& beta, const DeconvFilter& g);

struct DeconvolutionResult {
  SparseEstimate estimate;
  PeakList peaks;
};

// Guard band on the template scale. Individual clusters deviate from the
// averaged template by a few percent; plain magnitude scaling would leave
// under-subtraction residues that share the raw sign, which the clamp cannot
// remove. Slight over-subtraction pushes them into the clamped region.
inline constexpr double kSubtractionGuard = 1.12;

// Approximate deconvolution: detect peaks, jointly subtract each peak's
// magnitude-scaled compensation window (guard * magnitude * taps), clamp
// entries whose sign flipped (including raw zeros driven nonzero), detect
// peaks again. guard = 1 reproduces plain magnitude scaling.
DeconvolutionResult approximate_deconvolution(const SparseEstimate& beta_raw,
                                              const CompensationVector& comp,
                                              double min_magnitude,
                                              double guard = kSubtractionGuard);

}  // namespace trendbreak
