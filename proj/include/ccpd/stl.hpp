#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ccpd/types.hpp"

namespace ccpd {

/// Seasonal-trend decomposition parameters. Zero-valued window/stride fields
/// resolve to the defaults below at run time.
struct StlConfig {
  int period = 0;             // cycle-subseries spacing, in samples
  int inner_iterations = 2;
  int outer_iterations = 1;   // robustness-weight updates
  int trend_window = 0;       // 0 -> smallest odd >= 1.5 * period
  int lowpass_window = 0;     // 0 -> smallest odd >= period
  int seasonal_window = 7;    // loess span across each cycle subseries, degree 0
  int loess_degree = 1;       // trend smoothing degree
  int eval_stride = 0;        // 0 -> max(1, period / 10)

  /// Fills the zero fields and validates against a series of length n.
  StlConfig resolved(size_t n) const;
};

struct Decomposition {
  std::vector<double> trend;
  std::vector<double> seasonal;
  std::vector<double> residual;  // y - trend - seasonal, exact
  StlConfig config;              // resolved
};

/// Residuals from four independent decompositions of one signal.
struct ResidualSet {
  uint32_t signal_id = 0;
  std::array<int, 4> windows{};
  std::array<std::vector<double>, 4> residuals;
};

Decomposition stl_decompose(std::span<const double> series, const StlConfig& config);
Decomposition stl_decompose(const Signal& signal, const StlConfig& config);

/// Four decompositions with the given seasonal periods (distinct, each valid
/// for the signal length); only residuals are retained. Windows may run
/// concurrently; the result is ordered as given.
ResidualSet multi_decompose(const Signal& signal, const std::array<int, 4>& windows,
                            uint32_t signal_id = 0, int inner_iterations = 2,
                            int outer_iterations = 1);

/// Scales the base windows proportionally with the sample count relative to
/// the full-length recording (800,000 samples), clamping at period 4.
std::array<int, 4> scaled_windows(const std::array<int, 4>& base, size_t sample_count,
                                  size_t reference_count = 800000);

/// Writes `t,trend,seasonal,residual` rows for plotting.
void dump_decomposition_csv(const std::filesystem::path& path, const Decomposition& d);

}  // namespace ccpd
