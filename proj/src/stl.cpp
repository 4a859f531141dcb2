#include "ccpd/stl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "ccpd/loess.hpp"

namespace ccpd {

namespace {

int smallest_odd_at_least(double x) {
  int v = static_cast<int>(std::ceil(x));
  if (v % 2 == 0) ++v;
  return std::max(v, 3);
}

// Centered moving average; output length len - p + 1. Prefix sums in long
// double keep the 800k-sample accumulation exact enough.
std::vector<double> moving_average(std::span<const double> x, int p) {
  std::vector<long double> prefix(x.size() + 1, 0.0L);
  for (size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i];
  std::vector<double> out(x.size() - p + 1);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<double>((prefix[i + p] - prefix[i]) / p);
  return out;
}

// Smooths each cycle subseries (points t = k, k+p, k+2p, ...) with degree-0
// loess and evaluates one position before and after, producing the extended
// series C over signal positions [-p, n+p).
std::vector<double> cycle_subseries_smooth(std::span<const double> detrended, int period,
                                           int seasonal_window,
                                           std::span<const double> robustness) {
  const long n = static_cast<long>(detrended.size());
  const long p = period;
  std::vector<double> extended(n + 2 * p);

#pragma omp parallel for schedule(static)
  for (long k = 0; k < p; ++k) {
    const long m = (n - 1 - k) / p + 1;  // subseries length
    std::vector<double> sub(m), rho_sub;
    for (long j = 0; j < m; ++j) sub[j] = detrended[k + j * p];
    std::span<const double> rho;
    if (!robustness.empty()) {
      rho_sub.resize(m);
      for (long j = 0; j < m; ++j) rho_sub[j] = robustness[k + j * p];
      rho = rho_sub;
    }
    const int window = static_cast<int>(std::min<long>(seasonal_window, m));
    for (long site = -1; site <= m; ++site)
      extended[k + site * p + p] = loess_fit_at(sub, static_cast<double>(site), window, 0, rho);
  }
  return extended;
}

std::vector<double> low_pass(std::span<const double> extended, int period, int lowpass_window,
                             int eval_stride) {
  auto a = moving_average(extended, period);
  auto b = moving_average(a, period);
  auto c = moving_average(b, 3);
  return loess_smooth(c, std::min<int>(lowpass_window, static_cast<int>(c.size())), 1, {},
                      eval_stride);
}

std::vector<double> robustness_weights(std::span<const double> residual) {
  std::vector<double> mags(residual.size());
  for (size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(residual[i]);
  std::vector<double> sorted = mags;
  const size_t m1 = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + m1, sorted.end());
  double median = sorted[m1];
  if (sorted.size() % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + m1);
    median = 0.5 * (median + lower);
  }
  const double cmad = 6.0 * median;
  std::vector<double> rho(residual.size(), 1.0);
  if (cmad <= 0.0) return rho;  // perfect fit: keep full weights
  for (size_t i = 0; i < rho.size(); ++i) {
    const double u = mags[i] / cmad;
    if (u <= 0.001) {
      rho[i] = 1.0;
    } else if (u >= 0.999) {
      rho[i] = 0.0;
    } else {
      const double c = 1.0 - u * u;
      rho[i] = c * c;
    }
  }
  return rho;
}

}  // namespace

StlConfig StlConfig::resolved(size_t n) const {
  StlConfig cfg = *this;
  if (cfg.period < 4) throw std::invalid_argument("stl: period must be at least 4");
  if (static_cast<size_t>(cfg.period) * 2 >= n)
    throw std::invalid_argument("stl: period " + std::to_string(cfg.period) +
                                " must be below half the series length " + std::to_string(n));
  if (cfg.inner_iterations < 1) throw std::invalid_argument("stl: inner_iterations must be >= 1");
  if (cfg.outer_iterations < 0) throw std::invalid_argument("stl: outer_iterations must be >= 0");
  if (cfg.trend_window == 0) cfg.trend_window = smallest_odd_at_least(1.5 * cfg.period);
  if (cfg.lowpass_window == 0) cfg.lowpass_window = smallest_odd_at_least(cfg.period);
  if (cfg.eval_stride == 0) cfg.eval_stride = std::max(1, cfg.period / 10);
  if (cfg.trend_window % 2 == 0 || cfg.lowpass_window % 2 == 0)
    throw std::invalid_argument("stl: trend and lowpass windows must be odd");
  if (cfg.seasonal_window < 1) throw std::invalid_argument("stl: seasonal_window must be >= 1");
  if (cfg.loess_degree != 0 && cfg.loess_degree != 1)
    throw std::invalid_argument("stl: loess_degree must be 0 or 1");
  if (static_cast<size_t>(cfg.trend_window) > n)
    throw std::invalid_argument("stl: trend window exceeds series length");
  return cfg;
}

Decomposition stl_decompose(std::span<const double> series, const StlConfig& config) {
  const StlConfig cfg = config.resolved(series.size());
  const size_t n = series.size();
  const int p = cfg.period;

  Decomposition d;
  d.config = cfg;
  d.trend.assign(n, 0.0);
  d.seasonal.assign(n, 0.0);

  std::vector<double> rho;  // empty until the first robustness pass
  std::vector<double> work(n);

  const auto inner_loop = [&] {
    for (int it = 0; it < cfg.inner_iterations; ++it) {
      for (size_t t = 0; t < n; ++t) work[t] = series[t] - d.trend[t];
      const auto extended = cycle_subseries_smooth(work, p, cfg.seasonal_window, rho);
      const auto lp = low_pass(extended, p, cfg.lowpass_window, cfg.eval_stride);
      for (size_t t = 0; t < n; ++t) d.seasonal[t] = extended[t + p] - lp[t];
      for (size_t t = 0; t < n; ++t) work[t] = series[t] - d.seasonal[t];
      d.trend = loess_smooth(work, cfg.trend_window, cfg.loess_degree, rho, cfg.eval_stride);
    }
  };

  inner_loop();
  for (int outer = 0; outer < cfg.outer_iterations; ++outer) {
    for (size_t t = 0; t < n; ++t) work[t] = series[t] - d.trend[t] - d.seasonal[t];
    rho = robustness_weights(work);
    inner_loop();
  }

  d.residual.resize(n);
  for (size_t t = 0; t < n; ++t) d.residual[t] = series[t] - d.trend[t] - d.seasonal[t];
  return d;
}

Decomposition stl_decompose(const Signal& signal, const StlConfig& config) {
  std::vector<double> y(signal.samples.begin(), signal.samples.end());
  return stl_decompose(y, config);
}

ResidualSet multi_decompose(const Signal& signal, const std::array<int, 4>& windows,
                            uint32_t signal_id, int inner_iterations, int outer_iterations) {
  for (size_t i = 0; i < windows.size(); ++i)
    for (size_t j = i + 1; j < windows.size(); ++j)
      if (windows[i] == windows[j])
        throw std::invalid_argument("multi_decompose: windows must be distinct (got " +
                                    std::to_string(windows[i]) + " twice)");

  std::vector<double> y(signal.samples.begin(), signal.samples.end());
  ResidualSet set;
  set.signal_id = signal_id;
  set.windows = windows;

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int w = 0; w < 4; ++w) {
    try {
      StlConfig cfg;
      cfg.period = windows[w];
      cfg.inner_iterations = inner_iterations;
      cfg.outer_iterations = outer_iterations;
      set.residuals[w] = std::move(stl_decompose(y, cfg).residual);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return set;
}

std::array<int, 4> scaled_windows(const std::array<int, 4>& base, size_t sample_count,
                                  size_t reference_count) {
  std::array<int, 4> out{};
  for (size_t i = 0; i < base.size(); ++i) {
    const double scaled = static_cast<double>(base[i]) * static_cast<double>(sample_count) /
                          static_cast<double>(reference_count);
    out[i] = std::max(4, static_cast<int>(std::llround(scaled)));
  }
  return out;
}

void dump_decomposition_csv(const std::filesystem::path& path, const Decomposition& d) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,trend,seasonal,residual\n";
  char buf[96];
  for (size_t t = 0; t < d.trend.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", t, d.trend[t], d.seasonal[t],
                  d.residual[t]);
    out << buf;
  }
}

}  // namespace ccpd
