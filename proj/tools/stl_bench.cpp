// Timing harness comparing the strided OpenMP smoothing kernels against the
// brute-force serial reference used by the tests, and single- vs multi-thread
// runs of the full decomposition. Parallel runs must reproduce the serial
// output bit-for-bit (independent evaluation sites); the reference differs
// only by the strided interpolation.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "ccpd/loess.hpp"
#include "ccpd/rng.hpp"
#include "ccpd/stl.hpp"

#include "support/reference.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<double> test_series(size_t n, uint64_t seed) {
  ccpd::Rng rng(seed);
  std::vector<double> y(n);
  for (size_t t = 0; t < n; ++t)
    y[t] = 1000.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n)) +
           10.0 * rng.gaussian();
  return y;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  size_t n = 200000;
  int period = 1000;
  if (argc > 1) n = std::stoul(argv[1]);
  if (argc > 2) period = std::stoi(argv[2]);
  const int max_threads = omp_get_max_threads();

  const auto y = test_series(n, 42);
  const int window = 2 * (static_cast<int>(1.5 * period) / 2) + 1;
  const int stride = std::max(1, period / 10);

  std::printf("series n=%zu, loess window=%d, stride=%d, max threads=%d\n\n", n, window, stride,
              max_threads);
  std::printf("%-36s %10s %12s\n", "kernel", "time/ms", "max|diff|");

  // Brute-force per-point reference (serial, stride 1): the ground truth the
  // unit tests compare against. Too slow for the full series, so a slice.
  const size_t ref_n = std::min<size_t>(n, 20000);
  const std::vector<double> slice(y.begin(), y.begin() + ref_n);
  auto t0 = Clock::now();
  const auto ref = ccpd::testing::loess_reference(slice, window, 1);
  const double ref_ms = ms_since(t0);

  t0 = Clock::now();
  const auto exact = ccpd::loess_smooth(slice, window, 1, {}, 1);
  std::printf("%-36s %10.1f %12.3g  (n=%zu)\n", "reference brute-force WLS", ref_ms, 0.0, ref_n);
  std::printf("%-36s %10.1f %12.3g\n", "loess stride 1", ms_since(t0), max_abs_diff(ref, exact));

  t0 = Clock::now();
  const auto strided = ccpd::loess_smooth(slice, window, 1, {}, stride);
  std::printf("%-36s %10.1f %12.3g  (vs brute force)\n", "loess strided", ms_since(t0),
              max_abs_diff(ref, strided));

  omp_set_num_threads(1);
  t0 = Clock::now();
  const auto serial = ccpd::loess_smooth(y, window, 1, {}, stride);
  const double serial_ms = ms_since(t0);

  omp_set_num_threads(max_threads);
  t0 = Clock::now();
  const auto parallel = ccpd::loess_smooth(y, window, 1, {}, stride);
  const double parallel_ms = ms_since(t0);
  std::printf("%-36s %10.1f %12s\n", "loess full series, 1 thread", serial_ms, "-");
  std::printf("%-36s %10.1f %12.3g  (speedup %.2fx, must be 0)\n", "loess full series, parallel",
              parallel_ms, max_abs_diff(serial, parallel), serial_ms / parallel_ms);

  ccpd::StlConfig cfg;
  cfg.period = period;

  omp_set_num_threads(1);
  t0 = Clock::now();
  const auto stl_serial = ccpd::stl_decompose(y, cfg);
  const double stl_serial_ms = ms_since(t0);

  omp_set_num_threads(max_threads);
  t0 = Clock::now();
  const auto stl_parallel = ccpd::stl_decompose(y, cfg);
  const double stl_parallel_ms = ms_since(t0);
  std::printf("%-36s %10.1f %12s\n", "stl_decompose, 1 thread", stl_serial_ms, "-");
  std::printf("%-36s %10.1f %12.3g  (speedup %.2fx, must be 0)\n", "stl_decompose, parallel",
              stl_parallel_ms, max_abs_diff(stl_serial.residual, stl_parallel.residual),
              stl_serial_ms / stl_parallel_ms);
  return 0;
}
