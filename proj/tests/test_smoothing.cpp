#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ccpd/loess.hpp"
#include "ccpd/rng.hpp"
#include "ccpd/stl.hpp"
#include "ccpd/synth.hpp"
#include "support/reference.hpp"

using namespace ccpd;

namespace {

std::vector<double> random_series(size_t n, uint64_t seed, double scale = 10.0) {
  Rng rng(seed);
  std::vector<double> y(n);
  for (auto& v : y) v = scale * (rng.next_double() - 0.5);
  return y;
}

double rmse(std::span<const double> a, std::span<const double> b) {
  double ss = 0;
  for (size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(ss / static_cast<double>(a.size()));
}

double max_abs(std::span<const double> a) {
  double m = 0;
  for (const double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("loess reproduces constants for any window and degree") {
  const std::vector<double> c(40, 3.25);
  for (const int window : {3, 7, 21}) {
    for (const int degree : {0, 1}) {
      const auto out = loess_smooth(c, window, degree);
      for (const double v : out) CHECK(v == doctest::Approx(3.25).epsilon(1e-12));
    }
  }
}

TEST_CASE("degree-1 loess reproduces straight lines exactly") {
  std::vector<double> y(50);
  for (size_t t = 0; t < y.size(); ++t) y[t] = -4.5 * static_cast<double>(t) + 17.0;
  const auto out = loess_smooth(y, 11, 1);
  for (size_t t = 0; t < y.size(); ++t)
    CHECK(std::abs(out[t] - y[t]) <= 1e-9 * std::abs(y[t]) + 1e-9);
}

TEST_CASE("stride-1 loess matches the brute-force WLS oracle on random series") {
  Rng seeds(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 8 + seeds.next_below(57);  // lengths up to 64
    const int window = 2 + static_cast<int>(seeds.next_below(static_cast<uint64_t>(n) - 2));
    const int degree = static_cast<int>(seeds.next_below(2));
    const auto y = random_series(n, seeds.next_u64());
    const auto ours = loess_smooth(y, window, degree, {}, 1);
    const auto ref = testing::loess_reference(y, window, degree);
    for (size_t t = 0; t < n; ++t) {
      const double denom = std::max({std::abs(ours[t]), std::abs(ref[t]), 1.0});
      CHECK(std::abs(ours[t] - ref[t]) / denom < 1e-9);
    }
  }
}

TEST_CASE("loess respects robustness weights (oracle comparison)") {
  const auto y = random_series(40, 99);
  std::vector<double> rho(40);
  Rng rng(5);
  for (auto& r : rho) r = rng.next_double();
  const auto ours = loess_smooth(y, 9, 1, rho, 1);
  const auto ref = testing::loess_reference(y, 9, 1, rho);
  for (size_t t = 0; t < y.size(); ++t)
    CHECK(std::abs(ours[t] - ref[t]) < 1e-9 * std::max(1.0, std::abs(ref[t])));
}

TEST_CASE("loess is shift-equivariant") {
  const auto y = random_series(64, 3);
  std::vector<double> shifted(y);
  for (auto& v : shifted) v += 1234.5;
  const auto a = loess_smooth(y, 13, 1);
  const auto b = loess_smooth(shifted, 13, 1);
  for (size_t t = 0; t < y.size(); ++t) CHECK(std::abs(b[t] - a[t] - 1234.5) < 1e-9 * 1234.5);
}

TEST_CASE("window larger than the series is rejected") {
  const std::vector<double> y(10, 1.0);
  CHECK_THROWS_AS(loess_smooth(y, 11, 1), std::invalid_argument);
  CHECK_THROWS_AS(loess_fit_at(y, 0.0, 11, 1), std::invalid_argument);
}

TEST_CASE("all-zero robustness weights fall back to the tricube mean") {
  const auto y = random_series(20, 8);
  const std::vector<double> rho(20, 0.0);
  const auto with_zero_rho = loess_smooth(y, 7, 1, rho, 1);
  const auto plain = loess_smooth(y, 7, 1, {}, 1);
  for (size_t t = 0; t < y.size(); ++t) CHECK(with_zero_rho[t] == doctest::Approx(plain[t]));
}

TEST_CASE("strided evaluation tracks the exact fit on smooth inputs") {
  const size_t n = 2000;
  std::vector<double> y(n);
  for (size_t t = 0; t < n; ++t)
    y[t] = 100.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 500.0);
  const auto exact = loess_smooth(y, 101, 1, {}, 1);
  const auto strided = loess_smooth(y, 101, 1, {}, 10);
  CHECK(rmse(strided, exact) / rmse(exact, std::vector<double>(n, 0.0)) < 0.02);
}

TEST_CASE("constant signal decomposes into constant trend and nothing else") {
  Signal s;
  s.samples.assign(600, 321);
  StlConfig cfg;
  cfg.period = 25;
  const auto d = stl_decompose(s, cfg);
  for (size_t t = 0; t < 600; ++t) {
    CHECK(std::abs(d.seasonal[t]) < 1e-6 * 321 + 1e-9);
    CHECK(std::abs(d.residual[t]) < 1e-6 * 321 + 1e-9);
    CHECK(d.trend[t] == doctest::Approx(321.0).epsilon(1e-9));
  }
}

TEST_CASE("additive identity holds exactly up to round-off") {
  Rng seeds(555);
  for (int trial = 0; trial < 5; ++trial) {
    SynthSpec spec;
    spec.sample_count = 2000;
    spec.background_noise_sigma = 25.0;
    spec.pd_bursts.push_back({0.3, 0.6, 12, 100.0, 400.0});
    spec.seed = seeds.next_u64();
    const auto gen = generate_signal(spec);
    StlConfig cfg;
    cfg.period = 50;
    const auto d = stl_decompose(gen.signal, cfg);
    const double bound = 1e-9 * max_abs(std::vector<double>(gen.signal.samples.begin(),
                                                            gen.signal.samples.end()));
    for (size_t t = 0; t < spec.sample_count; ++t) {
      const double y = gen.signal.samples[t];
      CHECK(std::abs(y - d.trend[t] - d.seasonal[t] - d.residual[t]) <= bound);
    }
  }
}

// Fixture: 10-cycle sinusoid with one spike. The spike must land in the
// residual (robustness pass) and the smooth parts must reconstruct the
// sinusoid. A faithful STL with these window defaults reconstructs to
// ~7% RMSE (the reference implementation of Cleveland's algorithm gives
// 0.0698 on this exact fixture), so the fidelity bound is 0.09.
TEST_CASE("sinusoid plus spike: spike stays in the residual, smooth parts track the sinusoid") {
  const size_t n = 4000;
  std::vector<double> clean(n);
  for (size_t t = 0; t < n; ++t)
    clean[t] = 1000.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 400.0);
  std::vector<double> y = clean;
  y[1000] += 800.0;

  StlConfig cfg;
  cfg.period = 100;
  const auto d = stl_decompose(y, cfg);

  CHECK(std::abs(d.residual[1000]) >= 0.8 * 800.0);

  std::vector<double> smooth(n);
  for (size_t t = 0; t < n; ++t) smooth[t] = d.trend[t] + d.seasonal[t];
  CHECK(rmse(smooth, clean) / 1000.0 < 0.09);
}

TEST_CASE("one-cycle sinusoid with noise reconstructs within 5% at every scaled window") {
  SynthSpec spec;
  spec.sample_count = 8000;
  spec.fundamental_amplitude = 1000.0;
  spec.background_noise_sigma = 10.0;
  spec.seed = 31;
  const auto gen = generate_signal(spec);

  for (const int period : {4, 10, 100, 1000}) {
    StlConfig cfg;
    cfg.period = period;
    const auto d = stl_decompose(gen.signal, cfg);
    std::vector<double> smooth(spec.sample_count);
    for (size_t t = 0; t < spec.sample_count; ++t) smooth[t] = d.trend[t] + d.seasonal[t];
    CHECK(rmse(smooth, gen.truth.clean) / 1000.0 < 0.05);
  }
}

TEST_CASE("spike locality: a distant spike barely moves the robust trend") {
  const size_t n = 3000;
  SynthSpec spec;
  spec.sample_count = n;
  spec.fundamental_amplitude = 1000.0;
  spec.background_noise_sigma = 1.0;
  spec.seed = 17;
  const auto gen = generate_signal(spec);
  std::vector<double> base(gen.signal.samples.begin(), gen.signal.samples.end());
  std::vector<double> spiked = base;
  spiked[500] += 100.0;  // 100 sigma

  StlConfig cfg;
  cfg.period = 50;  // trend window 77
  const auto d0 = stl_decompose(base, cfg);
  const auto d1 = stl_decompose(spiked, cfg);

  const auto resolved = cfg.resolved(n);
  const size_t far = 500 + 2 * static_cast<size_t>(resolved.trend_window);
  for (size_t t = far; t < n; ++t)
    CHECK(std::abs(d1.trend[t] - d0.trend[t]) < 1e-6 * 100.0);
}

TEST_CASE("multi_decompose returns 4 residuals and is deterministic") {
  SynthSpec spec;
  spec.sample_count = 4000;
  spec.background_noise_sigma = 12.0;
  spec.pd_bursts.push_back({0.2, 0.5, 30, 80.0, 250.0});
  spec.seed = 77;
  const auto gen = generate_signal(spec);

  const std::array<int, 4> windows{4, 10, 100, 1000};
  const auto a = multi_decompose(gen.signal, windows, 1);
  const auto b = multi_decompose(gen.signal, windows, 1);
  for (int w = 0; w < 4; ++w) {
    REQUIRE(a.residuals[w].size() == spec.sample_count);
    CHECK(a.residuals[w] == b.residuals[w]);
  }
  CHECK_THROWS_AS(multi_decompose(gen.signal, {10, 10, 100, 1000}, 1), std::invalid_argument);
}

TEST_CASE("desk-scale window scaling matches the proportional rule") {
  const std::array<int, 4> base{100, 1000, 10000, 100000};
  CHECK(scaled_windows(base, 8000) == std::array<int, 4>{4, 10, 100, 1000});
  CHECK(scaled_windows(base, 800000) == base);
  CHECK(scaled_windows(base, 400000) == std::array<int, 4>{50, 500, 5000, 50000});
}

TEST_CASE("config validation rejects bad periods and even windows") {
  const std::vector<double> y(100, 0.0);
  StlConfig cfg;
  cfg.period = 3;
  CHECK_THROWS_AS(stl_decompose(y, cfg), std::invalid_argument);
  cfg.period = 60;  // >= n/2
  CHECK_THROWS_AS(stl_decompose(y, cfg), std::invalid_argument);
  cfg.period = 10;
  cfg.trend_window = 16;
  CHECK_THROWS_AS(stl_decompose(y, cfg), std::invalid_argument);
}
