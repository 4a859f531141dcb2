#pragma once

#include <span>
#include <vector>

namespace ccpd {

/// Locally weighted least-squares fit evaluated at one site. The
/// neighborhood is the `window` nearest indices (clamped to the series), with
/// tricube weights (1 - (d/h)^3)^3, h = distance to the farthest neighbor,
/// optionally multiplied by per-point robustness weights. degree 0 fits a
/// weighted mean, degree 1 a weighted line. The site may lie outside
/// [0, n-1]; the local polynomial extrapolates.
///
/// Degenerate cases fall back in order: zero combined weight -> tricube-only
/// weights -> plain neighborhood mean.
double loess_fit_at(std::span<const double> series, double site, int window, int degree,
                    std::span<const double> robustness = {});

/// Smooths the whole series. Fits are computed at sites 0, stride,
/// 2*stride, ... plus the final index, in parallel; indices in between are
/// linearly interpolated. stride 1 is the exact per-point fit.
std::vector<double> loess_smooth(std::span<const double> series, int window, int degree,
                                 std::span<const double> robustness = {}, int eval_stride = 1);

}  // namespace ccpd
