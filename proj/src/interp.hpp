// Internal piecewise-linear sampling helpers shared by the anchor codec and
// the dense resampler. Abscissas are expected in ascending order.
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace lane3d::detail {

/// Linear interpolation of (ts, vs) at t, clamped to the endpoint values
/// outside [ts.front(), ts.back()].
inline double interp_clamped(std::span<const double> ts, std::span<const double> vs, double t) {
  const std::size_t n = ts.size();
  if (t <= ts.front()) return vs.front();
  if (t >= ts.back()) return vs.back();
  std::size_t hi = 1;
  while (hi < n - 1 && ts[hi] < t) ++hi;
  const std::size_t lo = hi - 1;
  const double span = ts[hi] - ts[lo];
  if (!(span > 0.0)) return vs[lo];
  const double w = (t - ts[lo]) / span;
  return vs[lo] + w * (vs[hi] - vs[lo]);
}

/// Closed intervals of the abscissa covered by visible geometry: every
/// segment whose two endpoints are both visible, plus degenerate intervals
/// for isolated visible points.
inline std::vector<std::pair<double, double>> visible_intervals(std::span<const double> ts,
                                                                std::span<const std::uint8_t> flags) {
  std::vector<std::pair<double, double>> out;
  const std::size_t n = ts.size();
  std::size_t i = 0;
  while (i < n) {
    if (!flags[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && flags[j + 1]) ++j;
    out.emplace_back(ts[i], ts[j]);  // degenerate when j == i
    i = j + 1;
  }
  return out;
}

/// Endpoint slack absorbs transform round-off: a lane regenerated through
/// the top-view maps lands within ~1e-12 of its nominal span, so membership
/// at segment borders must not flicker.
inline bool in_intervals(const std::vector<std::pair<double, double>>& intervals, double t,
                         double eps = 1e-9) {
  for (const auto& [a, b] : intervals) {
    if (t >= a - eps && t <= b + eps) return true;
  }
  return false;
}

}  // namespace lane3d::detail
