#include "lane3d/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "interp.hpp"

namespace lane3d {

MatchConfig MatchConfig::defaults() {
  MatchConfig cfg;
  for (double y = 0.0; y <= 100.0 + 1e-9; y += 2.0) {
    cfg.dense_y_positions.push_back(y);
  }
  return cfg;
}

DenseLane densify(const Lane3D& lane, const MatchConfig& cfg) {
  const std::size_t n = cfg.dense_y_positions.size();
  DenseLane out;
  out.xs.assign(n, 0.0);
  out.zs.assign(n, 0.0);
  out.covered.assign(n, 0);
  out.prob = lane.prob;

  std::vector<double> ys, xs, zs;
  ys.reserve(lane.points.size());
  xs.reserve(lane.points.size());
  zs.reserve(lane.points.size());
  for (const EgoPoint& p : lane.points) {
    ys.push_back(p.y);
    xs.push_back(p.x);
    zs.push_back(p.z);
  }
  const auto segments = detail::visible_intervals(ys, lane.visibility);

  for (std::size_t i = 0; i < n; ++i) {
    const double y = cfg.dense_y_positions[i];
    if (!detail::in_intervals(segments, y)) continue;
    out.covered[i] = 1;
    out.xs[i] = detail::interp_clamped(ys, xs, y);
    out.zs[i] = detail::interp_clamped(ys, zs, y);
  }
  return out;
}

LaneCost lane_cost(const DenseLane& a, const DenseLane& b, const MatchConfig& cfg) {
  if (a.xs.size() != b.xs.size()) {
    throw LengthMismatch("dense lanes sampled on different grids");
  }
  const std::size_t n = a.xs.size();
  LaneCost out;
  out.pointwise.assign(n, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool ca = a.covered[i];
    const bool cb = b.covered[i];
    if (ca && cb) {
      const double dx = a.xs[i] - b.xs[i];
      const double dz = a.zs[i] - b.zs[i];
      const double sq = dx * dx + dz * dz;
      sum += sq;
      out.pointwise[i] = std::sqrt(sq);
    } else if (ca != cb) {
      // Edited point: charged d_max, and its point-wise distance is d_max so
      // it never counts as within threshold.
      sum += cfg.edited_cost_squared ? cfg.d_max * cfg.d_max : cfg.d_max;
      out.pointwise[i] = cfg.d_max;
    }
  }
  out.cost = std::sqrt(sum);
  return out;
}

std::vector<std::pair<int, int>> min_cost_assign(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  const int rounds = std::min(n, m);
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<int> match_row(n, -1), match_col(m, -1);
  std::vector<double> pot_row(n, 0.0), pot_col(m, 0.0);

  for (int round = 0; round < rounds; ++round) {
    // Multi-source Dijkstra over the residual graph: every unmatched row is a
    // source; reduced costs stay nonnegative through the potentials.
    std::vector<double> dist_row(n, inf), dist_col(m, inf);
    std::vector<int> parent_col(m, -1);
    std::vector<char> done_row(n, 0), done_col(m, 0);
    for (int j = 0; j < n; ++j) {
      if (match_row[j] < 0) dist_row[j] = 0.0;
    }

    while (true) {
      int best_side = -1, best_idx = -1;
      double best = inf;
      for (int j = 0; j < n; ++j) {
        if (!done_row[j] && dist_row[j] < best) {
          best = dist_row[j];
          best_side = 0;
          best_idx = j;
        }
      }
      for (int k = 0; k < m; ++k) {
        if (!done_col[k] && dist_col[k] < best) {
          best = dist_col[k];
          best_side = 1;
          best_idx = k;
        }
      }
      if (best_side < 0) break;

      if (best_side == 0) {
        const int j = best_idx;
        done_row[j] = 1;
        for (int k = 0; k < m; ++k) {
          if (done_col[k] || match_row[j] == k) continue;
          const double rc = std::max(0.0, cost(j, k) + pot_row[j] - pot_col[k]);
          if (dist_row[j] + rc < dist_col[k]) {
            dist_col[k] = dist_row[j] + rc;
            parent_col[k] = j;
          }
        }
      } else {
        const int k = best_idx;
        done_col[k] = 1;
        const int j = match_col[k];
        if (j >= 0 && !done_row[j]) {
          const double rc = std::max(0.0, pot_col[k] - pot_row[j] - cost(j, k));
          if (dist_col[k] + rc < dist_row[j]) {
            dist_row[j] = dist_col[k] + rc;
          }
        }
      }
    }

    // Cheapest unmatched column terminates the augmenting path.
    int end_col = -1;
    double end_dist = inf;
    for (int k = 0; k < m; ++k) {
      if (match_col[k] < 0 && dist_col[k] < end_dist) {
        end_dist = dist_col[k];
        end_col = k;
      }
    }
    if (end_col < 0) break;

    for (int j = 0; j < n; ++j) pot_row[j] += std::min(dist_row[j], end_dist);
    for (int k = 0; k < m; ++k) pot_col[k] += std::min(dist_col[k], end_dist);

    int k = end_col;
    while (k >= 0) {
      const int j = parent_col[k];
      const int prev = match_row[j];
      match_row[j] = k;
      match_col[k] = j;
      k = prev;
    }
  }

  std::vector<std::pair<int, int>> out;
  out.reserve(rounds);
  for (int j = 0; j < n; ++j) {
    if (match_row[j] >= 0) out.emplace_back(j, match_row[j]);
  }
  return out;
}

MatchReport match_dense(const std::vector<DenseLane>& preds, const std::vector<DenseLane>& gts,
                        const MatchConfig& cfg) {
  const int n = static_cast<int>(preds.size());
  const int m = static_cast<int>(gts.size());
  MatchReport report;
  report.pred_matched.assign(n, 0);
  report.gt_matched.assign(m, 0);
  if (n == 0 || m == 0) return report;

  Eigen::MatrixXd costs(n, m);
  std::vector<std::vector<double>> pointwise(static_cast<std::size_t>(n) * m);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < m; ++k) {
      LaneCost lc = lane_cost(preds[j], gts[k], cfg);
      costs(j, k) = lc.cost;
      pointwise[static_cast<std::size_t>(j) * m + k] = std::move(lc.pointwise);
    }
  }

  const auto assignment = min_cost_assign(costs);
  for (const auto& [j, k] : assignment) {
    const std::vector<double>& dists = pointwise[static_cast<std::size_t>(j) * m + k];

    const auto matched_over = [&](const std::vector<std::uint8_t>& covered) {
      long total = 0, within = 0;
      for (std::size_t i = 0; i < covered.size(); ++i) {
        if (!covered[i]) continue;
        ++total;
        if (dists[i] < cfg.d_max) ++within;
      }
      return total > 0 &&
             static_cast<double>(within) + 1e-9 >= cfg.match_fraction * static_cast<double>(total);
    };
    report.pred_matched[j] = matched_over(preds[j].covered) ? 1 : 0;
    report.gt_matched[k] = matched_over(gts[k].covered) ? 1 : 0;
    report.assignment.push_back({j, k, costs(j, k)});
    report.pointwise.push_back(dists);
  }
  return report;
}

MatchReport match_frame(const std::vector<Lane3D>& preds, const std::vector<Lane3D>& gts,
                        const MatchConfig& cfg) {
  std::vector<DenseLane> dp, dg;
  dp.reserve(preds.size());
  dg.reserve(gts.size());
  for (const Lane3D& lane : preds) dp.push_back(densify(lane, cfg));
  for (const Lane3D& lane : gts) dg.push_back(densify(lane, cfg));
  return match_dense(dp, dg, cfg);
}

}  // namespace lane3d
