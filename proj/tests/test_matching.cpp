#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lane3d/matching.hpp"
#include "lane3d/rng.hpp"

using namespace lane3d;

namespace {

Lane3D straight_lane(double x, double y0, double y1, double z = 0.0, double step = 2.0) {
  Lane3D lane;
  for (double y = y0; y <= y1 + 1e-9; y += step) {
    lane.points.push_back({x, y, z});
    lane.visibility.push_back(1);
  }
  return lane;
}

DenseLane full_cover(const MatchConfig& cfg, double x, double z = 0.0) {
  DenseLane lane;
  const std::size_t n = cfg.dense_y_positions.size();
  lane.xs.assign(n, x);
  lane.zs.assign(n, z);
  lane.covered.assign(n, 1);
  return lane;
}

// Exhaustive minimum over all injective row->column maps.
double brute_force_min_cost(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  if (n <= m) {
    std::vector<int> cols(m);
    std::iota(cols.begin(), cols.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::sort(cols.begin(), cols.end());
    do {
      double total = 0.0;
      for (int j = 0; j < n; ++j) total += cost(j, cols[j]);
      best = std::min(best, total);
    } while (std::next_permutation(cols.begin(), cols.end()));
    return best;
  }
  return brute_force_min_cost(cost.transpose());
}

double assignment_total(const Eigen::MatrixXd& cost, const std::vector<std::pair<int, int>>& pairs) {
  double total = 0.0;
  for (const auto& [j, k] : pairs) total += cost(j, k);
  return total;
}

}  // namespace

TEST_CASE("densify: full coverage on the default grid") {
  const MatchConfig cfg = MatchConfig::defaults();
  REQUIRE(cfg.dense_y_positions.size() == 51);
  const DenseLane d = densify(straight_lane(3.0, 0.0, 100.0), cfg);
  for (std::size_t i = 0; i < d.covered.size(); ++i) {
    CHECK(d.covered[i] == 1);
    CHECK(d.xs[i] == 3.0);
    CHECK(d.zs[i] == 0.0);
  }
}

TEST_CASE("densify: window coverage") {
  const MatchConfig cfg = MatchConfig::defaults();
  const DenseLane d = densify(straight_lane(3.0, 10.0, 50.0), cfg);
  for (std::size_t i = 0; i < d.covered.size(); ++i) {
    const double y = cfg.dense_y_positions[i];
    CHECK(d.covered[i] == ((y >= 10.0 && y <= 50.0) ? 1 : 0));
  }
}

TEST_CASE("densify: visibility gap excludes interior positions") {
  const MatchConfig cfg = MatchConfig::defaults();
  Lane3D lane = straight_lane(3.0, 0.0, 100.0);
  for (std::size_t i = 0; i < lane.points.size(); ++i) {
    const double y = lane.points[i].y;
    if (y > 20.0 && y < 30.0) lane.visibility[i] = 0;
  }
  const DenseLane d = densify(lane, cfg);
  for (std::size_t i = 0; i < d.covered.size(); ++i) {
    const double y = cfg.dense_y_positions[i];
    const bool gap = y > 20.0 && y < 30.0;
    CHECK(d.covered[i] == (gap ? 0 : 1));
  }
}

TEST_CASE("lane_cost: identity and symmetry") {
  const MatchConfig cfg = MatchConfig::defaults();
  const DenseLane a = full_cover(cfg, 3.0, 0.1);
  CHECK(lane_cost(a, a, cfg).cost == 0.0);

  SeededRng rng(4242);
  DenseLane b = full_cover(cfg, 0.0);
  for (std::size_t i = 0; i < b.xs.size(); ++i) {
    b.xs[i] = rng.uniform(-5.0, 5.0);
    b.zs[i] = rng.uniform(-1.0, 1.0);
    b.covered[i] = rng.uniform01() < 0.8 ? 1 : 0;
  }
  const LaneCost ab = lane_cost(a, b, cfg);
  const LaneCost ba = lane_cost(b, a, cfg);
  CHECK(ab.cost == ba.cost);
}

TEST_CASE("lane_cost closed forms") {
  const MatchConfig cfg = MatchConfig::defaults();
  // Four edited points: identical lanes except one covers 4 extra positions.
  DenseLane a = full_cover(cfg, 3.0);
  DenseLane b = a;
  int edited = 0;
  for (std::size_t i = 0; i < a.covered.size() && edited < 4; ++i) {
    if (cfg.dense_y_positions[i] > 42.0) {
      b.covered[i] = 0;
      ++edited;
    }
  }
  REQUIRE(edited == 4);
  CHECK(lane_cost(a, b, cfg).cost == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));

  // Constant 0.3 m offset over 20 commonly covered positions.
  DenseLane c = full_cover(cfg, 0.0);
  DenseLane d = full_cover(cfg, 0.0);
  for (std::size_t i = 0; i < c.covered.size(); ++i) {
    const bool inside = cfg.dense_y_positions[i] >= 2.0 && cfg.dense_y_positions[i] <= 40.0;
    c.covered[i] = d.covered[i] = inside ? 1 : 0;
    if (inside) d.xs[i] = 0.3;
  }
  CHECK(lane_cost(c, d, cfg).cost == doctest::Approx(std::sqrt(1.8)).epsilon(1e-12));

  DenseLane short_lane;
  short_lane.xs = {0.0};
  short_lane.zs = {0.0};
  short_lane.covered = {1};
  CHECK_THROWS_AS(lane_cost(a, short_lane, cfg), LengthMismatch);
}

TEST_CASE("lane_cost pointwise distances drive the match criterion") {
  const MatchConfig cfg = MatchConfig::defaults();
  DenseLane a = full_cover(cfg, 0.0);
  DenseLane b = full_cover(cfg, 0.0);
  b.covered[10] = 0;  // edited point
  b.xs[11] = 0.4;
  const LaneCost lc = lane_cost(a, b, cfg);
  CHECK(lc.pointwise[10] == cfg.d_max);  // never strictly below d_max
  CHECK(lc.pointwise[11] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(lc.pointwise[12] == 0.0);
}

TEST_CASE("min_cost_assign small cases") {
  {
    Eigen::MatrixXd cost(2, 2);
    cost << 0, 5, 5, 0;
    const auto pairs = min_cost_assign(cost);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == std::pair<int, int>(0, 0));
    CHECK(pairs[1] == std::pair<int, int>(1, 1));
  }
  {
    Eigen::MatrixXd cost(2, 2);
    cost << 1, 2, 2, 100;
    const auto pairs = min_cost_assign(cost);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0] == std::pair<int, int>(0, 1));
    CHECK(pairs[1] == std::pair<int, int>(1, 0));
    CHECK(assignment_total(cost, pairs) == 4.0);
  }
  {
    Eigen::MatrixXd cost(1, 3);
    cost << 7, 2, 5;
    const auto pairs = min_cost_assign(cost);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair<int, int>(0, 1));
  }
  {
    Eigen::MatrixXd cost(3, 1);
    cost << 7, 2, 5;
    const auto pairs = min_cost_assign(cost);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair<int, int>(1, 0));
  }
  {
    const Eigen::MatrixXd empty(0, 4);
    CHECK(min_cost_assign(empty).empty());
  }
}

TEST_CASE("min_cost_assign equals brute force on random matrices") {
  SeededRng rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = rng.uniform_int(1, 6);
    const int m = rng.uniform_int(1, 6);
    Eigen::MatrixXd cost(n, m);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < m; ++k) {
        // Dyadic values keep every partial sum exact in double.
        cost(j, k) = static_cast<double>(rng.uniform_int(0, 1 << 16)) * 0x1.0p-10;
      }
    }
    const auto pairs = min_cost_assign(cost);
    CHECK(pairs.size() == static_cast<std::size_t>(std::min(n, m)));
    CHECK(assignment_total(cost, pairs) == brute_force_min_cost(cost));
  }
}

TEST_CASE("min_cost_assign: enlarging one entry never lowers the optimum") {
  SeededRng rng(555);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.uniform_int(2, 5);
    const int m = rng.uniform_int(2, 5);
    Eigen::MatrixXd cost(n, m);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < m; ++k) {
        cost(j, k) = static_cast<double>(rng.uniform_int(0, 1024)) * 0x1.0p-4;
      }
    }
    const double before = assignment_total(cost, min_cost_assign(cost));
    Eigen::MatrixXd bumped = cost;
    bumped(rng.uniform_int(0, n - 1), rng.uniform_int(0, m - 1)) += 8.0;
    const double after = assignment_total(bumped, min_cost_assign(bumped));
    CHECK(after >= before);
  }
}

TEST_CASE("min_cost_assign is deterministic under ties") {
  Eigen::MatrixXd cost(3, 3);
  cost << 1, 1, 1, 1, 1, 1, 1, 1, 1;
  const auto a = min_cost_assign(cost);
  const auto b = min_cost_assign(cost);
  CHECK(a == b);
  CHECK(assignment_total(cost, a) == 3.0);
}

TEST_CASE("match_frame: identical sets fully match") {
  const MatchConfig cfg = MatchConfig::defaults();
  const std::vector<Lane3D> lanes = {straight_lane(-3.0, 0.0, 100.0), straight_lane(0.0, 0.0, 100.0),
                                     straight_lane(3.0, 0.0, 100.0)};
  const MatchReport report = match_frame(lanes, lanes, cfg);
  REQUIRE(report.assignment.size() == 3);
  for (const auto& pair : report.assignment) {
    CHECK(pair.pred == pair.gt);
    CHECK(pair.cost == 0.0);
  }
  for (std::uint8_t f : report.pred_matched) CHECK(f == 1);
  for (std::uint8_t f : report.gt_matched) CHECK(f == 1);
}

TEST_CASE("match_frame: exactly 75% within threshold still matches") {
  const MatchConfig cfg = MatchConfig::defaults();
  // 20 covered positions (y = 2..40); 5 of them displaced by 2 m.
  const Lane3D gt = straight_lane(3.0, 2.0, 40.0);
  Lane3D pred = gt;
  for (auto& p : pred.points) {
    if (p.y >= 32.0) p.x = 5.0;
  }
  const MatchReport report = match_frame({pred}, {gt}, cfg);
  REQUIRE(report.assignment.size() == 1);
  CHECK(report.pred_matched[0] == 1);
  CHECK(report.gt_matched[0] == 1);

  // One more displaced point tips it below 75%.
  Lane3D worse = pred;
  for (auto& p : worse.points) {
    if (p.y >= 30.0) p.x = 5.0;
  }
  const MatchReport report2 = match_frame({worse}, {gt}, cfg);
  CHECK(report2.pred_matched[0] == 0);
}

TEST_CASE("match_frame: empty sides") {
  const MatchConfig cfg = MatchConfig::defaults();
  const std::vector<Lane3D> one = {straight_lane(0.0, 0.0, 100.0)};
  const MatchReport no_gts = match_frame(one, {}, cfg);
  CHECK(no_gts.assignment.empty());
  CHECK(no_gts.pred_matched[0] == 0);
  const MatchReport no_preds = match_frame({}, one, cfg);
  CHECK(no_preds.assignment.empty());
  CHECK(no_preds.gt_matched[0] == 0);
}

TEST_CASE("match_frame is invariant under rigid translation of both sets") {
  const MatchConfig cfg = MatchConfig::defaults();
  SeededRng rng(808);
  std::vector<Lane3D> preds, gts;
  for (double x : {-4.0, 0.0, 4.0}) {
    Lane3D gt = straight_lane(x, 0.0, 100.0);
    Lane3D pred = gt;
    for (auto& p : pred.points) p.x += rng.uniform(-0.4, 0.4);
    gts.push_back(gt);
    preds.push_back(pred);
  }
  const MatchReport base = match_frame(preds, gts, cfg);

  const double shift = 2.75;
  for (auto* lanes : {&preds, &gts}) {
    for (auto& lane : *lanes) {
      for (auto& p : lane.points) p.x += shift;
    }
  }
  const MatchReport shifted = match_frame(preds, gts, cfg);
  REQUIRE(base.assignment.size() == shifted.assignment.size());
  for (std::size_t i = 0; i < base.assignment.size(); ++i) {
    CHECK(base.assignment[i].pred == shifted.assignment[i].pred);
    CHECK(base.assignment[i].gt == shifted.assignment[i].gt);
  }
  CHECK(base.pred_matched == shifted.pred_matched);
  CHECK(base.gt_matched == shifted.gt_matched);
}
