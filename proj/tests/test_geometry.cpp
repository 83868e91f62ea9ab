#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <queue>
#include <random>

#include "avp/geometry.hpp"

using namespace avp;

namespace {

// Single-source shortest paths over the edge list, used as an oracle.
std::vector<double> dijkstra(const ViewGraph& g, int source) {
  const int n = static_cast<int>(g.size());
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (int v : g.edges()[u]) {
      const double nd = d + great_circle_distance(g.at(u), g.at(v));
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.push({nd, v});
      }
    }
  }
  return dist;
}

}  // namespace

TEST(Viewsphere, TwoPointsAreAntipodal) {
  const ViewGraph g = build_viewsphere(2, 1.0, false, {1, 1.0});
  ASSERT_EQ(g.size(), 2u);
  EXPECT_NEAR((g.at(0).position + g.at(1).position).norm(), 0.0, 1e-12);
  EXPECT_NEAR(g.path_length(0, 1), M_PI, 1e-12);
}

TEST(Viewsphere, FullLatticeOnUnitSphere) {
  const ViewGraph g = build_viewsphere(128, 1.0, false);
  ASSERT_EQ(g.size(), 128u);
  for (const auto& v : g.viewpoints()) EXPECT_NEAR(v.position.norm(), 1.0, 1e-12);
}

TEST(Viewsphere, UpperHemisphereOf84Has42) {
  const ViewGraph g = build_viewsphere(84, 1.0, true);
  ASSERT_EQ(g.size(), 42u);
  for (const auto& v : g.viewpoints()) EXPECT_GE(v.position.z(), 0.0);
  for (int i = 0; i < 42; ++i) EXPECT_EQ(g.at(i).id, i);
}

TEST(Viewsphere, SensorLooksAtOrigin) {
  const ViewGraph g = build_viewsphere(48, 1.3, false);
  for (const auto& v : g.viewpoints()) {
    const Vec3 axis = v.orientation * Vec3::UnitZ();
    EXPECT_NEAR((axis + v.position.normalized()).norm(), 0.0, 1e-9);
    EXPECT_NEAR(v.orientation.norm(), 1.0, 1e-12);
  }
}

TEST(Viewsphere, MoveCostMatchesDijkstraOracle) {
  for (int count : {20, 48, 84}) {
    const ViewGraph g = build_viewsphere(count, 1.0, count == 84, {6, 1.0});
    const Eigen::MatrixXd cost = g.move_cost_matrix();
    for (int s = 0; s < static_cast<int>(g.size()); ++s) {
      const auto d = dijkstra(g, s);
      for (int t = 0; t < static_cast<int>(g.size()); ++t) {
        EXPECT_NEAR(g.path_length(s, t), d[t], 1e-9);
        EXPECT_NEAR(cost(s, t), d[t] + 1.0, 1e-9);
      }
    }
  }
}

TEST(Viewsphere, EdgesAreSymmetric) {
  const ViewGraph g = build_viewsphere(42, 1.0, false, {5, 1.0});
  for (int a = 0; a < static_cast<int>(g.size()); ++a)
    for (int b : g.edges()[a]) {
      const auto& back = g.edges()[b];
      EXPECT_NE(std::find(back.begin(), back.end(), a), back.end());
    }
}

TEST(Viewsphere, JsonRoundTrip) {
  const ViewGraph g = build_viewsphere(30, 1.0, true);
  const ViewGraph h = ViewGraph::from_json(g.to_json());
  EXPECT_EQ(g.hash(), h.hash());
  EXPECT_EQ(g.move_cost_matrix(), h.move_cost_matrix());
}

TEST(GreatCircle, Examples) {
  const Vec3 x(1, 0, 0), y(0, 1, 0);
  EXPECT_DOUBLE_EQ(great_circle_distance(x, x, 1.0), 0.0);
  EXPECT_NEAR(great_circle_distance(x, -x, 1.0), M_PI, 1e-12);
  EXPECT_NEAR(great_circle_distance(2 * x, 2 * y, 2.0), M_PI, 1e-12);
}

TEST(QuaternionDistance, Examples) {
  const Quat q = yaw_pitch_roll(0.3, -0.2, 1.1);
  EXPECT_NEAR(quaternion_distance(q, q), 0.0, 1e-7);
  EXPECT_NEAR(quaternion_distance(q, Quat(-q.coeffs())), 0.0, 1e-7);
  const Quat z90(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()));
  EXPECT_NEAR(quaternion_distance(Quat::Identity(), z90), M_PI / 2, 1e-12);
}

TEST(QuaternionDistance, EqualsRotationAngle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int i = 0; i < 200; ++i) {
    const Quat a = yaw_pitch_roll(u(rng), u(rng) / 2, u(rng));
    const Quat b = yaw_pitch_roll(u(rng), u(rng) / 2, u(rng));
    const double angle = Eigen::AngleAxisd(a.inverse() * b).angle();
    EXPECT_NEAR(quaternion_distance(a, b), std::min(angle, 2 * M_PI - angle), 1e-6);
  }
}

TEST(SensorPose, IdentityKeepsViewpoint) {
  const ViewGraph g = build_viewsphere(10, 1.0, false);
  const Pose p = sensor_pose_in_object_frame(g.at(3), Quat::Identity());
  EXPECT_NEAR((p.position - g.at(3).position).norm(), 0.0, 1e-12);
  EXPECT_NEAR(quaternion_distance(p.rotation, g.at(3).orientation), 0.0, 1e-7);
}

TEST(SensorPose, HalfTurnYawMirrorsPosition) {
  Viewpoint x{0, Vec3(1, 0, 0), look_at_origin(Vec3(1, 0, 0))};
  const Pose p = sensor_pose_in_object_frame(x, yaw_pitch_roll(M_PI, 0, 0));
  EXPECT_NEAR((p.position - Vec3(-1, 0, 0)).norm(), 0.0, 1e-12);
}

TEST(SensorPose, RoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  const ViewGraph g = build_viewsphere(20, 1.0, false);
  for (int i = 0; i < 50; ++i) {
    const Quat r = yaw_pitch_roll(u(rng), u(rng) / 2, u(rng));
    const Viewpoint& x = g.at(i % 20);
    const Pose in_obj = sensor_pose_in_object_frame(x, r);
    EXPECT_NEAR((r * in_obj.position - x.position).norm(), 0.0, 1e-9);
    EXPECT_NEAR(quaternion_distance(r * in_obj.rotation, x.orientation), 0.0, 1e-6);
  }
}

TEST(NearestViewpoint, LatticePointAndTieBreak) {
  const ViewGraph g = build_viewsphere(48, 1.0, false);
  for (const auto& v : g.viewpoints()) EXPECT_EQ(nearest_viewpoint(v.position, g).id, v.id);
  const Vec3 mid = (g.at(5).position + g.at(9).position) / 2;
  const int hit = nearest_viewpoint(mid, g).id;
  // Scan oracle with lowest-id tie-break.
  int best = 0;
  double best_d = 1e9;
  for (const auto& v : g.viewpoints()) {
    const double d = great_circle_distance(v.position, mid.normalized(), 1.0);
    if (d < best_d - 1e-12) best = v.id, best_d = d;
  }
  EXPECT_EQ(hit, best);
}

TEST(NearestViewpoint, MatchesLinearScan) {
  const ViewGraph g = build_viewsphere(42, 1.0, true);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int i = 0; i < 500; ++i) {
    const Vec3 p(n(rng), n(rng), n(rng));
    int best = 0;
    double best_dot = -2;
    for (const auto& v : g.viewpoints()) {
      const double d = v.position.normalized().dot(p.normalized());
      if (d > best_dot) best = v.id, best_dot = d;
    }
    EXPECT_EQ(nearest_viewpoint(p, g).id, best);
  }
}

TEST(FloydWarshall, SmallGraph) {
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd w(4, 4);
  w << 0, 1, inf, 10, 1, 0, 2, inf, inf, 2, 0, 3, 10, inf, 3, 0;
  const Eigen::MatrixXd d = all_pairs_shortest_paths(w);
  EXPECT_DOUBLE_EQ(d(0, 3), 6.0);
  EXPECT_DOUBLE_EQ(d(0, 2), 3.0);
  EXPECT_DOUBLE_EQ(d(3, 1), 5.0);
}
