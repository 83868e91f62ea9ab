#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "avp/sensing.hpp"

using namespace avp;

namespace {

Pose looking_down_z() { return {Vec3::Zero(), Quat::Identity()}; }

}  // namespace

TEST(Render, FacingTriangleDepthBounds) {
  const double d = 0.9;
  std::vector<Triangle> tri{{Vec3(-0.1, -0.1, d), Vec3(0.1, -0.1, d), Vec3(0.0, 0.15, d + 0.05)}};
  const LabeledCloud c = render_scene({{&tri, 0}}, looking_down_z());
  ASSERT_FALSE(c.points.empty());
  const double diag = std::sqrt(0.2 * 0.2 + 0.25 * 0.25 + 0.05 * 0.05);
  for (const auto& p : c.points) {
    EXPECT_GE(p.z(), d - 1e-6);
    EXPECT_LE(p.z(), d + diag);
  }
}

TEST(Render, BehindSensorIsEmpty) {
  std::vector<Triangle> tri{{Vec3(-0.1, -0.1, -1), Vec3(0.1, -0.1, -1), Vec3(0.0, 0.1, -1)}};
  EXPECT_TRUE(render_scene({{&tri, 0}}, looking_down_z()).points.empty());
}

TEST(Render, SphereMatchesAnalyticRayIntersection) {
  const ObjectModel ball = make_model(0, "ball", MeshBuilder().sphere(Vec3::Zero(), 0.2, 96, 64).build());
  const ViewGraph g = build_viewsphere(12, 1.0, false);
  const CameraSpec cam;
  for (int v : {0, 4, 7}) {
    const Viewpoint& vp = g.at(v);
    const PointCloud cloud = render_depth(ball, vp, cam);
    ASSERT_GT(cloud.size(), 100u);
    double min_depth = 1e9;
    for (const auto& p : cloud) {
      min_depth = std::min(min_depth, p.z());
      // Ray from the sensor origin through p, intersected with the exact sphere.
      const Vec3 dir = vp.orientation * p.normalized();
      const Vec3 o = vp.position;
      const double b = o.dot(dir), c = o.squaredNorm() - 0.04;
      const double disc = b * b - c;
      if (disc < 0) continue;  // silhouette pixel of the polygonal sphere
      const double t = -b - std::sqrt(disc);
      EXPECT_NEAR(p.norm(), t, 2e-3);
    }
    EXPECT_NEAR(min_depth, 0.8, 1e-3);
  }
}

TEST(Render, ZBufferKeepsNearestLabel) {
  std::vector<Triangle> near{{Vec3(-0.05, -0.05, 0.5), Vec3(0.05, -0.05, 0.5), Vec3(0.0, 0.05, 0.5)}};
  std::vector<Triangle> far{{Vec3(-0.3, -0.3, 1.0), Vec3(0.3, -0.3, 1.0), Vec3(0.0, 0.3, 1.0)}};
  const LabeledCloud c = render_scene({{&far, 1}, {&near, 0}}, looking_down_z());
  ASSERT_FALSE(c.select(0).empty());
  ASSERT_FALSE(c.select(1).empty());
  for (const auto& p : c.select(1)) {
    // Far points never appear where the near triangle covers the pixel.
    const Vec3 onnear = p * (0.5 / p.z());
    const bool inside = std::abs(onnear.x()) < 0.02 && onnear.y() > -0.04 && onnear.y() < 0.0;
    EXPECT_FALSE(inside);
  }
}

TEST(Noise, ZeroSigmaIsIdentity) {
  const PointCloud c{{0, 0, 1}, {0.1, 0.2, 0.9}};
  EXPECT_EQ(add_depth_noise(c, 0.0, 4), c);
}

TEST(Noise, RadialStdMatchesSigma) {
  PointCloud c;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < 10000; ++i) c.emplace_back(u(rng), u(rng), 1.0 + u(rng));
  const double sigma = 0.005;
  const PointCloud n = add_depth_noise(c, sigma, 42);
  double sum = 0, sum2 = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double r = n[i].norm() - c[i].norm();
    EXPECT_NEAR((n[i].normalized() - c[i].normalized()).norm(), 0.0, 1e-9);
    sum += r;
    sum2 += r * r;
  }
  const double mean = sum / c.size();
  const double sd = std::sqrt(sum2 / c.size() - mean * mean);
  EXPECT_NEAR(sd, sigma, 0.05 * sigma);
}

TEST(Noise, SameSeedSameOutput) {
  const PointCloud c{{0, 0, 1}, {0.1, 0.2, 0.9}, {-0.3, 0.1, 1.2}};
  EXPECT_EQ(add_depth_noise(c, 0.01, 9), add_depth_noise(c, 0.01, 9));
}

TEST(Occlusion, MaskBasics) {
  const PointCloud c{{-0.1, 0, 1}, {0.0, 0.2, 1}, {0.2, -0.1, 1}};
  EXPECT_EQ(apply_occlusion(c, {}), c);
  EXPECT_TRUE(apply_occlusion(c, {{0, 0, 1}}).empty());
  const PointCloud right = apply_occlusion(c, {{1, 0, 0}});  // hide x < 0
  ASSERT_EQ(right.size(), 2u);
  for (const auto& p : right) EXPECT_GE(p.x(), 0.0);
}

TEST(Occlusion, ClassifyExamples) {
  const OcclusionSpec spec;
  EXPECT_EQ(classify_occlusion({}, spec), kFullyOccluded);

  const double e = spec.epsilon;
  PointCloud quad;
  for (int i = 0; i < 4 * spec.min_points; ++i)
    for (double sx : {-1.0, 1.0})
      for (double sy : {-1.0, 1.0}) quad.emplace_back(sx * 2 * e, sy * 2 * e, 1.0);
  EXPECT_EQ(classify_occlusion(quad, spec), kNotOccluded);

  const PointCloud strip(spec.min_points, Vec3(2 * e, 0, 1));
  EXPECT_EQ(classify_occlusion(strip, spec), kOccLeft | kOccTop | kOccBottom);
}

TEST(Occlusion, MaskProducesItsState) {
  const OcclusionSpec spec;
  PointCloud grid;
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j) grid.emplace_back(0.01 * i, 0.01 * j, 1.0);
  ASSERT_EQ(classify_occlusion(grid, spec), kNotOccluded);
  for (OcclusionState s = 1; s < kFullyOccluded; ++s) {
    const PointCloud kept = apply_occlusion(grid, occlusion_mask(s, spec, 0.001));
    EXPECT_EQ(classify_occlusion(kept, spec), s) << occlusion_name(s);
  }
  EXPECT_TRUE(apply_occlusion(grid, occlusion_mask(kFullyOccluded, spec)).empty());
}

TEST(Occlusion, Names) {
  EXPECT_EQ(occlusion_name(kNotOccluded), "none");
  EXPECT_EQ(occlusion_name(kFullyOccluded), "full");
  EXPECT_EQ(occlusion_name(kOccLeft | kOccBottom), "left+bottom");
}
