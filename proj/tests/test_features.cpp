#include <gtest/gtest.h>

#include <random>

#include "avp/error.hpp"
#include "avp/features.hpp"

using namespace avp;

namespace {

PointCloud plane_patch(int n, double half, double depth) {
  PointCloud c;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      c.emplace_back(-half + 2 * half * i / (n - 1), -half + 2 * half * j / (n - 1), depth);
  return c;
}

}  // namespace

TEST(Keypoints, WholeCloudWhenSmall) {
  const PointCloud c{{0, 0, 1}, {1, 0, 1}, {0, 1, 1}};
  EXPECT_EQ(sample_keypoints(c, 3, 1), c);
  EXPECT_EQ(sample_keypoints(c, 10, 1), c);
}

TEST(Keypoints, SingleAndDeterministic) {
  const PointCloud c = plane_patch(10, 0.1, 1.0);
  const PointCloud one = sample_keypoints(c, 1, 5);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NE(std::find(c.begin(), c.end(), one[0]), c.end());
  EXPECT_EQ(sample_keypoint_indices(c.size(), 20, 7), sample_keypoint_indices(c.size(), 20, 7));
  auto idx = sample_keypoint_indices(c.size(), 20, 7);
  std::sort(idx.begin(), idx.end());
  EXPECT_EQ(std::unique(idx.begin(), idx.end()), idx.end());
}

TEST(Keypoints, EmptyCloudIsDegenerate) {
  try {
    sample_keypoints({}, 5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_input);
  }
}

TEST(Descriptor, PlanarPatchConcentratesInPlanarBins) {
  const PointCloud c = plane_patch(30, 0.05, 1.0);
  const Descriptor d = compute_descriptor(c, Vec3(0, 0, 1), 0.04);
  EXPECT_NEAR(d.sum(), 1.0, 1e-12);
  // Normals are parallel: the two cosine features sit in the middle bin.
  const int mid = kAngleBins / 2;
  Eigen::Index arg;
  d.segment(kAngleBins, kAngleBins).maxCoeff(&arg);
  EXPECT_EQ(arg, mid);
  d.segment(2 * kAngleBins, kAngleBins).maxCoeff(&arg);
  EXPECT_EQ(arg, mid);
  EXPECT_GT(d[kAngleBins + mid], 0.3);
  EXPECT_GT(d[2 * kAngleBins + mid], 0.3);
}

TEST(Descriptor, TranslationInvariant) {
  const ObjectModel m = shipped_models()[0];
  const PointCloud c = render_depth(m, build_viewsphere(12, 1.0, false).at(3));
  const Vec3 shift(0.3, -0.2, 0.5);
  PointCloud moved = c;
  for (auto& p : moved) p += shift;
  for (int i : sample_keypoint_indices(c.size(), 10, 3)) {
    Descriptor a, b;
    try {
      a = compute_descriptor(c, c[i], 0.04);
    } catch (const Error&) {
      continue;
    }
    b = compute_descriptor(moved, moved[i], 0.04);
    // Rounding can push a pair sitting exactly on a bin edge across it.
    EXPECT_LT((a - b).lpNorm<1>(), 0.05);
  }
}

TEST(Descriptor, TooFewNeighboursThrows) {
  const PointCloud c{{0, 0, 1}, {0.01, 0, 1}};
  try {
    compute_descriptor(c, c[0], 0.04);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_descriptor);
  }
  PointCloud line;
  for (int i = 0; i < 20; ++i) line.emplace_back(0.002 * i, 0, 1);
  EXPECT_THROW(compute_descriptor(line, line[5], 0.04), Error);
}

TEST(Extract, SphereKeepsMostDescriptors) {
  const ObjectModel ball = make_model(0, "ball", MeshBuilder().sphere(Vec3::Zero(), 0.15, 48, 32).build());
  const PointCloud c = render_depth(ball, build_viewsphere(12, 1.0, false).at(2));
  const FeatureSet fs = extract_features(c, 50, 0.04, 9);
  EXPECT_FALSE(fs.degenerate);
  EXPECT_GE(fs.descriptors.size(), 45u);
  for (const auto& d : fs.descriptors) EXPECT_NEAR(d.sum(), 1.0, 1e-12);
}

TEST(Extract, EmptyCloudIsDegenerateInput) {
  try {
    extract_features({}, FeatureConfig{}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_input);
  }
}

TEST(Extract, Deterministic) {
  const auto models = shipped_models();
  const Viewpoint vp = build_viewsphere(12, 1.0, false).at(5);
  const FeatureSet a = extract_features(render_depth(models[1], vp), FeatureConfig{}, 77);
  const FeatureSet b = extract_features(render_depth(models[1], vp), FeatureConfig{}, 77);
  ASSERT_EQ(a.descriptors.size(), b.descriptors.size());
  for (std::size_t i = 0; i < a.descriptors.size(); ++i) EXPECT_EQ(a.descriptors[i], b.descriptors[i]);
}

TEST(Extract, FewSurvivorsMarkDegenerate) {
  PointCloud sparse;
  for (int i = 0; i < 10; ++i) sparse.emplace_back(0.5 * i, 0, 1);
  EXPECT_TRUE(extract_features(sparse, FeatureConfig{}, 1).degenerate);
}

TEST(Normals, FacesSensor) {
  const PointCloud c = plane_patch(5, 0.01, 1.0);
  Vec3 ev;
  const Vec3 n = fit_normal(c, &ev);
  EXPECT_NEAR(n.z(), -1.0, 1e-12);
  EXPECT_NEAR(ev[0], 0.0, 1e-15);
}

TEST(FeatureConfig, JsonRoundTripAndValidation) {
  FeatureConfig c;
  c.keypoints = 60;
  c.radius = 0.05;
  const FeatureConfig d = FeatureConfig::from_json(c.to_json());
  EXPECT_EQ(d.keypoints, 60);
  EXPECT_DOUBLE_EQ(d.radius, 0.05);
  c.radius = -1;
  EXPECT_THROW(c.validate(), Error);
}
