#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "avp/sensing.hpp"

namespace avp {

inline constexpr int kAngleBins = 11;
inline constexpr int kDescriptorDim = 3 * kAngleBins;

/// Concatenated pair-angle histogram, L1-normalised.
using Descriptor = Eigen::Matrix<double, kDescriptorDim, 1>;

struct FeatureConfig {
  int keypoints = 100;
  double radius = 0.04;         // descriptor support
  double normal_radius = 0.02;  // normal estimation support
  int min_neighbors = 5;
  double max_condition = 1e6;   // lambda_max / lambda_mid of the support covariance
  int min_descriptors = 3;
  int max_support = 32;  // closest points kept per support region; 0 = all

  void validate() const;
  nlohmann::json to_json() const;
  static FeatureConfig from_json(const nlohmann::json& j);
};

struct FeatureSet {
  std::vector<Descriptor> descriptors;
  std::string source;
  bool degenerate = false;
};

/// Indices of k points drawn uniformly without replacement (all points, in
/// order, when the cloud has no more than k).
std::vector<int> sample_keypoint_indices(std::size_t cloud_size, int k, std::uint64_t seed);
PointCloud sample_keypoints(const PointCloud& cloud, int k, std::uint64_t seed);

/// Descriptor at `kp` from the points of `cloud` within `radius`. Throws
/// degenerate_descriptor when the support is too small or collinear.
Descriptor compute_descriptor(const PointCloud& cloud, const Vec3& kp, double radius,
                              const FeatureConfig& config = {});

FeatureSet extract_features(const PointCloud& cloud, const FeatureConfig& config,
                            std::uint64_t seed);
FeatureSet extract_features(const PointCloud& cloud, int k, double radius, std::uint64_t seed);

/// Unit normal of the best-fit plane through `pts`, oriented toward the
/// sensor (n_z <= 0). Also reports the covariance eigenvalues, ascending.
Vec3 fit_normal(const std::vector<Vec3>& pts, Vec3* eigenvalues = nullptr);

}  // namespace avp
