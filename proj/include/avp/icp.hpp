#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "avp/kdtree.hpp"
#include "avp/mesh.hpp"
#include "avp/sensing.hpp"

namespace avp {

struct IcpOptions {
  int max_iters = 50;
  double tolerance = 1e-6;  // mean shift of the matched model points, meters
  double index_spacing = 0.003;  // meters, lattice used to find candidate triangles
  int max_cloud_points = 600;
};

struct IcpResult {
  Quat rotation = Quat::Identity();
  int iterations = 0;
  double rms = 0.0;
};

/// Exact closest-point queries on a model surface. Building it dominates a
/// single ICP call, so callers refining many clouds should keep one per model.
class MeshIndex {
 public:
  MeshIndex(const ObjectModel& model, double spacing);
  MeshIndex(const MeshIndex&) = delete;
  MeshIndex& operator=(const MeshIndex&) = delete;

  Vec3 closest(const Vec3& q, double* dist2) const;
  double spacing() const { return spacing_; }

 private:
  std::vector<Triangle> mesh_;
  double spacing_;
  std::unique_ptr<std::vector<Vec3>> lattice_;  // KdTree keeps a pointer into it
  std::vector<int> faces_;
  KdTree tree_;
};

/// Rotation-only point-to-point ICP about the (known) object centroid at the
/// origin. `cloud` is in the world frame; the model is posed as R * canonical.
IcpResult icp_refine(const PointCloud& cloud, const ObjectModel& model, const Quat& init,
                     const IcpOptions& options = {}, std::uint64_t seed = 0);
/// Same, reusing a prebuilt index (its spacing overrides options.index_spacing).
IcpResult icp_refine(const PointCloud& cloud, const MeshIndex& index, const Quat& init,
                     const IcpOptions& options = {}, std::uint64_t seed = 0);

/// Best rotation R minimising sum |R a_i - b_i|^2 (Kabsch, no translation).
Quat fit_rotation(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

}  // namespace avp
