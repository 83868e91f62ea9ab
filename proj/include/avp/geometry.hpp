#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <json.hpp>

namespace avp {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;

// Rigid pose. `rotation` maps sensor-frame vectors into the parent frame.
// Sensor frame convention: +z is depth (optical axis), +x image right,
// +y image up.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat rotation = Quat::Identity();
};

struct Viewpoint {
  int id = 0;
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Pose pose() const { return {position, orientation}; }
};

/// Sensor orientation at `position` whose optical axis points at the origin.
/// Image "up" is the projection of world +z; at the poles world +x is used.
Quat look_at_origin(const Vec3& position);

/// R = Rz(yaw) * Ry(pitch) * Rx(roll), angles in radians.
Quat yaw_pitch_roll(double yaw, double pitch, double roll);

struct ViewGraphOptions {
  int neighbors = 6;
  double g0 = 1.0;
};

/// Discretized viewsphere with precomputed all-pairs movement costs.
///
/// Edges join each viewpoint to its k nearest angular neighbours (made
/// symmetric). Path lengths g_M are all-pairs shortest paths over edge
/// great-circle lengths, and move_cost(a, b) = g_M(a, b) + g0.
class ViewGraph {
 public:
  ViewGraph() = default;
  ViewGraph(std::vector<Viewpoint> viewpoints, double radius, ViewGraphOptions options);

  std::size_t size() const { return viewpoints_.size(); }
  const std::vector<Viewpoint>& viewpoints() const { return viewpoints_; }
  const Viewpoint& at(int id) const;
  double radius() const { return radius_; }
  double g0() const { return options_.g0; }
  int neighbors() const { return options_.neighbors; }
  const std::vector<std::vector<int>>& edges() const { return edges_; }

  /// Shortest-path movement length g_M.
  double path_length(int a, int b) const { return path_(a, b); }
  /// g(a, b) = g_M(a, b) + g0.
  double move_cost(int a, int b) const { return path_(a, b) + options_.g0; }
  Eigen::MatrixXd move_cost_matrix() const;

  nlohmann::json to_json() const;
  static ViewGraph from_json(const nlohmann::json& j);
  std::uint64_t hash() const;

 private:
  std::vector<Viewpoint> viewpoints_;
  double radius_ = 1.0;
  ViewGraphOptions options_;
  std::vector<std::vector<int>> edges_;
  Eigen::MatrixXd path_;
};

/// Fibonacci spiral lattice of `count` points (poles included). With
/// hemisphere_only the z >= 0 subset is kept and renumbered.
ViewGraph build_viewsphere(int count, double radius, bool hemisphere_only,
                           ViewGraphOptions options = {});

double great_circle_distance(const Viewpoint& a, const Viewpoint& b);
double great_circle_distance(const Vec3& a, const Vec3& b, double radius);

/// Rotation distance d = acos(2<q1,q2>^2 - 1) in [0, pi].
double quaternion_distance(const Quat& q1, const Quat& q2);

/// Pose of the sensor at `x` expressed in the canonical frame of an object
/// whose world orientation is `object_rotation`.
Pose sensor_pose_in_object_frame(const Viewpoint& x, const Quat& object_rotation);

/// Viewpoint whose direction is angularly closest to `p.position`; ties go to
/// the lowest id.
const Viewpoint& nearest_viewpoint(const Pose& p, const ViewGraph& graph);
const Viewpoint& nearest_viewpoint(const Vec3& direction, const ViewGraph& graph);

/// Floyd-Warshall closure of a symmetric weight matrix (inf = no edge).
Eigen::MatrixXd all_pairs_shortest_paths(const Eigen::MatrixXd& weights);

}  // namespace avp
