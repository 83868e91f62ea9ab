#pragma once

#include <vector>

#include "avp/geometry.hpp"

namespace avp {

// Static 3-d tree over a borrowed point array.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(const std::vector<Vec3>& points);

  /// Indices of points within `radius` of `q`, ascending.
  void radius_search(const Vec3& q, double radius, std::vector<int>& out) const;
  /// Index of the nearest point (lowest index on ties); -1 if empty.
  int nearest(const Vec3& q, double* dist2 = nullptr) const;

  std::size_t size() const { return index_.size(); }

 private:
  struct Node {
    int begin, end;  // range in index_
    int axis;        // -1 for leaves
    double split;
    int left, right;
  };
  int build(int begin, int end);
  void radius_rec(int node, const Vec3& q, double r2, std::vector<int>& out) const;
  void nearest_rec(int node, const Vec3& q, int& best, double& best_d2) const;

  const std::vector<Vec3>* points_ = nullptr;
  std::vector<int> index_;
  std::vector<Node> nodes_;
};

}  // namespace avp
