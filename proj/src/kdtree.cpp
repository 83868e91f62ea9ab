#include "avp/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace avp {

namespace {
constexpr int kLeafSize = 12;
}

KdTree::KdTree(const std::vector<Vec3>& points) : points_(&points), index_(points.size()) {
  std::iota(index_.begin(), index_.end(), 0);
  if (!index_.empty()) build(0, static_cast<int>(index_.size()));
}

int KdTree::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (int i = begin; i < end; ++i) {
    lo = lo.cwiseMin((*points_)[index_[i]]);
    hi = hi.cwiseMax((*points_)[index_[i]]);
  }
  int axis;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                   [&](int a, int b) { return (*points_)[a][axis] < (*points_)[b][axis]; });
  const double split = (*points_)[index_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::radius_search(const Vec3& q, double radius, std::vector<int>& out) const {
  out.clear();
  if (nodes_.empty()) return;
  radius_rec(0, q, radius * radius, out);
  std::sort(out.begin(), out.end());
}

void KdTree::radius_rec(int node, const Vec3& q, double r2, std::vector<int>& out) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (int i = n.begin; i < n.end; ++i)
      if (((*points_)[index_[i]] - q).squaredNorm() <= r2) out.push_back(index_[i]);
    return;
  }
  const double d = q[n.axis] - n.split;
  // Left holds values <= split, right values >= split.
  if (d <= 0 || d * d <= r2) radius_rec(n.left, q, r2, out);
  if (d >= 0 || d * d <= r2) radius_rec(n.right, q, r2, out);
}

int KdTree::nearest(const Vec3& q, double* dist2) const {
  if (nodes_.empty()) return -1;
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  nearest_rec(0, q, best, best_d2);
  if (dist2) *dist2 = best_d2;
  return best;
}

void KdTree::nearest_rec(int node, const Vec3& q, int& best, double& best_d2) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (int i = n.begin; i < n.end; ++i) {
      const int idx = index_[i];
      const double d2 = ((*points_)[idx] - q).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
        best_d2 = d2;
        best = idx;
      }
    }
    return;
  }
  const double d = q[n.axis] - n.split;
  const int first = d <= 0 ? n.left : n.right;
  const int second = d <= 0 ? n.right : n.left;
  nearest_rec(first, q, best, best_d2);
  if (d * d <= best_d2) nearest_rec(second, q, best, best_d2);
}

}  // namespace avp
