#include "avp/icp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "avp/error.hpp"
#include "avp/features.hpp"
#include "avp/kdtree.hpp"

namespace avp {

namespace {

// Closest point to p on triangle abc (Ericson, Real-Time Collision Detection).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

// Barycentric lattice on every triangle with spacing at most `h`, each point
// tagged with its triangle. Every surface point lies within h of a lattice
// point of its own triangle.
void lattice_faces(const std::vector<Triangle>& mesh, double h, std::vector<Vec3>& points,
                   std::vector<int>& faces) {
  points.clear();
  faces.clear();
  for (std::size_t f = 0; f < mesh.size(); ++f) {
    const auto& t = mesh[f];
    const double longest =
        std::max({(t[1] - t[0]).norm(), (t[2] - t[1]).norm(), (t[0] - t[2]).norm()});
    const int n = std::max(1, static_cast<int>(std::ceil(longest / h)));
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) {
        points.push_back(t[0] + (t[1] - t[0]) * (double(i) / n) + (t[2] - t[0]) * (double(j) / n));
        faces.push_back(static_cast<int>(f));
      }
  }
}

}  // namespace

Quat fit_rotation(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  require(a.size() == b.size() && !a.empty(), Errc::invalid_argument,
          "fit_rotation: mismatched correspondences");
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) h += a[i] * b[i].transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 u = svd.matrixU(), v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0 ? -1.0 : 1.0;
  return Quat(v * d * u.transpose()).normalized();
}

MeshIndex::MeshIndex(const ObjectModel& model, double spacing)
    : mesh_(model.mesh), spacing_(spacing), lattice_(std::make_unique<std::vector<Vec3>>()) {
  require(!mesh_.empty(), Errc::invalid_argument, "MeshIndex: empty model");
  require(spacing > 0.0, Errc::invalid_argument, "MeshIndex: spacing must be positive");
  lattice_faces(mesh_, spacing, *lattice_, faces_);
  tree_ = KdTree(*lattice_);
}

// The lattice only narrows the search; the answer is the exact closest point
// over every triangle that can still beat the nearest lattice point.
Vec3 MeshIndex::closest(const Vec3& q, double* d2) const {
  double ds = 0.0;
  const int j = tree_.nearest(q, &ds);
  std::vector<int> near;
  tree_.radius_search(q, std::sqrt(ds) + spacing_, near);
  Vec3 best = (*lattice_)[j];
  double best_d2 = ds;
  int last = -1;
  for (int k : near) {
    if (faces_[k] == last) continue;
    last = faces_[k];
    const auto& t = mesh_[faces_[k]];
    const Vec3 c = closest_on_triangle(q, t[0], t[1], t[2]);
    const double e = (c - q).squaredNorm();
    if (e < best_d2) {
      best_d2 = e;
      best = c;
    }
  }
  *d2 = best_d2;
  return best;
}

IcpResult icp_refine(const PointCloud& cloud, const ObjectModel& model, const Quat& init,
                     const IcpOptions& options, std::uint64_t seed) {
  require(!model.mesh.empty(), Errc::invalid_argument, "icp_refine: empty model");
  require(options.index_spacing > 0.0, Errc::invalid_argument, "icp_refine: bad options");
  return icp_refine(cloud, MeshIndex(model, options.index_spacing), init, options, seed);
}

IcpResult icp_refine(const PointCloud& cloud, const MeshIndex& index, const Quat& init,
                     const IcpOptions& options, std::uint64_t seed) {
  require(!cloud.empty(), Errc::degenerate_input, "icp_refine: empty cloud");
  require(options.max_iters >= 1 && options.max_cloud_points >= 3, Errc::invalid_argument,
          "icp_refine: bad options");
  auto closest = [&](const Vec3& q, double* d2) { return index.closest(q, d2); };

  PointCloud pts;
  for (int i : sample_keypoint_indices(cloud.size(), options.max_cloud_points, seed ^ 0x1c9))
    pts.push_back(cloud[i]);

  IcpResult result;
  result.rotation = init.normalized();
  std::vector<Vec3> src(pts.size()), dst(pts), prev_src;
  for (int it = 0; it < options.max_iters; ++it) {
    const Mat3 rt = result.rotation.toRotationMatrix().transpose();
    double err = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double d2 = 0.0;
      src[i] = closest(rt * pts[i], &d2);
      err += d2;
    }
    result.rms = std::sqrt(err / static_cast<double>(pts.size()));
    // Stop once the matched model points no longer move.
    if (!prev_src.empty()) {
      double moved = 0.0;
      for (std::size_t i = 0; i < src.size(); ++i) moved += (src[i] - prev_src[i]).norm();
      if (moved / static_cast<double>(src.size()) < options.tolerance) break;
    }
    result.rotation = fit_rotation(src, dst);
    result.iterations = it + 1;
    prev_src = src;
  }
  return result;
}

}  // namespace avp
