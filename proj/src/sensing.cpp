#include "avp/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "avp/error.hpp"
#include "avp/serialize.hpp"

namespace avp {

double CameraSpec::focal() const { return 0.5 * height / std::tan(0.5 * fov_y); }

PointCloud LabeledCloud::select(int label) const {
  PointCloud out;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (labels[i] == label) out.push_back(points[i]);
  return out;
}

namespace {

constexpr double kNear = 1e-6;
// Barycentric slack so rays through a shared edge hit at least one side.
constexpr double kEdgeSlack = 1e-9;

// Moller-Trumbore with the ray origin at the sensor. Returns t (= depth,
// since ray directions have unit z) or +inf.
double intersect(const Vec3& dir, const Vec3& v0, const Vec3& e1, const Vec3& e2) {
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-15) return std::numeric_limits<double>::infinity();
  const double inv = 1.0 / det;
  const Vec3 tvec = -v0;
  const double u = tvec.dot(pvec) * inv;
  if (u < -kEdgeSlack || u > 1.0 + kEdgeSlack) return std::numeric_limits<double>::infinity();
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv;
  if (v < -kEdgeSlack || u + v > 1.0 + kEdgeSlack) return std::numeric_limits<double>::infinity();
  const double t = e2.dot(qvec) * inv;
  return t > kNear ? t : std::numeric_limits<double>::infinity();
}

}  // namespace

LabeledCloud render_scene(const std::vector<RenderItem>& items, const Pose& sensor,
                          const CameraSpec& camera) {
  require(camera.width > 0 && camera.height > 0 && camera.fov_y > 0 && camera.fov_y < M_PI,
          Errc::invalid_argument, "render: bad camera spec");
  const int W = camera.width, H = camera.height;
  const double f = camera.focal();
  const double cx = 0.5 * W, cy = 0.5 * H;
  const Mat3 to_sensor = sensor.rotation.toRotationMatrix().transpose();

  std::vector<double> depth(static_cast<std::size_t>(W) * H,
                            std::numeric_limits<double>::infinity());
  std::vector<int> label(depth.size(), -1);

  for (const auto& item : items) {
    require(item.mesh != nullptr, Errc::invalid_argument, "render: null mesh");
    for (const auto& tri : *item.mesh) {
      Vec3 s[3];
      for (int k = 0; k < 3; ++k) s[k] = to_sensor * (tri[k] - sensor.position);
      if (s[0].z() <= kNear && s[1].z() <= kNear && s[2].z() <= kNear) continue;

      int u0 = 0, u1 = W - 1, v0 = 0, v1 = H - 1;
      if (s[0].z() > kNear && s[1].z() > kNear && s[2].z() > kNear) {
        double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
        for (int k = 0; k < 3; ++k) {
          const double u = f * s[k].x() / s[k].z() + cx;
          const double v = cy - f * s[k].y() / s[k].z();
          umin = std::min(umin, u);
          umax = std::max(umax, u);
          vmin = std::min(vmin, v);
          vmax = std::max(vmax, v);
        }
        u0 = std::max(0, static_cast<int>(std::floor(umin - 0.5)));
        u1 = std::min(W - 1, static_cast<int>(std::ceil(umax - 0.5)));
        v0 = std::max(0, static_cast<int>(std::floor(vmin - 0.5)));
        v1 = std::min(H - 1, static_cast<int>(std::ceil(vmax - 0.5)));
        if (u0 > u1 || v0 > v1) continue;
      }
      // Triangles straddling the image plane fall back to a full-frame scan.
      const Vec3 e1 = s[1] - s[0], e2 = s[2] - s[0];
      for (int v = v0; v <= v1; ++v) {
        for (int u = u0; u <= u1; ++u) {
          const Vec3 dir((u + 0.5 - cx) / f, (cy - (v + 0.5)) / f, 1.0);
          const double t = intersect(dir, s[0], e1, e2);
          const std::size_t idx = static_cast<std::size_t>(v) * W + u;
          if (t < depth[idx]) {
            depth[idx] = t;
            label[idx] = item.label;
          }
        }
      }
    }
  }

  LabeledCloud out;
  for (int v = 0; v < H; ++v) {
    for (int u = 0; u < W; ++u) {
      const std::size_t idx = static_cast<std::size_t>(v) * W + u;
      if (label[idx] < 0) continue;
      const double t = depth[idx];
      out.points.emplace_back(t * (u + 0.5 - cx) / f, t * (cy - (v + 0.5)) / f, t);
      out.labels.push_back(label[idx]);
    }
  }
  return out;
}

PointCloud render_depth(const ObjectModel& model, const Viewpoint& view, const CameraSpec& camera) {
  require(!model.mesh.empty(), Errc::invalid_argument, "render_depth: empty model");
  return render_scene({{&model.mesh, 0}}, view.pose(), camera).points;
}

void add_depth_noise_inplace(PointCloud& cloud, double sigma, std::mt19937_64& rng) {
  require(sigma >= 0.0, Errc::invalid_argument, "depth noise sigma must be >= 0");
  if (sigma == 0.0) return;
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& p : cloud) {
    const double r = p.norm();
    if (r <= 0.0) continue;
    p *= 1.0 + noise(rng) / r;
  }
}

PointCloud add_depth_noise(const PointCloud& cloud, double sigma, std::uint64_t seed) {
  PointCloud out = cloud;
  std::mt19937_64 rng(seed);
  add_depth_noise_inplace(out, sigma, rng);
  return out;
}

PointCloud apply_occlusion(const PointCloud& cloud, const std::vector<HalfPlane>& mask) {
  if (mask.empty()) return cloud;
  PointCloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) {
    bool hidden = false;
    for (const auto& h : mask) {
      if (h.contains(p)) {
        hidden = true;
        break;
      }
    }
    if (!hidden) out.push_back(p);
  }
  return out;
}

void OcclusionSpec::validate() const {
  require(epsilon > 0.0, Errc::invalid_argument, "occlusion epsilon must be > 0");
  require(min_points >= 1, Errc::invalid_argument, "occlusion min_points must be >= 1");
}

OcclusionState classify_occlusion(const PointCloud& cloud, const OcclusionSpec& spec) {
  spec.validate();
  if (static_cast<int>(cloud.size()) < spec.min_points) return kFullyOccluded;
  int left = 0, right = 0, top = 0, bottom = 0;
  for (const auto& p : cloud) {
    left += p.x() < -spec.epsilon;
    right += p.x() > spec.epsilon;
    top += p.y() > spec.epsilon;
    bottom += p.y() < -spec.epsilon;
  }
  OcclusionState s = 0;
  if (left < spec.min_points) s |= kOccLeft;
  if (right < spec.min_points) s |= kOccRight;
  if (top < spec.min_points) s |= kOccTop;
  if (bottom < spec.min_points) s |= kOccBottom;
  return s;
}

std::vector<HalfPlane> occlusion_mask(OcclusionState state, const OcclusionSpec& spec,
                                      double inset) {
  require(state < kOcclusionStates, Errc::invalid_argument, "occlusion state out of range");
  if (state == kFullyOccluded) return {{0.0, 0.0, 1.0}};
  const double cut = spec.epsilon - inset;
  std::vector<HalfPlane> mask;
  if (state & kOccLeft) mask.push_back({1.0, 0.0, -cut});
  if (state & kOccRight) mask.push_back({-1.0, 0.0, -cut});
  if (state & kOccTop) mask.push_back({0.0, -1.0, -cut});
  if (state & kOccBottom) mask.push_back({0.0, 1.0, -cut});
  return mask;
}

std::string occlusion_name(OcclusionState state) {
  if (state == kNotOccluded) return "none";
  if (state == kFullyOccluded) return "full";
  std::string s;
  const char* names[] = {"left", "right", "top", "bottom"};
  for (int i = 0; i < 4; ++i) {
    if (state & (1 << i)) {
      if (!s.empty()) s += '+';
      s += names[i];
    }
  }
  return s;
}

void save_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ostringstream out;
  out.precision(9);
  for (const auto& p : cloud) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  write_text(path, out.str());
}

}  // namespace avp
