#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "avp/geometry.hpp"
#include "avp/mesh.hpp"

namespace avp {

/// Points in the sensor frame: z is depth, (x, y) the image plane.
using PointCloud = std::vector<Vec3>;

struct CameraSpec {
  int width = 160;
  int height = 120;
  double fov_y = M_PI / 3.0;  // vertical, radians

  double focal() const;
};

/// Mesh placed in the world, with a label written into the label buffer.
struct RenderItem {
  const std::vector<Triangle>* mesh = nullptr;  // world frame
  int label = 0;
};

/// Depth + label image, flattened back to points.
struct LabeledCloud {
  PointCloud points;
  std::vector<int> labels;

  PointCloud select(int label) const;
};

/// Z-buffered ray cast of several world-frame meshes from `sensor`.
LabeledCloud render_scene(const std::vector<RenderItem>& items, const Pose& sensor,
                          const CameraSpec& camera = {});

/// Single model in its canonical frame, seen from `view`.
PointCloud render_depth(const ObjectModel& model, const Viewpoint& view,
                        const CameraSpec& camera = {});

/// Radial Gaussian noise: each point moves along its own ray by N(0, sigma^2).
PointCloud add_depth_noise(const PointCloud& cloud, double sigma, std::uint64_t seed);
void add_depth_noise_inplace(PointCloud& cloud, double sigma, std::mt19937_64& rng);

/// Image-plane half-plane {(x, y) : a x + b y < c}.
struct HalfPlane {
  double a = 0, b = 0, c = 0;
  bool contains(const Vec3& p) const { return a * p.x() + b * p.y() < c; }
};

PointCloud apply_occlusion(const PointCloud& cloud, const std::vector<HalfPlane>& mask);

// Occlusion state: subset of {left, right, top, bottom} as a 4-bit mask.
// 0 is the non-occluded state, 15 the fully-occluded one.
using OcclusionState = std::uint8_t;
inline constexpr OcclusionState kOccLeft = 1;
inline constexpr OcclusionState kOccRight = 2;
inline constexpr OcclusionState kOccTop = 4;
inline constexpr OcclusionState kOccBottom = 8;
inline constexpr OcclusionState kNotOccluded = 0;
inline constexpr OcclusionState kFullyOccluded = 15;
inline constexpr int kOcclusionStates = 16;

struct OcclusionSpec {
  double epsilon = 0.05;  // meters
  int min_points = 25;

  void validate() const;
};

OcclusionState classify_occlusion(const PointCloud& cloud, const OcclusionSpec& spec);

/// Half-planes that hide the sides named in `state`. The cut for each side
/// sits `inset` inside the -eps / +eps band edge, so the side's count drops
/// to zero. Empty for the non-occluded state.
std::vector<HalfPlane> occlusion_mask(OcclusionState state, const OcclusionSpec& spec,
                                      double inset = 0.0);

std::string occlusion_name(OcclusionState state);

void save_xyz(const PointCloud& cloud, const std::filesystem::path& path);

}  // namespace avp
