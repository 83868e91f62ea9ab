#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "avp/geometry.hpp"

namespace avp {

using Triangle = std::array<Vec3, 3>;

/// Database object: triangle soup in its canonical frame, surface centroid at
/// the origin, +z up.
struct ObjectModel {
  int class_id = 0;
  std::string name;
  std::vector<Triangle> mesh;

  double bounding_radius() const;
  /// Lowest z over all vertices after rotating by `r`.
  double min_z(const Quat& r) const;
  std::uint64_t hash() const;
};

/// Area-weighted surface centroid.
Vec3 surface_centroid(const std::vector<Triangle>& mesh);
void translate(std::vector<Triangle>& mesh, const Vec3& offset);
std::vector<Triangle> transformed(const std::vector<Triangle>& mesh, const Quat& r, const Vec3& t);

/// Uniform area-weighted surface samples; deterministic given seed.
std::vector<Vec3> sample_surface(const std::vector<Triangle>& mesh, int count, std::uint64_t seed);

// ASCII triangle soup:
//   line 1: <class_id> <name> <triangle_count>
//   then one triangle per line, 9 floats (x0 y0 z0 x1 y1 z1 x2 y2 z2).
ObjectModel load_mesh(const std::filesystem::path& path);
void save_mesh(const ObjectModel& model, const std::filesystem::path& path);

/// Loads every *.tri file in `dir`, ordered by class_id.
std::vector<ObjectModel> load_model_directory(const std::filesystem::path& dir);

// Procedural primitives used by the shipped models.
class MeshBuilder {
 public:
  MeshBuilder& cylinder(const Vec3& base, const Vec3& axis, double radius, double height,
                        int segments = 20, bool caps = true);
  MeshBuilder& frustum(const Vec3& base, const Vec3& axis, double r_base, double r_top,
                       double height, int segments = 20, bool caps = true);
  MeshBuilder& box(const Vec3& center, const Vec3& half_extents, const Quat& r = Quat::Identity());
  MeshBuilder& sphere(const Vec3& center, double radius, int slices = 12, int stacks = 8);
  /// Tube swept along a circular arc in the plane spanned by (u, v) around
  /// `center`, from angle a0 to a1.
  MeshBuilder& torus_arc(const Vec3& center, const Vec3& u, const Vec3& v, double major,
                         double minor, double a0, double a1, int arc_segments = 12,
                         int tube_segments = 8);

  std::vector<Triangle> build() const { return tris_; }

 private:
  void quad(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
  std::vector<Triangle> tris_;
};

/// Finalise a procedural mesh: recentre on the surface centroid.
ObjectModel make_model(int class_id, std::string name, std::vector<Triangle> mesh);

/// The six shipped low-poly models, class ids 0..5:
/// handlebottle, watercan, mug, notchbox, finned_can, lamp.
std::vector<ObjectModel> shipped_models();

}  // namespace avp
