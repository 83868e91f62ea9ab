#include "avp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "avp/error.hpp"
#include "avp/serialize.hpp"

namespace avp {

namespace {

double area(const Triangle& t) { return 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).norm(); }

// Orthonormal pair spanning the plane perpendicular to `axis`.
std::pair<Vec3, Vec3> basis(const Vec3& axis) {
  const Vec3 a = axis.normalized();
  const Vec3 helper = std::abs(a.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 u = helper.cross(a).normalized();
  return {u, a.cross(u)};
}

}  // namespace

double ObjectModel::bounding_radius() const {
  double r = 0.0;
  for (const auto& t : mesh)
    for (const auto& v : t) r = std::max(r, v.norm());
  return r;
}

double ObjectModel::min_z(const Quat& r) const {
  double z = std::numeric_limits<double>::infinity();
  for (const auto& t : mesh)
    for (const auto& v : t) z = std::min(z, (r * v).z());
  return z;
}

std::uint64_t ObjectModel::hash() const {
  std::ostringstream ss;
  ss.precision(17);
  ss << class_id << ' ' << name << ' ' << mesh.size();
  for (const auto& t : mesh)
    for (const auto& v : t) ss << ' ' << v.x() << ' ' << v.y() << ' ' << v.z();
  return fnv1a(ss.str());
}

Vec3 surface_centroid(const std::vector<Triangle>& mesh) {
  Vec3 acc = Vec3::Zero();
  double total = 0.0;
  for (const auto& t : mesh) {
    const double a = area(t);
    acc += a * (t[0] + t[1] + t[2]) / 3.0;
    total += a;
  }
  require(total > 0.0, Errc::invalid_argument, "mesh has zero surface area");
  return acc / total;
}

void translate(std::vector<Triangle>& mesh, const Vec3& offset) {
  for (auto& t : mesh)
    for (auto& v : t) v += offset;
}

std::vector<Triangle> transformed(const std::vector<Triangle>& mesh, const Quat& r, const Vec3& t) {
  const Mat3 rm = r.toRotationMatrix();
  std::vector<Triangle> out(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i)
    for (int k = 0; k < 3; ++k) out[i][k] = rm * mesh[i][k] + t;
  return out;
}

std::vector<Vec3> sample_surface(const std::vector<Triangle>& mesh, int count, std::uint64_t seed) {
  require(!mesh.empty() && count > 0, Errc::invalid_argument, "sample_surface: empty input");
  std::vector<double> cumulative(mesh.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    total += area(mesh[i]);
    cumulative[i] = total;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double pick = unit(rng) * total;
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), pick);
    const auto& t = mesh[std::min<std::size_t>(it - cumulative.begin(), mesh.size() - 1)];
    double a = unit(rng), b = unit(rng);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    out.push_back(t[0] + a * (t[1] - t[0]) + b * (t[2] - t[0]));
  }
  return out;
}

ObjectModel load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::io, "cannot open mesh " + path.string());
  ObjectModel m;
  std::size_t count = 0;
  require(static_cast<bool>(in >> m.class_id >> m.name >> count), Errc::io,
          path.string() + ": malformed mesh header");
  m.mesh.resize(count);
  for (auto& t : m.mesh)
    for (auto& v : t)
      require(static_cast<bool>(in >> v.x() >> v.y() >> v.z()), Errc::io,
              path.string() + ": truncated triangle list");
  require(!m.mesh.empty(), Errc::io, path.string() + ": empty mesh");
  return m;
}

void save_mesh(const ObjectModel& model, const std::filesystem::path& path) {
  std::ostringstream out;
  out.precision(17);
  out << model.class_id << ' ' << model.name << ' ' << model.mesh.size() << '\n';
  for (const auto& t : model.mesh) {
    for (int k = 0; k < 3; ++k) {
      out << t[k].x() << ' ' << t[k].y() << ' ' << t[k].z() << (k == 2 ? '\n' : ' ');
    }
  }
  write_text(path, out.str());
}

std::vector<ObjectModel> load_model_directory(const std::filesystem::path& dir) {
  require(std::filesystem::is_directory(dir), Errc::io, "not a directory: " + dir.string());
  std::vector<ObjectModel> models;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".tri") models.push_back(load_mesh(entry.path()));
  }
  std::sort(models.begin(), models.end(),
            [](const ObjectModel& a, const ObjectModel& b) { return a.class_id < b.class_id; });
  require(!models.empty(), Errc::io, "no .tri models in " + dir.string());
  return models;
}

// --- MeshBuilder ---------------------------------------------------------

void MeshBuilder::quad(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  tris_.push_back({a, b, c});
  tris_.push_back({a, c, d});
}

MeshBuilder& MeshBuilder::frustum(const Vec3& base, const Vec3& axis, double r_base,
                                  double r_top, double height, int segments, bool caps) {
  const auto [u, v] = basis(axis);
  const Vec3 a = axis.normalized();
  const Vec3 top = base + height * a;
  for (int i = 0; i < segments; ++i) {
    const double t0 = 2.0 * M_PI * i / segments;
    const double t1 = 2.0 * M_PI * (i + 1) / segments;
    const Vec3 d0 = std::cos(t0) * u + std::sin(t0) * v;
    const Vec3 d1 = std::cos(t1) * u + std::sin(t1) * v;
    quad(base + r_base * d0, base + r_base * d1, top + r_top * d1, top + r_top * d0);
    if (caps) {
      if (r_base > 0) tris_.push_back({base, base + r_base * d1, base + r_base * d0});
      if (r_top > 0) tris_.push_back({top, top + r_top * d0, top + r_top * d1});
    }
  }
  return *this;
}

MeshBuilder& MeshBuilder::cylinder(const Vec3& base, const Vec3& axis, double radius,
                                   double height, int segments, bool caps) {
  return frustum(base, axis, radius, radius, height, segments, caps);
}

MeshBuilder& MeshBuilder::box(const Vec3& center, const Vec3& h, const Quat& r) {
  auto corner = [&](int sx, int sy, int sz) -> Vec3 {
    return center + r * Vec3(sx * h.x(), sy * h.y(), sz * h.z());
  };
  quad(corner(-1, -1, -1), corner(-1, 1, -1), corner(1, 1, -1), corner(1, -1, -1));
  quad(corner(-1, -1, 1), corner(1, -1, 1), corner(1, 1, 1), corner(-1, 1, 1));
  quad(corner(-1, -1, -1), corner(1, -1, -1), corner(1, -1, 1), corner(-1, -1, 1));
  quad(corner(-1, 1, -1), corner(-1, 1, 1), corner(1, 1, 1), corner(1, 1, -1));
  quad(corner(-1, -1, -1), corner(-1, -1, 1), corner(-1, 1, 1), corner(-1, 1, -1));
  quad(corner(1, -1, -1), corner(1, 1, -1), corner(1, 1, 1), corner(1, -1, 1));
  return *this;
}

MeshBuilder& MeshBuilder::sphere(const Vec3& center, double radius, int slices, int stacks) {
  auto point = [&](int i, int j) {
    const double theta = M_PI * j / stacks;
    const double phi = 2.0 * M_PI * i / slices;
    return Vec3(center + radius * Vec3(std::sin(theta) * std::cos(phi),
                                       std::sin(theta) * std::sin(phi), std::cos(theta)));
  };
  for (int j = 0; j < stacks; ++j) {
    for (int i = 0; i < slices; ++i) {
      const Vec3 a = point(i, j), b = point(i + 1, j), c = point(i + 1, j + 1),
                 d = point(i, j + 1);
      if (j == 0) {
        tris_.push_back({a, c, d});
      } else if (j == stacks - 1) {
        tris_.push_back({a, b, c});
      } else {
        quad(a, b, c, d);
      }
    }
  }
  return *this;
}

MeshBuilder& MeshBuilder::torus_arc(const Vec3& center, const Vec3& u, const Vec3& v,
                                    double major, double minor, double a0, double a1,
                                    int arc_segments, int tube_segments) {
  const Vec3 n = u.cross(v).normalized();
  auto point = [&](int i, int k) {
    const double a = a0 + (a1 - a0) * i / arc_segments;
    const double b = 2.0 * M_PI * k / tube_segments;
    const Vec3 radial = std::cos(a) * u + std::sin(a) * v;
    return Vec3(center + (major + minor * std::cos(b)) * radial + minor * std::sin(b) * n);
  };
  for (int i = 0; i < arc_segments; ++i)
    for (int k = 0; k < tube_segments; ++k)
      quad(point(i, k), point(i + 1, k), point(i + 1, k + 1), point(i, k + 1));
  return *this;
}

ObjectModel make_model(int class_id, std::string name, std::vector<Triangle> mesh) {
  require(!mesh.empty(), Errc::invalid_argument, "make_model: empty mesh");
  translate(mesh, -surface_centroid(mesh));
  return {class_id, std::move(name), std::move(mesh)};
}

}  // namespace avp
