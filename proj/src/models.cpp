// Procedural low-poly database. Each shape carries at least two features at
// non-opposite azimuths so that yaw is identifiable from most directions.
#include <cmath>

#include "avp/mesh.hpp"

namespace avp {

namespace {

Vec3 azimuth(double deg) {
  const double a = deg * M_PI / 180.0;
  return {std::cos(a), std::sin(a), 0.0};
}

Quat about_z(double deg) { return Quat(Eigen::AngleAxisd(deg * M_PI / 180.0, Vec3::UnitZ())); }

std::vector<Triangle> handlebottle() {
  MeshBuilder b;
  b.cylinder({0, 0, 0}, Vec3::UnitZ(), 0.075, 0.20, 24)
      .frustum({0, 0, 0.20}, Vec3::UnitZ(), 0.075, 0.03, 0.05, 24, false)
      .cylinder({0, 0, 0.25}, Vec3::UnitZ(), 0.03, 0.05, 16)
      // Loop handle on +x.
      .torus_arc({0.075, 0, 0.12}, Vec3::UnitX(), Vec3::UnitZ(), 0.05, 0.012, -M_PI / 2,
                 M_PI / 2, 12, 8)
      // Label bump on +y.
      .box({0, 0.08, 0.08}, {0.035, 0.012, 0.03});
  return b.build();
}

std::vector<Triangle> watercan() {
  MeshBuilder b;
  b.cylinder({0, 0, 0}, Vec3::UnitZ(), 0.09, 0.16, 24);
  // Spout rising toward +x.
  const Vec3 spout_dir = Vec3(1, 0, 1).normalized();
  b.frustum({0.07, 0, 0.04}, spout_dir, 0.022, 0.012, 0.16, 12);
  b.sphere(Vec3(0.07, 0, 0.04) + 0.16 * spout_dir, 0.02, 10, 6);
  // Top handle arching from the middle toward -x.
  b.torus_arc({-0.03, 0, 0.16}, Vec3::UnitX(), Vec3::UnitZ(), 0.05, 0.011, 0.0, M_PI, 12, 8);
  // Filler cap on +y.
  b.cylinder({0, 0.05, 0.16}, Vec3::UnitZ(), 0.025, 0.03, 12);
  return b.build();
}

std::vector<Triangle> mug() {
  MeshBuilder b;
  b.cylinder({0, 0, 0}, Vec3::UnitZ(), 0.065, 0.13, 24);
  b.torus_arc({0.065, 0, 0.065}, Vec3::UnitX(), Vec3::UnitZ(), 0.04, 0.01, -M_PI / 2, M_PI / 2,
              12, 8);
  b.box(Vec3(0, 0, 0.12) + 0.066 * azimuth(120), {0.02, 0.01, 0.015}, about_z(120));
  return b.build();
}

std::vector<Triangle> notchbox() {
  MeshBuilder b;
  b.box({0, 0, 0.08}, {0.11, 0.07, 0.08});
  b.box({0.07, 0.05, 0.19}, {0.04, 0.02, 0.03});
  b.box({-0.11, -0.03, 0.04}, {0.03, 0.025, 0.04});
  return b.build();
}

std::vector<Triangle> finned_can() {
  MeshBuilder b;
  b.cylinder({0, 0, 0}, Vec3::UnitZ(), 0.07, 0.24, 24);
  b.box(Vec3(0, 0, 0.12) + 0.095 * azimuth(0), {0.03, 0.006, 0.09});
  b.sphere(Vec3(0, 0, 0.18) + 0.085 * azimuth(135), 0.03, 12, 8);
  return b.build();
}

std::vector<Triangle> lamp() {
  MeshBuilder b;
  b.frustum({0, 0, 0}, Vec3::UnitZ(), 0.11, 0.02, 0.20, 24);
  b.cylinder({0, 0, 0.17}, Vec3::UnitX(), 0.012, 0.14, 10);
  b.sphere({0.15, 0, 0.17}, 0.03, 12, 8);
  b.box(Vec3(0, 0, 0.02) + 0.12 * azimuth(200), {0.04, 0.03, 0.02}, about_z(200));
  return b.build();
}

}  // namespace

std::vector<ObjectModel> shipped_models() {
  std::vector<ObjectModel> out;
  out.push_back(make_model(0, "handlebottle", handlebottle()));
  out.push_back(make_model(1, "watercan", watercan()));
  out.push_back(make_model(2, "mug", mug()));
  out.push_back(make_model(3, "notchbox", notchbox()));
  out.push_back(make_model(4, "finned_can", finned_can()));
  out.push_back(make_model(5, "lamp", lamp()));
  return out;
}

}  // namespace avp
