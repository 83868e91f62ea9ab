#include "avp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "avp/error.hpp"
#include "avp/serialize.hpp"

namespace avp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamped_acos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }

}  // namespace

Quat look_at_origin(const Vec3& position) {
  const Vec3 forward = (-position).normalized();
  Vec3 up = Vec3::UnitZ();
  Vec3 y = up - up.dot(forward) * forward;
  if (y.norm() < 1e-9) {
    up = Vec3::UnitX();
    y = up - up.dot(forward) * forward;
  }
  y.normalize();
  const Vec3 x = y.cross(forward);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = forward;
  return Quat(r).normalized();
}

Quat yaw_pitch_roll(double yaw, double pitch, double roll) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .normalized();
}

Eigen::MatrixXd all_pairs_shortest_paths(const Eigen::MatrixXd& weights) {
  Eigen::MatrixXd d = weights;
  const Eigen::Index n = d.rows();
  for (Eigen::Index i = 0; i < n; ++i) d(i, i) = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dik = d(i, k);
      if (dik == kInf) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double via = dik + d(k, j);
        if (via < d(i, j)) d(i, j) = via;
      }
    }
  }
  return d;
}

ViewGraph::ViewGraph(std::vector<Viewpoint> viewpoints, double radius, ViewGraphOptions options)
    : viewpoints_(std::move(viewpoints)), radius_(radius), options_(options) {
  require(viewpoints_.size() >= 1, Errc::invalid_argument, "view graph needs viewpoints");
  require(radius > 0.0, Errc::invalid_argument, "viewsphere radius must be positive");
  require(options_.neighbors >= 1, Errc::invalid_argument, "neighbour count must be >= 1");
  require(options_.g0 >= 0.0, Errc::invalid_argument, "measurement cost must be >= 0");

  const int n = static_cast<int>(viewpoints_.size());
  for (int i = 0; i < n; ++i) viewpoints_[i].id = i;

  // k nearest angular neighbours, symmetrised.
  std::vector<std::vector<char>> adjacent(n, std::vector<char>(n, 0));
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    const Vec3 pi = viewpoints_[i].position;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return pi.dot(viewpoints_[a].position) > pi.dot(viewpoints_[b].position);
    });
    int added = 0;
    for (int j : order) {
      if (j == i) continue;
      if (added == options_.neighbors) break;
      adjacent[i][j] = adjacent[j][i] = 1;
      ++added;
    }
  }

  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(n, n, kInf);
  edges_.assign(n, {});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!adjacent[i][j]) continue;
      edges_[i].push_back(j);
      w(i, j) = great_circle_distance(viewpoints_[i], viewpoints_[j]);
    }
  }
  path_ = all_pairs_shortest_paths(w);
  require(path_.allFinite(), Errc::internal_consistency, "view graph is disconnected");
}

const Viewpoint& ViewGraph::at(int id) const {
  require(id >= 0 && id < static_cast<int>(viewpoints_.size()), Errc::invalid_argument,
          "viewpoint id out of range: " + std::to_string(id));
  return viewpoints_[id];
}

Eigen::MatrixXd ViewGraph::move_cost_matrix() const {
  return path_.array() + options_.g0;
}

json ViewGraph::to_json() const {
  json j;
  j["radius"] = radius_;
  j["neighbors"] = options_.neighbors;
  j["g0"] = options_.g0;
  json vps = json::array();
  for (const auto& v : viewpoints_) {
    vps.push_back({{"id", v.id},
                   {"position", vec3_to_json(v.position)},
                   {"orientation", quat_to_json(v.orientation)}});
  }
  j["viewpoints"] = std::move(vps);
  j["edges"] = edges_;
  json cost = json::array();
  for (Eigen::Index i = 0; i < path_.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < path_.cols(); ++k) row.push_back(move_cost(i, k));
    cost.push_back(std::move(row));
  }
  j["move_cost"] = std::move(cost);
  return j;
}

ViewGraph ViewGraph::from_json(const json& j) {
  std::vector<Viewpoint> vps;
  for (const auto& v : j.at("viewpoints")) {
    vps.push_back({v.at("id").get<int>(), vec3_from_json(v.at("position")),
                   quat_from_json(v.at("orientation"))});
  }
  ViewGraphOptions opt{j.at("neighbors").get<int>(), j.at("g0").get<double>()};
  ViewGraph g(std::move(vps), j.at("radius").get<double>(), opt);
  // Stored matrix must agree with the recomputed closure.
  const auto& cost = j.at("move_cost");
  require(cost.size() == g.size(), Errc::hash_mismatch, "view graph cost matrix size mismatch");
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t b = 0; b < g.size(); ++b) {
      const double stored = cost[a][b].get<double>();
      require(std::abs(stored - g.move_cost(static_cast<int>(a), static_cast<int>(b))) < 1e-9,
              Errc::hash_mismatch, "view graph cost matrix does not match its viewpoints");
    }
  }
  return g;
}

std::uint64_t ViewGraph::hash() const { return hash_json(to_json()); }

ViewGraph build_viewsphere(int count, double radius, bool hemisphere_only,
                           ViewGraphOptions options) {
  require(count >= 2, Errc::invalid_argument, "viewsphere needs count >= 2");
  require(radius > 0.0, Errc::invalid_argument, "viewsphere radius must be positive");
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  std::vector<Viewpoint> vps;
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * i / static_cast<double>(count - 1);
    if (hemisphere_only && z < 0.0) continue;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    Vec3 p(r * std::cos(phi), r * std::sin(phi), z);
    p = radius * p.normalized();
    vps.push_back({static_cast<int>(vps.size()), p, look_at_origin(p)});
  }
  return ViewGraph(std::move(vps), radius, options);
}

double great_circle_distance(const Vec3& a, const Vec3& b, double radius) {
  return radius * clamped_acos(a.normalized().dot(b.normalized()));
}

double great_circle_distance(const Viewpoint& a, const Viewpoint& b) {
  const double ra = a.position.norm();
  const double rb = b.position.norm();
  require(std::abs(ra - rb) <= 1e-9 * std::max(ra, rb), Errc::invalid_argument,
          "great_circle_distance: viewpoints lie on different spheres");
  if (a.position == b.position) return 0.0;
  return great_circle_distance(a.position, b.position, ra);
}

double quaternion_distance(const Quat& q1, const Quat& q2) {
  require(std::abs(q1.norm() - 1.0) < 1e-6 && std::abs(q2.norm() - 1.0) < 1e-6,
          Errc::invalid_argument, "quaternion_distance: inputs must be unit quaternions");
  const double inner = q1.coeffs().dot(q2.coeffs());
  return clamped_acos(2.0 * inner * inner - 1.0);
}

Pose sensor_pose_in_object_frame(const Viewpoint& x, const Quat& object_rotation) {
  const Quat inv = object_rotation.conjugate();
  return {inv * x.position, (inv * x.orientation).normalized()};
}

const Viewpoint& nearest_viewpoint(const Vec3& direction, const ViewGraph& graph) {
  require(graph.size() > 0, Errc::invalid_argument, "nearest_viewpoint: empty graph");
  const Vec3 d = direction.normalized();
  int best = 0;
  double best_dot = -kInf;
  for (const auto& v : graph.viewpoints()) {
    const double c = d.dot(v.position.normalized());
    if (c > best_dot + 1e-12) {
      best_dot = c;
      best = v.id;
    }
  }
  return graph.viewpoints()[best];
}

const Viewpoint& nearest_viewpoint(const Pose& p, const ViewGraph& graph) {
  return nearest_viewpoint(p.position, graph);
}

}  // namespace avp
