#pragma once

#include <cstdint>
#include <vector>

#include "avp/hypotheses.hpp"
#include "avp/mesh.hpp"
#include "avp/sensing.hpp"

namespace avp {

struct PlacedObject {
  int class_id = 0;
  Quat orientation = Quat::Identity();
  Vec3 position = Vec3::Zero();  // surface centroid in the world
  std::vector<Triangle> world_mesh;
};

/// objects[0] is the target; every object's render label is its index.
struct Scene {
  std::vector<PlacedObject> objects;
  int true_hypothesis = 0;
  double table_z = 0.0;

  std::vector<RenderItem> render_items() const;
};

struct SceneConfig {
  int occluders_min = 3;
  int occluders_max = 6;
  double ring_min = 0.3;  // occluder distance from the target, meters
  double ring_max = 0.55;
};

PlacedObject place(const ObjectModel& model, const Quat& orientation, const Vec3& position);

/// Target for `true_hyp` at the origin (a random non-interest model at a random
/// yaw for the null hypothesis), resting on the table, plus seeded occluders.
Scene generate_scene(const std::vector<ObjectModel>& database, const HypothesisSet& hyps,
                     int true_hyp, const SceneConfig& config, std::uint64_t seed);

/// Single object at the origin with an explicit orientation, no occluders.
Scene single_object_scene(const ObjectModel& model, const Quat& orientation, int true_hyp);

const ObjectModel& find_model(const std::vector<ObjectModel>& database, int class_id);

}  // namespace avp
