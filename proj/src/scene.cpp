#include "avp/scene.hpp"

#include <cmath>
#include <random>

#include "avp/error.hpp"

namespace avp {

namespace {

double planar_radius(const ObjectModel& m) {
  double r = 0.0;
  for (const auto& t : m.mesh)
    for (const auto& v : t) r = std::max(r, std::hypot(v.x(), v.y()));
  return r;
}

}  // namespace

std::vector<RenderItem> Scene::render_items() const {
  std::vector<RenderItem> items;
  for (std::size_t i = 0; i < objects.size(); ++i)
    items.push_back({&objects[i].world_mesh, static_cast<int>(i)});
  return items;
}

PlacedObject place(const ObjectModel& model, const Quat& orientation, const Vec3& position) {
  PlacedObject o;
  o.class_id = model.class_id;
  o.orientation = orientation;
  o.position = position;
  o.world_mesh = transformed(model.mesh, orientation, position);
  return o;
}

const ObjectModel& find_model(const std::vector<ObjectModel>& database, int class_id) {
  for (const auto& m : database)
    if (m.class_id == class_id) return m;
  fail(Errc::invalid_argument, "no model with class id " + std::to_string(class_id));
}

Scene single_object_scene(const ObjectModel& model, const Quat& orientation, int true_hyp) {
  Scene s;
  s.true_hypothesis = true_hyp;
  s.objects.push_back(place(model, orientation, Vec3::Zero()));
  s.table_z = model.min_z(orientation);
  return s;
}

Scene generate_scene(const std::vector<ObjectModel>& database, const HypothesisSet& hyps,
                     int true_hyp, const SceneConfig& config, std::uint64_t seed) {
  require(true_hyp >= 0 && true_hyp < hyps.size(), Errc::invalid_argument,
          "generate_scene: hypothesis out of range");
  require(config.occluders_min >= 0 && config.occluders_max >= config.occluders_min &&
              config.ring_min > 0 && config.ring_max >= config.ring_min,
          Errc::invalid_argument, "generate_scene: bad scene config");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Hypothesis& h = hyps[true_hyp];
  const ObjectModel* target = nullptr;
  Quat orientation = h.orientation;
  if (h.is_null()) {
    const auto interest = hyps.interest_classes();
    std::vector<const ObjectModel*> others;
    for (const auto& m : database)
      if (std::find(interest.begin(), interest.end(), m.class_id) == interest.end())
        others.push_back(&m);
    require(!others.empty(), Errc::invalid_argument, "generate_scene: no non-interest models");
    target = others[std::uniform_int_distribution<std::size_t>(0, others.size() - 1)(rng)];
    orientation = yaw_pitch_roll(2.0 * M_PI * unit(rng), 0.0, 0.0);
  } else {
    target = &find_model(database, h.class_id);
  }

  Scene s = single_object_scene(*target, orientation, true_hyp);
  const double target_r = planar_radius(*target);
  std::vector<std::pair<Vec3, double>> footprints{{Vec3::Zero(), target_r}};

  const int n = std::uniform_int_distribution<int>(config.occluders_min, config.occluders_max)(rng);
  for (int k = 0; k < n; ++k) {
    const ObjectModel& m =
        database[std::uniform_int_distribution<std::size_t>(0, database.size() - 1)(rng)];
    const Quat r = yaw_pitch_roll(2.0 * M_PI * unit(rng), 0.0, 0.0);
    const double rad = planar_radius(m);
    // Rejection sampling; the ring widens if the table is crowded.
    for (int attempt = 0; attempt < 200; ++attempt) {
      const double widen = 0.05 * (attempt / 40);
      const double dist = config.ring_min + (config.ring_max + widen - config.ring_min) * unit(rng);
      const double angle = 2.0 * M_PI * unit(rng);
      Vec3 p(dist * std::cos(angle), dist * std::sin(angle), 0.0);
      bool clear = true;
      for (const auto& [c, cr] : footprints) {
        if ((p - c).head<2>().norm() < rad + cr + 0.01) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      p.z() = s.table_z - m.min_z(r);
      s.objects.push_back(place(m, r, p));
      footprints.emplace_back(p, rad);
      break;
    }
  }
  return s;
}

}  // namespace avp
