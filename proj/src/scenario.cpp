#include "avp/scenario.hpp"

#include <fstream>

#include "avp/error.hpp"
#include "avp/serialize.hpp"

namespace avp {

using nlohmann::json;

namespace {

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  return j.contains(key) ? j.at(key) : empty;
}

}  // namespace

void Scenario::validate() const {
  require(!interest.empty(), Errc::invalid_argument, "scenario: interest list is empty");
  require(yaw_bins >= 1 && roll_bins >= 1, Errc::invalid_argument, "scenario: bins must be >= 1");
  require(spheres.train >= 2 && spheres.plan >= 1 && spheres.nominal >= 2 && spheres.radius > 0 &&
              spheres.neighbors >= 1,
          Errc::invalid_argument, "scenario: bad viewsphere sizes");
  features.validate();
  vptree.validate();
  nominal.validate();
  sensor.occlusion.validate();
  require(sensor.sigma >= 0, Errc::invalid_argument, "scenario: sigma must be >= 0");
  require(solver.belief_points >= 1 && solver.max_iters >= 1 && solver.epsilon > 0,
          Errc::invalid_argument, "scenario: bad solver settings");
  require(bench.threshold > 0 && bench.threshold <= 1 && bench.pool >= 1, Errc::invalid_argument,
          "scenario: bad baseline policy settings");
}

json Scenario::to_json() const {
  json interest_j = interest;
  const auto& b = bench.config;
  return {
      {"name", name},
      {"models_dir", models_dir.string()},
      {"interest", interest_j},
      {"hypotheses", {{"yaw_bins", yaw_bins}, {"roll_bins", roll_bins}}},
      {"costs", costs.to_json()},
      {"spheres",
       {{"train", spheres.train},
        {"plan", spheres.plan},
        {"nominal", spheres.nominal},
        {"radius", spheres.radius},
        {"neighbors", spheres.neighbors}}},
      {"sensor", sensor.to_json()},
      {"features", features.to_json()},
      {"vptree", {{"max_levels", vptree.max_levels}, {"kmeans_iters", vptree.kmeans_iters}}},
      {"nominal", {{"samples", nominal.samples}, {"alpha", nominal.alpha}}},
      {"solver", solver.to_json()},
      {"benchmark",
       {{"scenes_per_hypothesis", b.scenes_per_hypothesis},
        {"repetitions", b.repetitions},
        {"occluders_min", b.scene.occluders_min},
        {"occluders_max", b.scene.occluders_max},
        {"ring_min", b.scene.ring_min},
        {"ring_max", b.scene.ring_max},
        {"max_steps", b.max_steps},
        {"policies", b.policies},
        {"threshold", bench.threshold},
        {"pool", bench.pool}}},
      {"sweep",
       {{"target", sweep_target},
        {"step_deg", sweep.step_deg},
        {"repetitions", sweep.repetitions},
        {"max_steps", sweep.max_steps}}},
      {"seed", seed},
      {"output_dir", output_dir.string()},
  };
}

Scenario Scenario::from_json(const json& j, const std::filesystem::path& base_dir) {
  reject_unknown(j,
                 {"name", "models_dir", "interest", "hypotheses", "costs", "spheres", "sensor",
                  "features", "vptree", "nominal", "solver", "benchmark", "sweep", "seed",
                  "output_dir"},
                 "scenario");
  Scenario s;
  s.name = j.value("name", s.name);
  if (j.contains("models_dir") && !j.at("models_dir").get<std::string>().empty()) {
    s.models_dir = j.at("models_dir").get<std::string>();
    if (s.models_dir.is_relative() && !base_dir.empty()) s.models_dir = base_dir / s.models_dir;
  }
  require(j.contains("interest"), Errc::invalid_argument, "scenario: 'interest' is required");
  s.interest = j.at("interest").get<std::vector<std::string>>();

  const json& h = section(j, "hypotheses");
  reject_unknown(h, {"yaw_bins", "roll_bins"}, "hypotheses");
  s.yaw_bins = h.value("yaw_bins", s.yaw_bins);
  s.roll_bins = h.value("roll_bins", s.roll_bins);

  s.costs = DecisionCostParams::from_json(section(j, "costs"));

  const json& sp = section(j, "spheres");
  reject_unknown(sp, {"train", "plan", "nominal", "radius", "neighbors"}, "spheres");
  s.spheres.train = sp.value("train", s.spheres.train);
  s.spheres.plan = sp.value("plan", s.spheres.plan);
  s.spheres.nominal = sp.value("nominal", s.spheres.nominal);
  s.spheres.radius = sp.value("radius", s.spheres.radius);
  s.spheres.neighbors = sp.value("neighbors", s.spheres.neighbors);

  s.sensor = SensorConfig::from_json(section(j, "sensor"));
  s.features = FeatureConfig::from_json(section(j, "features"));

  const json& vt = section(j, "vptree");
  reject_unknown(vt, {"max_levels", "kmeans_iters"}, "vptree");
  s.vptree.max_levels = vt.value("max_levels", s.vptree.max_levels);
  s.vptree.kmeans_iters = vt.value("kmeans_iters", s.vptree.kmeans_iters);

  const json& nm = section(j, "nominal");
  reject_unknown(nm, {"samples", "alpha"}, "nominal");
  s.nominal.samples = nm.value("samples", s.nominal.samples);
  s.nominal.alpha = nm.value("alpha", s.nominal.alpha);

  s.solver = SolverConfig::from_json(section(j, "solver"));

  const json& b = section(j, "benchmark");
  reject_unknown(b,
                 {"scenes_per_hypothesis", "repetitions", "occluders_min", "occluders_max",
                  "ring_min", "ring_max", "max_steps", "policies", "threshold", "pool"},
                 "benchmark");
  auto& bc = s.bench.config;
  bc.scenes_per_hypothesis = b.value("scenes_per_hypothesis", bc.scenes_per_hypothesis);
  bc.repetitions = b.value("repetitions", bc.repetitions);
  bc.scene.occluders_min = b.value("occluders_min", bc.scene.occluders_min);
  bc.scene.occluders_max = b.value("occluders_max", bc.scene.occluders_max);
  bc.scene.ring_min = b.value("ring_min", bc.scene.ring_min);
  bc.scene.ring_max = b.value("ring_max", bc.scene.ring_max);
  bc.max_steps = b.value("max_steps", bc.max_steps);
  if (b.contains("policies")) bc.policies = b.at("policies").get<std::vector<std::string>>();
  s.bench.threshold = b.value("threshold", s.bench.threshold);
  s.bench.pool = b.value("pool", s.bench.pool);

  const json& sw = section(j, "sweep");
  reject_unknown(sw, {"target", "step_deg", "repetitions", "max_steps"}, "sweep");
  s.sweep_target = sw.value("target", std::string());
  s.sweep.step_deg = sw.value("step_deg", s.sweep.step_deg);
  s.sweep.repetitions = sw.value("repetitions", s.sweep.repetitions);
  s.sweep.max_steps = sw.value("max_steps", s.sweep.max_steps);

  s.seed = j.value("seed", s.seed);
  if (j.contains("output_dir")) {
    s.output_dir = j.at("output_dir").get<std::string>();
    if (s.output_dir.is_relative() && !base_dir.empty()) s.output_dir = base_dir / s.output_dir;
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    fail(Errc::invalid_argument, "cannot parse " + path.string() + ": " + e.what());
  }
  try {
    return from_json(j, path.parent_path());
  } catch (const json::exception& e) {
    fail(Errc::invalid_argument, "bad scenario " + path.string() + ": " + e.what());
  }
}

std::vector<ObjectModel> Scenario::load_models() const {
  return models_dir.empty() ? shipped_models() : load_model_directory(models_dir);
}

std::vector<int> Scenario::interest_classes(const std::vector<ObjectModel>& database) const {
  std::vector<int> out;
  for (const auto& name : interest) {
    const ObjectModel* found = nullptr;
    for (const auto& m : database)
      if (m.name == name) found = &m;
    require(found != nullptr, Errc::invalid_argument,
            "scenario: interest model '" + name + "' is not in the database");
    require(std::find(out.begin(), out.end(), found->class_id) == out.end(),
            Errc::invalid_argument, "scenario: duplicate interest model '" + name + "'");
    out.push_back(found->class_id);
  }
  require(out.size() < database.size(), Errc::invalid_argument,
          "scenario: at least one non-interest model is needed for the null hypothesis");
  return out;
}

std::vector<ObjectModel> Scenario::models_by_slot(const std::vector<ObjectModel>& database) const {
  const auto cls = interest_classes(database);
  std::vector<ObjectModel> out;
  for (int c : cls) out.push_back(find_model(database, c));
  for (const auto& m : database)
    if (std::find(cls.begin(), cls.end(), m.class_id) == cls.end()) out.push_back(m);
  return out;
}

HypothesisSet Scenario::hypotheses(const std::vector<ObjectModel>& database) const {
  return HypothesisSet::grid(interest_classes(database), yaw_bins, roll_bins);
}

}  // namespace avp
