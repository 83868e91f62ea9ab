#include "avp/pipeline.hpp"

#include <chrono>
#include <cstdio>

#include "avp/error.hpp"
#include "avp/parallel.hpp"
#include "avp/plot.hpp"
#include "avp/serialize.hpp"

namespace avp {

using nlohmann::json;

namespace {

// Stage-specific seed streams derived from the scenario seed.
enum SeedStream : std::uint64_t {
  kSeedTrain = 11,
  kSeedTreeFeatures,
  kSeedNominal,
  kSeedSolve,
  kSeedBench,
  kSeedSweep,
};

std::uint64_t stage_seed(const Scenario& sc, SeedStream s) { return mix_seed(sc.seed, s); }

void say(const StageOptions& opt, const std::string& line) {
  if (opt.log) opt.log(line);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::function<void(int, int)> progress(const StageOptions& opt, const std::string& what) {
  if (!opt.log) return {};
  return [&opt, what, last = std::make_shared<int>(-1)](int done, int total) {
    const int pct = static_cast<int>(100LL * done / std::max(1, total));
    if (pct / 10 != *last / 10 || done == total) {
      *last = pct;
      opt.log(what + " " + std::to_string(pct) + "%");
    }
  };
}

void write_summary(const Scenario& sc, const std::string& stage, const json& summary) {
  write_text(sc.output_dir / (stage + "_summary.json"), summary.dump(2) + "\n");
}

json load_checked(const Scenario& sc, const char* file, const char* format,
                  const std::string& expected_key, const char* producer) {
  const auto path = sc.output_dir / file;
  require(std::filesystem::exists(path), Errc::io,
          path.string() + " not found; run '" + producer + "' first");
  json j = read_artifact(path, format, 1);
  require(j.value("key", std::string()) == expected_key, Errc::hash_mismatch,
          path.string() + " was built from a different configuration; rerun '" + producer + "'");
  return j;
}

std::string fixed(double v, int digits = 6) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

// --- configuration helpers ------------------------------------------------------

ViewGraph training_sphere(const Scenario& sc) {
  return build_viewsphere(sc.spheres.train, sc.spheres.radius, false,
                          {sc.spheres.neighbors, sc.costs.g0});
}

ViewGraph nominal_sphere(const Scenario& sc) {
  return build_viewsphere(sc.spheres.nominal, sc.spheres.radius, false,
                          {sc.spheres.neighbors, sc.costs.g0});
}

ViewGraph planning_sphere(const Scenario& sc) {
  ViewGraph g = build_viewsphere(2 * sc.spheres.plan, sc.spheres.radius, true,
                                 {sc.spheres.neighbors, sc.costs.g0});
  require(static_cast<int>(g.size()) == sc.spheres.plan, Errc::internal_consistency,
          "planning sphere has an unexpected size");
  return g;
}

CostSpec scenario_costs(const Scenario& sc, const HypothesisSet& hyps) {
  return make_costs(hyps, sc.costs);
}

StageKeys stage_keys(const Scenario& sc, const std::vector<ObjectModel>& by_slot) {
  json models = json::array();
  for (const auto& m : by_slot) models.push_back({m.name, hex(m.hash())});
  const json scj = sc.to_json();
  StageKeys k;
  k.vptree = hex(hash_json({{"models", models},
                            {"interest", sc.interest.size()},
                            {"camera",
                             {{"width", sc.sensor.camera.width},
                              {"height", sc.sensor.camera.height},
                              {"fov_y", sc.sensor.camera.fov_y}}},
                            {"features", scj["features"]},
                            {"vptree", scj["vptree"]},
                            {"train", sc.spheres.train},
                            {"radius", sc.spheres.radius},
                            {"seed", sc.seed}}));
  k.nominal = hex(hash_json({{"up", k.vptree},
                             {"sensor", scj["sensor"]},
                             {"nominal", scj["nominal"]},
                             {"sphere", sc.spheres.nominal},
                             {"neighbors", sc.spheres.neighbors},
                             {"g0", sc.costs.g0}}));
  k.planning = hex(hash_json({{"up", k.nominal},
                              {"hypotheses", scj["hypotheses"]},
                              {"plan", sc.spheres.plan},
                              {"neighbors", sc.spheres.neighbors},
                              {"g0", sc.costs.g0}}));
  k.policy = hex(hash_json({{"up", k.planning}, {"costs", scj["costs"]}, {"solver", scj["solver"]}}));
  k.bench = hex(hash_json({{"up", k.policy}, {"benchmark", scj["benchmark"]}}));
  k.sweep = hex(hash_json({{"up", k.policy}, {"sweep", scj["sweep"]}}));
  return k;
}

std::vector<TrainingTemplate> training_templates(const std::vector<ObjectModel>& by_slot,
                                                 const ViewGraph& sphere, const Scenario& sc,
                                                 int threads) {
  const int G = static_cast<int>(sphere.size());
  std::vector<TrainingTemplate> out(by_slot.size() * G);
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const int l = static_cast<int>(i / G) + 1, g = static_cast<int>(i % G) + 1;
    const PointCloud cloud = render_depth(by_slot[l - 1], sphere.at(g - 1), sc.sensor.camera);
    out[i] = {{g, l}, extract_features(cloud, sc.features, mix_seed(stage_seed(sc, kSeedTrain), l, g))};
  });
  return out;
}

// --- loaders --------------------------------------------------------------------

VPTree load_vptree(const Scenario& sc, const std::vector<ObjectModel>& by_slot) {
  const json j = load_checked(sc, kVPTreeFile, "avp.vptree", stage_keys(sc, by_slot).vptree,
                              "train-vptree");
  return VPTree::from_json(j.at("tree"));
}

NominalObsModel load_nominal(const Scenario& sc, const std::vector<ObjectModel>& by_slot,
                             const VPTree& tree) {
  const json j = load_checked(sc, kNominalFile, "avp.nominal", stage_keys(sc, by_slot).nominal,
                              "build-obsmodel");
  require(j.value("vptree_hash", std::string()) == hex(tree.hash()), Errc::hash_mismatch,
          "nominal model was built with a different detector; rerun 'build-obsmodel'");
  return NominalObsModel::from_json(j.at("model"));
}

PlanningObsModel load_planning(const Scenario& sc, const std::vector<ObjectModel>& by_slot,
                               const NominalObsModel& nominal) {
  const json j = load_checked(sc, kPlanningFile, "avp.planning", stage_keys(sc, by_slot).planning,
                              "derive-obsmodel");
  PlanningObsModel p = PlanningObsModel::from_json(j.at("model"));
  require(p.nominal().hash() == nominal.hash(), Errc::hash_mismatch,
          "planning model was derived from a different nominal model; rerun 'derive-obsmodel'");
  return p;
}

AlphaSet load_policy(const Scenario& sc, const std::vector<ObjectModel>& by_slot,
                     const PlanningProblem& problem) {
  const json j = load_checked(sc, kPolicyFile, "avp.policy", stage_keys(sc, by_slot).policy, "solve");
  AlphaSet a = AlphaSet::from_json(j.at("alphas"));
  require(a.instance_hash == problem.hash(), Errc::hash_mismatch,
          "policy was solved for a different planning problem; rerun 'solve'");
  return a;
}

LoadedArtifacts load_all(const Scenario& sc) {
  LoadedArtifacts a;
  a.database = sc.load_models();
  a.by_slot = sc.models_by_slot(a.database);
  a.tree = load_vptree(sc, a.by_slot);
  const NominalObsModel nominal = load_nominal(sc, a.by_slot, a.tree);
  a.planning = load_planning(sc, a.by_slot, nominal);
  a.problem = PlanningProblem::from_model(a.planning, scenario_costs(sc, a.planning.hypotheses()));
  a.alphas = load_policy(sc, a.by_slot, a.problem);
  return a;
}

// --- stages -------------------------------------------------------------------

json run_train_vptree(const Scenario& sc, const StageOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(sc.output_dir);
  const auto database = sc.load_models();
  const auto by_slot = sc.models_by_slot(database);
  const ViewGraph sphere = training_sphere(sc);
  say(opt, "rendering " + std::to_string(by_slot.size() * sphere.size()) + " training templates");
  const auto templates = training_templates(by_slot, sphere, sc, opt.threads);
  std::vector<int> classes;
  for (const auto& m : by_slot) classes.push_back(m.class_id);
  const VPTree tree =
      VPTree::train(templates, classes, static_cast<int>(sc.interest.size()),
                    static_cast<int>(sphere.size()), sc.vptree, sc.features,
                    stage_seed(sc, kSeedTreeFeatures));
  const std::string key = stage_keys(sc, by_slot).vptree;
  write_artifact(sc.output_dir / kVPTreeFile, "avp.vptree", 1, {{"key", key}, {"tree", tree.to_json()}});

  json summary = {{"stage", "train-vptree"},
                  {"key", key},
                  {"vptree_hash", hex(tree.hash())},
                  {"templates", templates.size()},
                  {"nodes", tree.nodes().size()},
                  {"depth", tree.depth()},
                  {"seconds", seconds_since(t0)}};
  write_summary(sc, "train_vptree", summary);
  return summary;
}

json run_build_obsmodel(const Scenario& sc, const StageOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto database = sc.load_models();
  const auto by_slot = sc.models_by_slot(database);
  const VPTree tree = load_vptree(sc, by_slot);
  const ViewGraph fine = nominal_sphere(sc);
  say(opt, "simulating " +
               std::to_string(fine.size() * by_slot.size() * (kOcclusionStates - 1) *
                              sc.nominal.samples) +
               " observations");
  const auto keys = stage_keys(sc, by_slot);
  const NominalObsModel m =
      build_nominal_model(by_slot, fine, tree, sc.sensor, sc.nominal, stage_seed(sc, kSeedNominal),
                          opt.threads, {{"vptree_hash", hex(tree.hash())}, {"key", keys.nominal}});
  write_artifact(sc.output_dir / kNominalFile, "avp.nominal", 1,
                 {{"key", keys.nominal}, {"vptree_hash", hex(tree.hash())}, {"model", m.to_json()}});
  json summary = {{"stage", "build-obsmodel"},
                  {"key", keys.nominal},
                  {"nominal_hash", hex(m.hash())},
                  {"viewpoints", fine.size()},
                  {"observations", m.Z()},
                  {"seconds", seconds_since(t0)}};
  write_summary(sc, "build_obsmodel", summary);
  return summary;
}

json run_derive_obsmodel(const Scenario& sc, const StageOptions&) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto database = sc.load_models();
  const auto by_slot = sc.models_by_slot(database);
  const VPTree tree = load_vptree(sc, by_slot);
  const NominalObsModel nominal = load_nominal(sc, by_slot, tree);
  const HypothesisSet hyps = sc.hypotheses(database);
  const PlanningObsModel p =
      derive_planning_model(nominal, planning_sphere(sc), hyps, by_slot, sc.sensor);
  const auto keys = stage_keys(sc, by_slot);
  write_artifact(sc.output_dir / kPlanningFile, "avp.planning", 1,
                 {{"key", keys.planning}, {"model", p.to_json()}});
  json summary = {{"stage", "derive-obsmodel"},
                  {"key", keys.planning},
                  {"planning_hash", hex(p.hash())},
                  {"viewpoints", p.n_views()},
                  {"hypotheses", p.M()},
                  {"observations", p.Z()},
                  {"seconds", seconds_since(t0)}};
  write_summary(sc, "derive_obsmodel", summary);
  return summary;
}

json run_solve(const Scenario& sc, const StageOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto database = sc.load_models();
  const auto by_slot = sc.models_by_slot(database);
  const VPTree tree = load_vptree(sc, by_slot);
  const NominalObsModel nominal = load_nominal(sc, by_slot, tree);
  const PlanningObsModel p = load_planning(sc, by_slot, nominal);
  const PlanningProblem problem = PlanningProblem::from_model(p, scenario_costs(sc, p.hypotheses()));
  say(opt, "solving with " + std::to_string(sc.solver.belief_points) + " belief points");
  const AlphaSet alphas = nvp_solve(problem, sc.solver, stage_seed(sc, kSeedSolve), opt.threads);
  const auto keys = stage_keys(sc, by_slot);
  write_artifact(sc.output_dir / kPolicyFile, "avp.policy", 1,
                 {{"key", keys.policy}, {"alphas", alphas.to_json()}});
  std::size_t vectors = 0;
  for (const auto& stage : alphas.stages)
    for (const auto& set : stage) vectors += set.size();
  json summary = {{"stage", "solve"},
                  {"key", keys.policy},
                  {"instance_hash", hex(alphas.instance_hash)},
                  {"converged", alphas.converged},
                  {"iterations", alphas.iterations},
                  {"residual", alphas.residual},
                  {"alpha_vectors", vectors},
                  {"initial_value", alphas.value(0, uniform_belief(problem.M()))},
                  {"seconds", seconds_since(t0)}};
  write_summary(sc, "solve", summary);
  return summary;
}

json run_bench(const Scenario& sc, const StageOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const LoadedArtifacts a = load_all(sc);
  const HypothesisSet& hyps = a.planning.hypotheses();
  const int M = hyps.size();
  const TrialContext ctx{a.planning, a.problem, a.tree, sc.sensor, sc.bench.config.max_steps};
  const BenchmarkReport report =
      run_benchmark(a.database, ctx, a.alphas, sc.bench.config, sc.bench.threshold, sc.bench.pool,
                    stage_seed(sc, kSeedBench), opt.threads, progress(opt, "bench"));

  std::string trials =
      "policy,scene,repetition,start,true,decision,measurements,measurement_cost,movement_cost,"
      "decision_cost,total_cost,forced\n";
  for (const auto& t : report.trials) {
    const TrialResult& r = t.result;
    trials += t.policy + ',' + std::to_string(t.scene) + ',' + std::to_string(t.repetition) + ',' +
              std::to_string(t.start) + ',' + hyps.label(r.true_hypothesis) + ',' +
              hyps.label(r.decision) + ',' + std::to_string(r.measurements) + ',' +
              fixed(r.measurement_cost) + ',' + fixed(r.movement_cost) + ',' +
              fixed(r.decision_cost) + ',' + fixed(r.total_cost) + ',' + (r.forced ? "1" : "0") +
              '\n';
  }
  std::string confusion = "policy,true";
  for (int h = 0; h < M; ++h) confusion += ',' + hyps.label(h);
  confusion += '\n';
  std::string costs = "policy,decided,measurement_cost,movement_cost,decision_cost,total_cost\n";
  std::string policies =
      "policy,trials,accuracy,mean_measurements,measurement_cost,movement_cost,decision_cost,"
      "total_cost\n";
  json summary_policies = json::array();
  for (const auto& s : report.summaries) {
    for (int h = 0; h < M; ++h) {
      confusion += s.policy + ',' + hyps.label(h);
      for (int d = 0; d < M; ++d) confusion += ',' + fixed(s.confusion(h, d), 2);
      confusion += '\n';
      costs += s.policy + ',' + hyps.label(h);
      for (int c = 0; c < 4; ++c) costs += ',' + fixed(s.cost_by_decision(h, c), 3);
      costs += '\n';
    }
    policies += s.policy + ',' + std::to_string(s.trials) + ',' + fixed(s.accuracy) + ',' +
                fixed(s.mean_measurements) + ',' + fixed(s.mean_measurement_cost) + ',' +
                fixed(s.mean_movement_cost) + ',' + fixed(s.mean_decision_cost) + ',' +
                fixed(s.mean_total_cost) + '\n';
    summary_policies.push_back({{"policy", s.policy},
                                {"trials", s.trials},
                                {"accuracy", s.accuracy},
                                {"mean_measurements", s.mean_measurements},
                                {"measurement_cost", s.mean_measurement_cost},
                                {"movement_cost", s.mean_movement_cost},
                                {"decision_cost", s.mean_decision_cost},
                                {"total_cost", s.mean_total_cost}});
    std::vector<std::string> labels;
    for (int h = 0; h < M; ++h) labels.push_back(hyps.label(h));
    write_text(sc.output_dir / ("bench_confusion_" + s.policy + ".svg"),
               svg_heatmap({"Decisions of " + s.policy + " (% of trials per true hypothesis)",
                            "decided", "true"},
                           labels, labels, s.confusion));
  }
  write_text(sc.output_dir / "bench_trials.csv", trials);
  write_text(sc.output_dir / "bench_confusion.csv", confusion);
  write_text(sc.output_dir / "bench_costs.csv", costs);
  write_text(sc.output_dir / "bench_policies.csv", policies);

  std::vector<std::string> names;
  std::vector<std::vector<double>> bars(4);
  for (const auto& s : report.summaries) {
    names.push_back(s.policy);
    bars[0].push_back(s.mean_measurement_cost);
    bars[1].push_back(s.mean_movement_cost);
    bars[2].push_back(s.mean_decision_cost);
    bars[3].push_back(s.mean_total_cost);
  }
  write_text(sc.output_dir / "bench_costs.svg",
             svg_bar_chart({"Mean cost per trial", "policy", "cost"}, names,
                           {"measurement", "movement", "decision", "total"}, bars));

  json summary = {{"stage", "bench"},
                  {"key", stage_keys(sc, a.by_slot).bench},
                  {"scenario", sc.name},
                  {"trials", report.trials.size()},
                  {"scenes", M * sc.bench.config.scenes_per_hypothesis},
                  {"repetitions", sc.bench.config.repetitions},
                  {"policies", summary_policies},
                  {"vptree_hash", hex(a.tree.hash())},
                  {"planning_hash", hex(a.planning.hash())},
                  {"instance_hash", hex(a.alphas.instance_hash)},
                  {"seconds", seconds_since(t0)}};
  write_summary(sc, "bench", summary);
  return summary;
}

json run_orient_sweep(const Scenario& sc, const StageOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const LoadedArtifacts a = load_all(sc);
  const std::string target_name = sc.sweep_target.empty() ? sc.interest.front() : sc.sweep_target;
  const ObjectModel* target = nullptr;
  for (const auto& m : a.database)
    if (m.name == target_name) target = &m;
  require(target != nullptr, Errc::invalid_argument, "sweep target '" + target_name + "' not found");
  const TrialContext ctx{a.planning, a.problem, a.tree, sc.sensor, sc.sweep.max_steps};
  const NvpPolicy policy(a.problem, a.alphas);
  const SweepReport rep = orientation_accuracy_sweep(*target, a.database, ctx, policy, sc.sweep,
                                                     stage_seed(sc, kSeedSweep), opt.threads,
                                                     progress(opt, "sweep"));

  std::string cells = "yaw_deg,roll_deg,detections,misses,mean_error_rad\n";
  for (const auto& c : rep.cells)
    cells += fixed(c.yaw_deg, 1) + ',' + fixed(c.roll_deg, 1) + ',' + std::to_string(c.detections) +
             ',' + std::to_string(c.misses) + ',' + fixed(c.mean_error) + '\n';
  std::string yaw = "yaw_deg,mean_error_rad,local_minimum\n";
  for (std::size_t i = 0; i < rep.yaws_deg.size(); ++i) {
    const bool is_min = std::find(rep.local_minima.begin(), rep.local_minima.end(),
                                  static_cast<int>(i)) != rep.local_minima.end();
    yaw += fixed(rep.yaws_deg[i], 1) + ',' + fixed(rep.yaw_curve[i]) + ',' + (is_min ? "1" : "0") + '\n';
  }
  write_text(sc.output_dir / "sweep_cells.csv", cells);
  write_text(sc.output_dir / "sweep_yaw.csv", yaw);

  std::vector<double> hyp_yaws, minima_deg;
  for (int h = 0; h < a.planning.hypotheses().size(); ++h) {
    const Hypothesis& hy = a.planning.hypotheses()[h];
    if (hy.is_null() || std::find(hyp_yaws.begin(), hyp_yaws.end(), hy.yaw_deg) != hyp_yaws.end())
      continue;
    hyp_yaws.push_back(hy.yaw_deg);
  }
  std::sort(hyp_yaws.begin(), hyp_yaws.end());
  for (int i : rep.local_minima) minima_deg.push_back(rep.yaws_deg[i]);
  std::vector<double> curve_deg;
  for (double e : rep.yaw_curve) curve_deg.push_back(e * 180.0 / M_PI);
  write_text(sc.output_dir / "sweep_yaw.svg",
             svg_line_chart({"Orientation error averaged over roll (dashed: hypothesized yaws)",
                             "ground-truth yaw (deg)", "error (deg)"},
                            {{"mean error", rep.yaws_deg, curve_deg}}, hyp_yaws));

  int detections = 0, misses = 0;
  for (const auto& c : rep.cells) {
    detections += c.detections;
    misses += c.misses;
  }
  json summary = {{"stage", "orient-sweep"},
                  {"key", stage_keys(sc, a.by_slot).sweep},
                  {"target", target_name},
                  {"cells", rep.cells.size()},
                  {"repetitions", sc.sweep.repetitions},
                  {"detections", detections},
                  {"misses", misses},
                  {"mean_error_deg", rep.mean_error * 180.0 / M_PI},
                  {"hypothesis_yaws_deg", hyp_yaws},
                  {"local_minima_deg", minima_deg},
                  {"seconds", seconds_since(t0)}};
  write_summary(sc, "orient_sweep", summary);
  return summary;
}

void export_models(const std::vector<ObjectModel>& models, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& m : models) save_mesh(m, dir / (m.name + ".tri"));
}

}  // namespace avp
