#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "avp/scenario.hpp"

namespace avp {

struct StageOptions {
  int threads = 1;
  std::function<void(const std::string&)> log;  // progress lines; may be empty
};

// Artifact file names inside Scenario::output_dir.
inline constexpr const char* kVPTreeFile = "vptree.json";
inline constexpr const char* kNominalFile = "nominal.json";
inline constexpr const char* kPlanningFile = "planning.json";
inline constexpr const char* kPolicyFile = "policy.json";

/// Configuration fingerprints of each artifact. A stage refuses to consume an
/// upstream artifact whose stored fingerprint differs (Errc::hash_mismatch).
struct StageKeys {
  std::string vptree, nominal, planning, policy;
  std::string bench, sweep;  // keys of the result summaries
};
StageKeys stage_keys(const Scenario& sc, const std::vector<ObjectModel>& by_slot);

ViewGraph training_sphere(const Scenario& sc);
ViewGraph nominal_sphere(const Scenario& sc);
ViewGraph planning_sphere(const Scenario& sc);
CostSpec scenario_costs(const Scenario& sc, const HypothesisSet& hyps);

/// Noise-free renders of every slot model from the training sphere.
std::vector<TrainingTemplate> training_templates(const std::vector<ObjectModel>& by_slot,
                                                 const ViewGraph& sphere, const Scenario& sc,
                                                 int threads);

// Loaders with fingerprint and upstream-hash checks.
VPTree load_vptree(const Scenario& sc, const std::vector<ObjectModel>& by_slot);
NominalObsModel load_nominal(const Scenario& sc, const std::vector<ObjectModel>& by_slot,
                             const VPTree& tree);
PlanningObsModel load_planning(const Scenario& sc, const std::vector<ObjectModel>& by_slot,
                               const NominalObsModel& nominal);
AlphaSet load_policy(const Scenario& sc, const std::vector<ObjectModel>& by_slot,
                     const PlanningProblem& problem);

/// Everything downstream stages need, loaded and cross-checked.
struct LoadedArtifacts {
  std::vector<ObjectModel> database;
  std::vector<ObjectModel> by_slot;
  VPTree tree;
  PlanningObsModel planning;
  PlanningProblem problem;
  AlphaSet alphas;
};
LoadedArtifacts load_all(const Scenario& sc);

// Stages. Each writes its artifacts and a <stage>_summary.json into the
// output directory and returns the summary.
nlohmann::json run_train_vptree(const Scenario& sc, const StageOptions& opt);
nlohmann::json run_build_obsmodel(const Scenario& sc, const StageOptions& opt);
nlohmann::json run_derive_obsmodel(const Scenario& sc, const StageOptions& opt);
nlohmann::json run_solve(const Scenario& sc, const StageOptions& opt);
nlohmann::json run_bench(const Scenario& sc, const StageOptions& opt);
nlohmann::json run_orient_sweep(const Scenario& sc, const StageOptions& opt);

/// Writes the model database as .tri files.
void export_models(const std::vector<ObjectModel>& models, const std::filesystem::path& dir);

}  // namespace avp
