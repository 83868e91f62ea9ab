#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "avp/icp.hpp"
#include "avp/obsmodel.hpp"
#include "avp/policies.hpp"
#include "avp/scene.hpp"

namespace avp {

/// Artifacts a trial needs. The caller is responsible for checking that they
/// were built from one another (see pipeline).
struct TrialContext {
  const PlanningObsModel& model;
  const PlanningProblem& problem;
  const VPTree& tree;
  const SensorConfig& sensor;
  int max_steps = 50;
};

/// One noisy view of a single scene object.
struct Measurement {
  int z = 0;  // 0 when nothing usable was seen
  OcclusionState psi = kFullyOccluded;
  int target_points = 0;
  PointCloud world_points;  // noisy target points in the world frame
};

/// Renders `scene` from `sensor_pose` and turns object `object`'s points into
/// an observation. Degenerate or empty views report psi = fully occluded so
/// the belief update is uninformative.
Measurement observe(const Scene& scene, int object, const Pose& sensor_pose,
                    const VPTree& tree, const SensorConfig& sensor, std::mt19937_64& rng);

struct TrialStep {
  int viewpoint = 0;
  int z = 0;
  OcclusionState psi = kNotOccluded;
  Belief belief;  // after the update
  Action action;  // taken after the update
};

struct TrialResult {
  int true_hypothesis = 0;
  int decision = 0;
  int measurements = 0;  // tau
  double measurement_cost = 0.0;
  double movement_cost = 0.0;
  double decision_cost = 0.0;
  double total_cost = 0.0;
  bool forced = false;  // step cap reached
  std::vector<TrialStep> trace;
  PointCloud cloud;  // accumulated target points, world frame, when kept
};

/// Single-object loop: observe, update, act until the policy decides or the
/// step cap forces the Bayes decision.
TrialResult run_trial(const Policy& policy, const Scene& scene, const TrialContext& ctx,
                      int start_viewpoint, std::uint64_t seed, bool keep_cloud = false);

struct MultiObjectOptions {
  bool opportunistic = true;
  /// Side observations are used only when the sensor distance to the other
  /// object is within this factor of the viewsphere radius.
  double range_tolerance = 0.35;
};

struct MultiObjectResult {
  std::vector<int> order;               // object indices in processing order
  std::vector<TrialResult> results;     // indexed by object
  std::vector<int> active_measurements;   // taken while the object was processed
  std::vector<int> passive_measurements;  // opportunistic, before processing
};

/// Every object in the scene is a candidate (its true hypothesis is given by
/// `truth[i]`). Objects are processed by descending 1 - p(null).
MultiObjectResult run_multi_object(const Policy& policy, const Scene& scene,
                                   const std::vector<int>& truth, const TrialContext& ctx,
                                   int start_viewpoint, std::uint64_t seed,
                                   const MultiObjectOptions& options = {});

/// Quaternion error of the refined orientation estimate for one trial, or a
/// negative value when the object was not detected.
/// `indices[i]` is the surface index of `database[i]`.
double refined_orientation_error(const TrialResult& trial, const HypothesisSet& hyps,
                                 const std::vector<ObjectModel>& database,
                                 const std::vector<std::unique_ptr<MeshIndex>>& indices,
                                 const Quat& truth, const IcpOptions& icp, std::uint64_t seed);

// --- benchmark ---------------------------------------------------------------

struct BenchmarkConfig {
  int scenes_per_hypothesis = 10;
  int repetitions = 50;
  SceneConfig scene;
  int max_steps = 50;
  std::vector<std::string> policies{"static", "random", "gmi", "nvp"};
};

struct TrialRecord {
  std::string policy;
  int scene = 0;
  int repetition = 0;
  int start = 0;
  TrialResult result;
};

struct PolicySummary {
  std::string policy;
  int trials = 0;
  double accuracy = 0.0;  // fraction of exact hypothesis matches
  double mean_measurements = 0.0;
  double mean_measurement_cost = 0.0;
  double mean_movement_cost = 0.0;
  double mean_decision_cost = 0.0;
  double mean_total_cost = 0.0;
  Eigen::MatrixXd confusion;  // percent, rows = true, cols = decided
  /// Per decided hypothesis: mean measurement, movement, decision, total cost
  /// (NaN where never decided).
  Eigen::MatrixXd cost_by_decision;
};

struct BenchmarkReport {
  std::vector<TrialRecord> trials;  // ordered by (policy, scene, repetition)
  std::vector<PolicySummary> summaries;
};

std::unique_ptr<Policy> make_policy(const std::string& name, const PlanningProblem& problem,
                                    const AlphaSet* alphas, double threshold = 0.6, int pool = 3);

BenchmarkReport run_benchmark(const std::vector<ObjectModel>& database, const TrialContext& ctx,
                              const AlphaSet& alphas, const BenchmarkConfig& config,
                              double threshold, int pool, std::uint64_t seed, int threads,
                              const std::function<void(int, int)>& progress = {});

PolicySummary summarize(const std::string& policy, const std::vector<TrialRecord>& trials, int M);

// --- orientation sweep ---------------------------------------------------------

struct SweepConfig {
  double step_deg = 7.5;
  int repetitions = 2;
  int max_steps = 50;
  IcpOptions icp;
};

struct SweepCell {
  double yaw_deg = 0.0;
  double roll_deg = 0.0;
  int detections = 0;
  int misses = 0;
  double mean_error = 0.0;  // radians, over detections; NaN if none
};

struct SweepReport {
  std::vector<SweepCell> cells;  // yaw-major
  std::vector<double> yaws_deg;
  std::vector<double> yaw_curve;  // mean error over roll per yaw
  double mean_error = 0.0;
  /// Indices into yaws_deg that are local minima of the (periodic) curve.
  std::vector<int> local_minima;
};

/// Ground truth Rz(yaw) * Rx(roll) over the full grid; `target` is the class
/// being swept.
SweepReport orientation_accuracy_sweep(const ObjectModel& target,
                                       const std::vector<ObjectModel>& database,
                                       const TrialContext& ctx, const Policy& policy,
                                       const SweepConfig& config, std::uint64_t seed,
                                       int threads,
                                       const std::function<void(int, int)>& progress = {});

/// Local minima of a periodic curve (non-strict on one side).
std::vector<int> periodic_local_minima(const std::vector<double>& curve);

}  // namespace avp
