#include "avp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avp/error.hpp"
#include "avp/features.hpp"
#include "avp/parallel.hpp"
#include "avp/serialize.hpp"

namespace avp {

namespace {

void check_context(const TrialContext& ctx) {
  require(ctx.problem.n_views() == ctx.model.n_views() && ctx.problem.M() == ctx.model.M() &&
              ctx.problem.Z() == ctx.model.Z(),
          Errc::invalid_argument, "trial: planning problem does not match the observation model");
  require(observation_count(ctx.tree.G(), ctx.tree.n_interest(), ctx.tree.n_models()) ==
              ctx.model.Z(),
          Errc::invalid_argument, "trial: detector does not match the observation model");
  require(ctx.max_steps >= 1, Errc::invalid_argument, "trial: max_steps must be >= 1");
}

Pose pose_around(const Vec3& center, const Viewpoint& vp) {
  return {center + vp.position, vp.orientation};
}

void check_action(const Action& a, const TrialContext& ctx) {
  const int bound = a.kind == Action::Move ? ctx.problem.n_views() : ctx.problem.M();
  require(a.target >= 0 && a.target < bound, Errc::protocol_violation,
          "policy returned an invalid action " + to_string(a));
}

// Side observation of another object from wherever the sensor is now.
using SideObserver = std::function<void(const Vec3& sensor_position, int step)>;

// Single-object inner loop starting from `belief`. With `plan_first` the
// policy sees the prior before any measurement and may decide outright.
TrialResult process_object(const Policy& policy, const Scene& scene, int object, int truth,
                           const TrialContext& ctx, int start, std::uint64_t seed,
                           Belief belief, bool keep_cloud, const SideObserver& side = {},
                           bool plan_first = false) {
  const ViewGraph& graph = ctx.model.graph();
  const Vec3 center = scene.objects.at(object).position;
  std::mt19937_64 policy_rng(mix_seed(seed, 0x5eed));

  PolicyState st;
  st.current = start;
  st.belief = std::move(belief);
  st.visited.assign(ctx.problem.n_views(), 0);

  TrialResult r;
  r.true_hypothesis = truth;
  auto finish = [&] {
    r.measurements = st.steps;
    r.total_cost = r.measurement_cost + r.movement_cost + r.decision_cost;
    return r;
  };
  if (plan_first) {
    const Action a = policy.act(st, policy_rng);
    check_action(a, ctx);
    if (a.kind == Action::Decide) {
      r.decision = a.target;
      r.decision_cost = ctx.problem.costs.lambda * ctx.problem.costs.decision(a.target, truth);
      return finish();
    }
    r.movement_cost += ctx.problem.arc(start, a.target);
    st.current = a.target;
  }
  for (;;) {
    const int x = st.current;
    std::mt19937_64 obs_rng(mix_seed(seed, static_cast<std::uint64_t>(st.steps), x));
    const Pose pose = pose_around(center, graph.at(x));
    Measurement m = observe(scene, object, pose, ctx.tree, ctx.sensor, obs_rng);
    if (m.psi != kFullyOccluded) st.belief = bayes_update(st.belief, x, m.z, m.psi, ctx.model);
    if (side) side(pose.position, st.steps);
    if (keep_cloud) r.cloud.insert(r.cloud.end(), m.world_points.begin(), m.world_points.end());
    st.visited[x] = 1;
    ++st.steps;
    r.measurement_cost += ctx.problem.costs.g0;

    Action a;
    if (st.steps >= ctx.max_steps) {
      a = Action::decide(best_decision(st.belief, ctx.problem.costs).first);
      r.forced = true;
    } else {
      a = policy.act(st, policy_rng);
    }
    check_action(a, ctx);
    r.trace.push_back({x, m.z, m.psi, st.belief, a});
    if (a.kind == Action::Decide) {
      r.decision = a.target;
      r.decision_cost = ctx.problem.costs.lambda * ctx.problem.costs.decision(a.target, truth);
      break;
    }
    r.movement_cost += ctx.problem.arc(x, a.target);
    st.current = a.target;
  }
  return finish();
}

}  // namespace

Measurement observe(const Scene& scene, int object, const Pose& sensor_pose, const VPTree& tree,
                    const SensorConfig& sensor, std::mt19937_64& rng) {
  require(object >= 0 && object < static_cast<int>(scene.objects.size()),
          Errc::invalid_argument, "observe: object index out of range");
  const LabeledCloud view = render_scene(scene.render_items(), sensor_pose, sensor.camera);
  PointCloud pts = view.select(object);
  add_depth_noise_inplace(pts, sensor.sigma, rng);
  const std::uint64_t kp_seed = rng();

  Measurement m;
  m.target_points = static_cast<int>(pts.size());
  m.psi = classify_occlusion(pts, sensor.occlusion);
  if (m.psi != kFullyOccluded) {
    const FeatureSet fs = extract_features(pts, tree.feature_config(), kp_seed);
    if (fs.degenerate) {
      m.psi = kFullyOccluded;
    } else {
      const TemplateId best = tree.best_match(fs);
      m.z = observation_index(best.l, best.g, tree.G(), tree.n_interest(), tree.n_models());
    }
  }
  const Mat3 rot = sensor_pose.rotation.toRotationMatrix();
  m.world_points.reserve(pts.size());
  for (const auto& p : pts) m.world_points.push_back(rot * p + sensor_pose.position);
  return m;
}

TrialResult run_trial(const Policy& policy, const Scene& scene, const TrialContext& ctx,
                      int start_viewpoint, std::uint64_t seed, bool keep_cloud) {
  check_context(ctx);
  require(start_viewpoint >= 0 && start_viewpoint < ctx.problem.n_views(),
          Errc::invalid_argument, "run_trial: start viewpoint out of range");
  require(scene.true_hypothesis >= 0 && scene.true_hypothesis < ctx.problem.M(),
          Errc::invalid_argument, "run_trial: true hypothesis out of range");
  return process_object(policy, scene, 0, scene.true_hypothesis, ctx, start_viewpoint, seed,
                        uniform_belief(ctx.problem.M()), keep_cloud);
}

MultiObjectResult run_multi_object(const Policy& policy, const Scene& scene,
                                   const std::vector<int>& truth, const TrialContext& ctx,
                                   int start_viewpoint, std::uint64_t seed,
                                   const MultiObjectOptions& options) {
  check_context(ctx);
  const int n = static_cast<int>(scene.objects.size());
  const int M = ctx.problem.M();
  require(static_cast<int>(truth.size()) == n, Errc::invalid_argument,
          "run_multi_object: one true hypothesis per object required");
  for (int t : truth)
    require(t >= 0 && t < M, Errc::invalid_argument, "run_multi_object: hypothesis out of range");
  require(start_viewpoint >= 0 && start_viewpoint < ctx.problem.n_views(),
          Errc::invalid_argument, "run_multi_object: start viewpoint out of range");

  const ViewGraph& graph = ctx.model.graph();
  const int null_h = ctx.model.hypotheses().null_index();
  const double rho = graph.radius();

  MultiObjectResult out;
  out.results.resize(n);
  out.active_measurements.assign(n, 0);
  out.passive_measurements.assign(n, 0);
  std::vector<Belief> beliefs(n, uniform_belief(M));
  std::vector<char> done(n, 0);
  require(n >= 1, Errc::invalid_argument, "run_multi_object: empty scene");
  Vec3 sensor = scene.objects[0].position + graph.at(start_viewpoint).position;

  for (int round = 0; round < n; ++round) {
    // Priority: highest probability of being an object of interest.
    int j = -1;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (j < 0 || 1.0 - beliefs[i][null_h] > 1.0 - beliefs[j][null_h]) j = i;
    }
    const Vec3 center = scene.objects[j].position;
    const int start =
        round == 0 && j == 0 ? start_viewpoint : nearest_viewpoint(sensor - center, graph).id;

    SideObserver side;
    if (options.opportunistic) {
      side = [&, j](const Vec3& position, int step) {
        sensor = position;
        for (int k = 0; k < n; ++k) {
          if (k == j || done[k]) continue;
          const Vec3 offset = position - scene.objects[k].position;
          if (std::abs(offset.norm() - rho) > options.range_tolerance * rho) continue;
          const Pose turned{position, look_at_origin(offset)};
          std::mt19937_64 rng(mix_seed(seed, 0x51de, static_cast<std::uint64_t>(j * 1000 + step), k));
          const Measurement m = observe(scene, k, turned, ctx.tree, ctx.sensor, rng);
          if (m.psi == kFullyOccluded) continue;
          const int xk = nearest_viewpoint(offset, graph).id;
          beliefs[k] = bayes_update(beliefs[k], xk, m.z, m.psi, ctx.model);
          ++out.passive_measurements[k];
        }
      };
    } else {
      side = [&](const Vec3& position, int) { sensor = position; };
    }

    // An object that already has side evidence may need no active look at all.
    out.results[j] = process_object(policy, scene, j, truth[j], ctx, start, mix_seed(seed, j),
                                    beliefs[j], false, side, out.passive_measurements[j] > 0);
    out.active_measurements[j] = out.results[j].measurements;
    if (!out.results[j].trace.empty()) beliefs[j] = out.results[j].trace.back().belief;
    done[j] = 1;
    out.order.push_back(j);
  }
  return out;
}

double refined_orientation_error(const TrialResult& trial, const HypothesisSet& hyps,
                                 const std::vector<ObjectModel>& database,
                                 const std::vector<std::unique_ptr<MeshIndex>>& indices,
                                 const Quat& truth, const IcpOptions& icp, std::uint64_t seed) {
  require(indices.size() == database.size(), Errc::invalid_argument,
          "refined_orientation_error: one index per model expected");
  const Hypothesis& h = hyps[trial.decision];
  if (h.is_null() || trial.cloud.empty()) return -1.0;
  const std::size_t slot = &find_model(database, h.class_id) - database.data();
  const IcpResult fit = icp_refine(trial.cloud, *indices[slot], h.orientation, icp, seed);
  return quaternion_distance(fit.rotation, truth);
}

// --- benchmark ---------------------------------------------------------------

std::unique_ptr<Policy> make_policy(const std::string& name, const PlanningProblem& problem,
                                    const AlphaSet* alphas, double threshold, int pool) {
  if (name == "static") return std::make_unique<StaticPolicy>(problem);
  if (name == "random") return std::make_unique<RandomWalkPolicy>(problem, threshold, pool);
  if (name == "gmi") return std::make_unique<GmiPolicy>(problem, threshold);
  if (name == "nvp") {
    require(alphas != nullptr, Errc::invalid_argument, "nvp policy needs a solved alpha set");
    return std::make_unique<NvpPolicy>(problem, *alphas);
  }
  fail(Errc::invalid_argument, "unknown policy '" + name + "'");
}

PolicySummary summarize(const std::string& policy, const std::vector<TrialRecord>& trials, int M) {
  PolicySummary s;
  s.policy = policy;
  s.confusion = Eigen::MatrixXd::Zero(M, M);
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(M, 4);
  Eigen::VectorXd decided = Eigen::VectorXd::Zero(M);
  Eigen::VectorXd per_truth = Eigen::VectorXd::Zero(M);
  int correct = 0;
  for (const auto& t : trials) {
    if (t.policy != policy) continue;
    const TrialResult& r = t.result;
    ++s.trials;
    correct += r.decision == r.true_hypothesis;
    s.mean_measurements += r.measurements;
    s.mean_measurement_cost += r.measurement_cost;
    s.mean_movement_cost += r.movement_cost;
    s.mean_decision_cost += r.decision_cost;
    s.mean_total_cost += r.total_cost;
    s.confusion(r.true_hypothesis, r.decision) += 1.0;
    per_truth[r.true_hypothesis] += 1.0;
    sums.row(r.decision) += Eigen::RowVector4d(r.measurement_cost, r.movement_cost,
                                               r.decision_cost, r.total_cost);
    decided[r.decision] += 1.0;
  }
  if (s.trials > 0) {
    const double n = s.trials;
    s.accuracy = correct / n;
    s.mean_measurements /= n;
    s.mean_measurement_cost /= n;
    s.mean_movement_cost /= n;
    s.mean_decision_cost /= n;
    s.mean_total_cost /= n;
  }
  for (int h = 0; h < M; ++h)
    if (per_truth[h] > 0) s.confusion.row(h) *= 100.0 / per_truth[h];
  s.cost_by_decision = Eigen::MatrixXd::Constant(M, 4, std::numeric_limits<double>::quiet_NaN());
  for (int h = 0; h < M; ++h)
    if (decided[h] > 0) s.cost_by_decision.row(h) = sums.row(h) / decided[h];
  return s;
}

BenchmarkReport run_benchmark(const std::vector<ObjectModel>& database, const TrialContext& ctx,
                              const AlphaSet& alphas, const BenchmarkConfig& config,
                              double threshold, int pool, std::uint64_t seed, int threads,
                              const std::function<void(int, int)>& progress) {
  check_context(ctx);
  require(config.scenes_per_hypothesis >= 1 && config.repetitions >= 1 && !config.policies.empty(),
          Errc::invalid_argument, "benchmark: empty benchmark");
  const HypothesisSet& hyps = ctx.model.hypotheses();
  const int M = hyps.size();
  const int S = M * config.scenes_per_hypothesis;
  const int R = config.repetitions;
  const int P = static_cast<int>(config.policies.size());

  std::vector<Scene> scenes;
  for (int s = 0; s < S; ++s)
    scenes.push_back(generate_scene(database, hyps, s / config.scenes_per_hypothesis,
                                    config.scene, mix_seed(seed, 1, s)));
  std::vector<int> starts(static_cast<std::size_t>(S) * R);
  for (int s = 0; s < S; ++s)
    for (int r = 0; r < R; ++r) {
      std::mt19937_64 rng(mix_seed(seed, 2, s, r));
      starts[s * R + r] =
          std::uniform_int_distribution<int>(0, ctx.problem.n_views() - 1)(rng);
    }

  std::vector<std::unique_ptr<Policy>> policies;
  for (const auto& name : config.policies)
    policies.push_back(make_policy(name, ctx.problem, &alphas, threshold, pool));

  TrialContext local = ctx;
  local.max_steps = config.max_steps;
  BenchmarkReport report;
  report.trials.resize(static_cast<std::size_t>(P) * S * R);
  std::atomic<int> finished{0};
  const int total = static_cast<int>(report.trials.size());
  parallel_for(report.trials.size(), threads, [&](std::size_t i) {
    const int p = static_cast<int>(i / (static_cast<std::size_t>(S) * R));
    const int s = static_cast<int>((i / R) % S);
    const int r = static_cast<int>(i % R);
    TrialRecord& rec = report.trials[i];
    rec.policy = config.policies[p];
    rec.scene = s;
    rec.repetition = r;
    rec.start = starts[s * R + r];
    // Same observation noise stream for every policy on a (scene, repetition).
    rec.result = run_trial(*policies[p], scenes[s], local, rec.start, mix_seed(seed, 3, s, r));
    rec.result.trace.clear();
    if (progress) progress(++finished, total);
  });
  for (const auto& name : config.policies) report.summaries.push_back(summarize(name, report.trials, M));
  return report;
}

// --- orientation sweep ---------------------------------------------------------

std::vector<int> periodic_local_minima(const std::vector<double>& curve) {
  const int n = static_cast<int>(curve.size());
  std::vector<int> out;
  if (n < 3) return out;
  for (int i = 0; i < n; ++i) {
    const double prev = curve[(i + n - 1) % n], next = curve[(i + 1) % n];
    if (curve[i] < prev && curve[i] <= next) out.push_back(i);
  }
  return out;
}

SweepReport orientation_accuracy_sweep(const ObjectModel& target,
                                       const std::vector<ObjectModel>& database,
                                       const TrialContext& ctx, const Policy& policy,
                                       const SweepConfig& config, std::uint64_t seed, int threads,
                                       const std::function<void(int, int)>& progress) {
  check_context(ctx);
  require(config.step_deg > 0 && config.repetitions >= 1, Errc::invalid_argument,
          "sweep: step and repetitions must be positive");
  const double steps_f = 360.0 / config.step_deg;
  const int n = static_cast<int>(std::lround(steps_f));
  require(std::abs(steps_f - n) < 1e-9, Errc::invalid_argument,
          "sweep: step must divide 360 degrees");
  const HypothesisSet& hyps = ctx.model.hypotheses();

  // Closest hypothesis of the swept class, used only for the trial's cost bookkeeping.
  auto closest = [&](const Quat& q) {
    int best = hyps.null_index();
    double best_d = std::numeric_limits<double>::infinity();
    for (int h = 0; h < hyps.size(); ++h) {
      if (hyps[h].is_null() || hyps[h].class_id != target.class_id) continue;
      const double d = quaternion_distance(hyps[h].orientation, q);
      if (d < best_d - 1e-12) {
        best = h;
        best_d = d;
      }
    }
    return best;
  };

  TrialContext local = ctx;
  local.max_steps = config.max_steps;
  std::vector<std::unique_ptr<MeshIndex>> indices;
  for (const ObjectModel& m : database)
    indices.push_back(std::make_unique<MeshIndex>(m, config.icp.index_spacing));
  const int R = config.repetitions;
  std::vector<double> errors(static_cast<std::size_t>(n) * n * R, -1.0);
  std::atomic<int> finished{0};
  parallel_for(errors.size(), threads, [&](std::size_t i) {
    const int cell = static_cast<int>(i / R), rep = static_cast<int>(i % R);
    const double yaw = (cell / n) * config.step_deg, roll = (cell % n) * config.step_deg;
    const Quat truth = yaw_pitch_roll(yaw * M_PI / 180.0, 0.0, roll * M_PI / 180.0);
    const Scene scene = single_object_scene(target, truth, closest(truth));
    std::mt19937_64 rng(mix_seed(seed, 4, cell, rep));
    const int start = std::uniform_int_distribution<int>(0, ctx.problem.n_views() - 1)(rng);
    const TrialResult r = run_trial(policy, scene, local, start, mix_seed(seed, 5, cell, rep), true);
    errors[i] = refined_orientation_error(r, hyps, database, indices, truth, config.icp,
                                          mix_seed(seed, 6, cell, rep));
    if (progress) progress(++finished, static_cast<int>(errors.size()));
  });

  SweepReport rep;
  double err_sum = 0.0;
  int err_n = 0;
  for (int i = 0; i < n; ++i) rep.yaws_deg.push_back(i * config.step_deg);
  rep.yaw_curve.assign(n, 0.0);
  for (int cell = 0; cell < n * n; ++cell) {
    SweepCell c;
    c.yaw_deg = (cell / n) * config.step_deg;
    c.roll_deg = (cell % n) * config.step_deg;
    double sum = 0.0;
    for (int r = 0; r < R; ++r) {
      const double e = errors[static_cast<std::size_t>(cell) * R + r];
      if (e < 0) {
        ++c.misses;
        continue;
      }
      ++c.detections;
      sum += e;
    }
    c.mean_error = c.detections ? sum / c.detections : std::numeric_limits<double>::quiet_NaN();
    err_sum += sum;
    err_n += c.detections;
    rep.cells.push_back(c);
  }
  for (int y = 0; y < n; ++y) {
    double sum = 0.0;
    int count = 0;
    for (int r = 0; r < n; ++r) {
      const double e = rep.cells[y * n + r].mean_error;
      if (std::isnan(e)) continue;
      sum += e;
      ++count;
    }
    rep.yaw_curve[y] = count ? sum / count : std::numeric_limits<double>::quiet_NaN();
  }
  rep.mean_error = err_n ? err_sum / err_n : std::numeric_limits<double>::quiet_NaN();
  rep.local_minima = periodic_local_minima(rep.yaw_curve);
  return rep;
}

}  // namespace avp
