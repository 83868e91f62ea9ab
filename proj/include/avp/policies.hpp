#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "avp/belief.hpp"

namespace avp {

/// Everything a planner needs, with observations fixed to the non-occluded
/// state.
struct PlanningProblem {
  Eigen::MatrixXd move_cost;     // g(x, x'), includes the measurement cost
  Eigen::MatrixXd arc;           // great-circle distance, used to rank "closest"
  std::vector<Eigen::MatrixXd> obs;  // per viewpoint: M x Z, rows sum to 1
  CostSpec costs;

  int n_views() const { return static_cast<int>(obs.size()); }
  int M() const { return costs.M(); }
  int Z() const { return obs.empty() ? 0 : static_cast<int>(obs[0].cols()); }

  void validate() const;
  std::uint64_t hash() const;

  static PlanningProblem from_model(const PlanningObsModel& model, const CostSpec& costs);
};

struct Action {
  enum Kind { Move, Decide };
  Kind kind = Decide;
  int target = 0;  // viewpoint id or hypothesis index

  static Action move(int x) { return {Move, x}; }
  static Action decide(int h) { return {Decide, h}; }
  /// Moves occupy [0, n_views), decisions [n_views, n_views + M).
  int index(int n_views) const { return kind == Move ? target : n_views + target; }
  friend bool operator==(const Action& a, const Action& b) {
    return a.kind == b.kind && a.target == b.target;
  }
};

std::string to_string(const Action& a);

struct PolicyState {
  int current = 0;
  Belief belief;
  std::vector<char> visited;
  int steps = 0;  // measurements taken so far
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual Action act(const PolicyState& state, std::mt19937_64& rng) const = 0;
};

/// argmax of p, lowest index on ties.
int argmax_belief(const Belief& p);

/// Decide after the first measurement.
class StaticPolicy : public Policy {
 public:
  explicit StaticPolicy(const PlanningProblem& problem) : problem_(problem) {}
  std::string name() const override { return "static"; }
  Action act(const PolicyState& state, std::mt19937_64& rng) const override;

 private:
  const PlanningProblem& problem_;
};

/// Random walk over the closest unvisited viewpoints; stops once a hypothesis
/// exceeds `threshold`.
class RandomWalkPolicy : public Policy {
 public:
  RandomWalkPolicy(const PlanningProblem& problem, double threshold = 0.6, int pool = 3)
      : problem_(problem), threshold_(threshold), pool_(pool) {}
  std::string name() const override { return "random"; }
  Action act(const PolicyState& state, std::mt19937_64& rng) const override;

 private:
  const PlanningProblem& problem_;
  double threshold_;
  int pool_;
};

/// Mutual information (bits) between the hypothesis and the next observation
/// drawn from `obs` (M x Z) under belief p.
double mutual_information(const Belief& p, const Eigen::MatrixXd& obs);

/// Greedy information gain per unit movement cost over unvisited viewpoints.
class GmiPolicy : public Policy {
 public:
  GmiPolicy(const PlanningProblem& problem, double threshold = 0.6)
      : problem_(problem), threshold_(threshold) {}
  std::string name() const override { return "gmi"; }
  Action act(const PolicyState& state, std::mt19937_64& rng) const override;

 private:
  const PlanningProblem& problem_;
  double threshold_;
};

// --- point-based value iteration -------------------------------------------

struct SolverConfig {
  int belief_points = 500;
  int max_iters = 200;
  double epsilon = 1e-4;
  int horizon_cap = 0;  // > 0: finite horizon with one alpha set per stage
  int rollout_depth = 8;

  nlohmann::json to_json() const;
  static SolverConfig from_json(const nlohmann::json& j);
};

struct AlphaVector {
  Eigen::VectorXd values;
  Action action;
};

/// Alpha sets per viewpoint state. With a horizon cap, stage k holds the
/// value with k measurements still allowed; otherwise there is one stage.
struct AlphaSet {
  int n_views = 0;
  int M = 0;
  bool stationary = true;
  std::vector<std::vector<std::vector<AlphaVector>>> stages;  // [stage][x]
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  std::uint64_t instance_hash = 0;

  int horizon() const { return static_cast<int>(stages.size()) - 1; }
  const std::vector<AlphaVector>& at(int x, int steps_remaining) const;
  /// Value estimate J(s, p); decision states are absorbing with value 0.
  double value(int s, const Belief& p, int steps_remaining = -1) const;

  nlohmann::json to_json() const;
  static AlphaSet from_json(const nlohmann::json& j);
};

/// Beliefs reached by random action sequences from uniform and Dirichlet
/// priors. Includes the uniform belief and every vertex of the simplex.
std::vector<Belief> sample_beliefs(const PlanningProblem& problem, int count, int depth,
                                   std::uint64_t seed);

AlphaSet nvp_solve(const PlanningProblem& problem, const SolverConfig& config,
                   std::uint64_t seed, int threads = 1);

/// Action of the minimising alpha at augmented state s (viewpoint id, or
/// n_views + h for a decided hypothesis). Ties go to the lowest action index.
/// Moves into `blocked` viewpoints are skipped when a mask is given.
Action nvp_policy_action(const AlphaSet& alphas, int s, const Belief& p,
                         int steps_remaining = -1, const std::vector<char>* blocked = nullptr);

class NvpPolicy : public Policy {
 public:
  NvpPolicy(const PlanningProblem& problem, const AlphaSet& alphas);
  std::string name() const override { return "nvp"; }
  Action act(const PolicyState& state, std::mt19937_64& rng) const override;

 private:
  const AlphaSet& alphas_;
};

/// Exact expectimax over the augmented recursion with a forced decision once
/// `horizon` measurements are used. s as in nvp_policy_action.
double brute_force_value(const PlanningProblem& problem, int s, const Belief& p, int horizon);

}  // namespace avp
