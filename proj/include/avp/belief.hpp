#pragma once

#include <utility>

#include <Eigen/Core>
#include <json.hpp>

#include "avp/hypotheses.hpp"
#include "avp/obsmodel.hpp"

namespace avp {

using Belief = Eigen::VectorXd;

/// Decision costs. decision(i, j) is J_D for deciding hypothesis i when j is
/// true; `lambda` scales it.
struct CostSpec {
  Eigen::MatrixXd decision;
  double lambda = 1.0;
  double g0 = 1.0;

  int M() const { return static_cast<int>(decision.rows()); }
  void validate() const;
};

struct DecisionCostParams {
  double false_positive = 75.0;  // decide an interest hypothesis when null is true
  double false_negative = 75.0;  // decide null when an interest hypothesis is true
  double wrong_class = 75.0;     // both interest, different class
  double wrong_orientation = 75.0;  // right class, orientation mismatch scale
  bool orientation_metric = false;  // scale wrong_orientation by d(r_hat, r) / pi
  double lambda = 1.0;
  double g0 = 1.0;

  nlohmann::json to_json() const;
  static DecisionCostParams from_json(const nlohmann::json& j);
};

CostSpec make_costs(const HypothesisSet& hyps, const DecisionCostParams& params);
/// J_D = c * (1 - delta).
CostSpec uniform_costs(int M, double c = 75.0, double lambda = 1.0, double g0 = 1.0);

Belief uniform_belief(int M);
bool is_valid_belief(const Belief& p, double tol = 1e-9);

/// Componentwise product with the likelihood column, renormalised. Throws
/// numerical_underflow when the normaliser is below 1e-300.
Belief bayes_update(const Belief& p, const Eigen::Ref<const Eigen::VectorXd>& likelihood);
Belief bayes_update(const Belief& p, int x, int z, OcclusionState psi,
                    const PlanningObsModel& model);

double expected_decision_cost(const Belief& p, int decision, const CostSpec& costs);
/// argmin decision (lowest index on ties) and its expected cost.
std::pair<int, double> best_decision(const Belief& p, const CostSpec& costs);

}  // namespace avp
