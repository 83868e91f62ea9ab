#include "avp/belief.hpp"

#include <cmath>

#include "avp/error.hpp"
#include "avp/serialize.hpp"

namespace avp {

using nlohmann::json;

void CostSpec::validate() const {
  require(decision.rows() >= 2 && decision.rows() == decision.cols(), Errc::invalid_argument,
          "costs: decision matrix must be square with M >= 2");
  require((decision.array() >= 0.0).all() && decision.allFinite(), Errc::invalid_argument,
          "costs: decision costs must be finite and >= 0");
  require(lambda >= 0.0 && g0 >= 0.0, Errc::invalid_argument, "costs: lambda, g0 must be >= 0");
}

json DecisionCostParams::to_json() const {
  return {{"k_plus", false_positive},     {"k_minus", false_negative},
          {"k_class", wrong_class},       {"k_orient", wrong_orientation},
          {"orientation_metric", orientation_metric},
          {"lambda", lambda},             {"g0", g0}};
}

DecisionCostParams DecisionCostParams::from_json(const json& j) {
  reject_unknown(j, {"k_plus", "k_minus", "k_class", "k_orient", "orientation_metric", "lambda", "g0"},
                 "costs");
  DecisionCostParams p;
  p.false_positive = j.value("k_plus", p.false_positive);
  p.false_negative = j.value("k_minus", p.false_negative);
  p.wrong_class = j.value("k_class", p.wrong_class);
  p.wrong_orientation = j.value("k_orient", p.wrong_orientation);
  p.orientation_metric = j.value("orientation_metric", p.orientation_metric);
  p.lambda = j.value("lambda", p.lambda);
  p.g0 = j.value("g0", p.g0);
  return p;
}

CostSpec make_costs(const HypothesisSet& hyps, const DecisionCostParams& params) {
  const int M = hyps.size();
  CostSpec c;
  c.lambda = params.lambda;
  c.g0 = params.g0;
  c.decision = Eigen::MatrixXd::Zero(M, M);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      const Hypothesis& d = hyps[i];
      const Hypothesis& t = hyps[j];
      double cost = 0.0;
      if (d.is_null() && t.is_null()) {
        cost = 0.0;
      } else if (t.is_null()) {
        cost = params.false_positive;
      } else if (d.is_null()) {
        cost = params.false_negative;
      } else if (d.class_id != t.class_id) {
        cost = params.wrong_class;
      } else if (i != j) {
        cost = params.orientation_metric
                   ? params.wrong_orientation * quaternion_distance(d.orientation, t.orientation) / M_PI
                   : params.wrong_orientation;
      }
      c.decision(i, j) = cost;
    }
  }
  c.validate();
  return c;
}

CostSpec uniform_costs(int M, double cost, double lambda, double g0) {
  CostSpec c;
  c.decision = Eigen::MatrixXd::Constant(M, M, cost);
  c.decision.diagonal().setZero();
  c.lambda = lambda;
  c.g0 = g0;
  c.validate();
  return c;
}

Belief uniform_belief(int M) {
  require(M >= 1, Errc::invalid_argument, "uniform_belief: M must be >= 1");
  return Belief::Constant(M, 1.0 / M);
}

bool is_valid_belief(const Belief& p, double tol) {
  return p.size() > 0 && (p.array() >= 0.0).all() && std::abs(p.sum() - 1.0) <= tol;
}

Belief bayes_update(const Belief& p, const Eigen::Ref<const Eigen::VectorXd>& likelihood) {
  require(p.size() == likelihood.size(), Errc::invalid_argument,
          "bayes_update: dimension mismatch");
  Belief q = p.cwiseProduct(likelihood);
  const double norm = q.sum();
  require(norm >= 1e-300, Errc::numerical_underflow, "bayes_update: normaliser underflow");
  return q / norm;
}

Belief bayes_update(const Belief& p, int x, int z, OcclusionState psi,
                    const PlanningObsModel& model) {
  require(p.size() == model.M(), Errc::invalid_argument, "bayes_update: belief size mismatch");
  Eigen::VectorXd lik(model.M());
  for (int h = 0; h < model.M(); ++h) lik[h] = model.likelihood(z, x, h, psi);
  return bayes_update(p, lik);
}

double expected_decision_cost(const Belief& p, int decision, const CostSpec& costs) {
  require(decision >= 0 && decision < costs.M() && p.size() == costs.M(),
          Errc::invalid_argument, "expected_decision_cost: index out of range");
  return costs.lambda * costs.decision.row(decision).dot(p);
}

std::pair<int, double> best_decision(const Belief& p, const CostSpec& costs) {
  require(p.size() == costs.M(), Errc::invalid_argument, "best_decision: size mismatch");
  int best = 0;
  double best_cost = expected_decision_cost(p, 0, costs);
  for (int i = 1; i < costs.M(); ++i) {
    const double c = expected_decision_cost(p, i, costs);
    if (c < best_cost) {
      best = i;
      best_cost = c;
    }
  }
  return {best, best_cost};
}

}  // namespace avp
