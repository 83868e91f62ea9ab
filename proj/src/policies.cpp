#include "avp/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "avp/error.hpp"
#include "avp/serialize.hpp"

namespace avp {

void PlanningProblem::validate() const {
  costs.validate();
  const int X = n_views();
  require(X >= 1, Errc::invalid_argument, "planning problem: no viewpoints");
  require(move_cost.rows() == X && move_cost.cols() == X && arc.rows() == X && arc.cols() == X,
          Errc::invalid_argument, "planning problem: cost matrix size mismatch");
  require((move_cost.array() > 0.0).all() && move_cost.allFinite(), Errc::invalid_argument,
          "planning problem: movement costs must be positive and finite");
  for (const auto& o : obs) {
    require(o.rows() == M() && o.cols() == Z() && Z() >= 1, Errc::invalid_argument,
            "planning problem: observation matrix size mismatch");
    require((o.array() >= 0.0).all(), Errc::invalid_argument,
            "planning problem: negative observation probability");
    for (int h = 0; h < M(); ++h)
      require(std::abs(o.row(h).sum() - 1.0) < 1e-9, Errc::invalid_argument,
              "planning problem: observation rows must sum to 1");
  }
}

std::uint64_t PlanningProblem::hash() const {
  std::string bytes;
  auto put = [&](const Eigen::MatrixXd& m) {
    bytes.append(reinterpret_cast<const char*>(m.data()), m.size() * sizeof(double));
  };
  put(move_cost);
  put(arc);
  for (const auto& o : obs) put(o);
  put(costs.decision);
  const double extra[2] = {costs.lambda, costs.g0};
  bytes.append(reinterpret_cast<const char*>(extra), sizeof(extra));
  return fnv1a(bytes);
}

PlanningProblem PlanningProblem::from_model(const PlanningObsModel& model, const CostSpec& costs) {
  require(costs.M() == model.M(), Errc::invalid_argument,
          "planning problem: cost matrix does not match the hypothesis count");
  const ViewGraph& g = model.graph();
  require(std::abs(g.g0() - costs.g0) < 1e-12, Errc::invalid_argument,
          "planning problem: measurement cost differs between graph and cost spec");
  PlanningProblem p;
  p.costs = costs;
  const int X = model.n_views();
  p.move_cost = g.move_cost_matrix();
  p.arc.resize(X, X);
  for (int a = 0; a < X; ++a)
    for (int b = 0; b < X; ++b) p.arc(a, b) = great_circle_distance(g.at(a), g.at(b));
  for (int x = 0; x < X; ++x) p.obs.push_back(model.matrix(x, kNotOccluded));
  p.validate();
  return p;
}

std::string to_string(const Action& a) {
  return (a.kind == Action::Move ? "move:" : "decide:") + std::to_string(a.target);
}

int argmax_belief(const Belief& p) {
  int best = 0;
  for (int i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return best;
}

Action StaticPolicy::act(const PolicyState& state, std::mt19937_64&) const {
  return Action::decide(best_decision(state.belief, problem_.costs).first);
}

Action RandomWalkPolicy::act(const PolicyState& state, std::mt19937_64& rng) const {
  const int best = argmax_belief(state.belief);
  if (state.belief[best] >= threshold_) return Action::decide(best);
  std::vector<int> open;
  for (int x = 0; x < problem_.n_views(); ++x)
    if (!state.visited[x]) open.push_back(x);
  if (open.empty()) return Action::decide(best);
  std::stable_sort(open.begin(), open.end(), [&](int a, int b) {
    return problem_.arc(state.current, a) < problem_.arc(state.current, b);
  });
  const int n = std::min<int>(pool_, static_cast<int>(open.size()));
  std::uniform_int_distribution<int> pick(0, n - 1);
  return Action::move(open[pick(rng)]);
}

double mutual_information(const Belief& p, const Eigen::MatrixXd& obs) {
  require(obs.rows() == p.size(), Errc::invalid_argument, "mutual_information: size mismatch");
  const Eigen::VectorXd pz = obs.transpose() * p;
  double mi = 0.0;
  for (int h = 0; h < obs.rows(); ++h) {
    if (p[h] <= 0.0) continue;
    for (int z = 0; z < obs.cols(); ++z) {
      const double l = obs(h, z);
      if (l <= 0.0 || pz[z] <= 0.0) continue;
      mi += p[h] * l * std::log2(l / pz[z]);
    }
  }
  return std::max(0.0, mi);
}

Action GmiPolicy::act(const PolicyState& state, std::mt19937_64&) const {
  const int best = argmax_belief(state.belief);
  if (state.belief[best] >= threshold_) return Action::decide(best);
  int choice = -1;
  double choice_ratio = -1.0, choice_cost = 0.0;
  for (int x = 0; x < problem_.n_views(); ++x) {
    if (state.visited[x]) continue;
    const double cost = problem_.move_cost(state.current, x);
    const double ratio = mutual_information(state.belief, problem_.obs[x]) / cost;
    if (choice < 0 || ratio > choice_ratio ||
        (ratio == choice_ratio && cost < choice_cost)) {
      choice = x;
      choice_ratio = ratio;
      choice_cost = cost;
    }
  }
  if (choice < 0) return Action::decide(best);
  return Action::move(choice);
}

namespace {

struct BruteForce {
  const PlanningProblem& problem;
  long long nodes = 0;

  double decide(const Belief& p) const { return best_decision(p, problem.costs).second; }

  double value(int x, const Belief& p, int horizon) {
    if (++nodes > 10'000'000)
      fail(Errc::resource_limit, "brute_force_value: more than 1e7 nodes");
    double best = decide(p);
    if (horizon == 0) return best;
    for (int next = 0; next < problem.n_views(); ++next) {
      const Eigen::MatrixXd& o = problem.obs[next];
      double expect = problem.move_cost(x, next);
      for (int z = 0; z < problem.Z(); ++z) {
        const Eigen::VectorXd joint = p.cwiseProduct(o.col(z));
        const double pz = joint.sum();
        if (pz <= 0.0) continue;
        expect += pz * value(next, joint / pz, horizon - 1);
        if (expect >= best) break;
      }
      best = std::min(best, expect);
    }
    return best;
  }
};

}  // namespace

double brute_force_value(const PlanningProblem& problem, int s, const Belief& p, int horizon) {
  require(horizon >= 0, Errc::invalid_argument, "brute_force_value: horizon must be >= 0");
  require(p.size() == problem.M(), Errc::invalid_argument, "brute_force_value: belief size");
  require(s >= 0 && s < problem.n_views() + problem.M(), Errc::invalid_argument,
          "brute_force_value: state out of range");
  // Upper bound on the recursion size before doing any work.
  const double branching = static_cast<double>(problem.n_views()) * problem.Z();
  require(std::pow(branching, horizon) <= 1e7, Errc::resource_limit,
          "brute_force_value: instance too large for exhaustive search");
  if (s >= problem.n_views()) return 0.0;
  BruteForce bf{problem};
  return bf.value(s, p, horizon);
}

}  // namespace avp
