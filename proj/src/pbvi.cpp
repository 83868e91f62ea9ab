#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <unordered_set>

#include "avp/error.hpp"
#include "avp/parallel.hpp"
#include "avp/policies.hpp"
#include "avp/serialize.hpp"

namespace avp {

using nlohmann::json;

json SolverConfig::to_json() const {
  return {{"belief_points", belief_points}, {"max_iters", max_iters},
          {"epsilon", epsilon},             {"horizon_cap", horizon_cap},
          {"rollout_depth", rollout_depth}};
}

SolverConfig SolverConfig::from_json(const json& j) {
  reject_unknown(j, {"belief_points", "max_iters", "epsilon", "horizon_cap", "rollout_depth"},
                 "solver");
  SolverConfig c;
  c.belief_points = j.value("belief_points", c.belief_points);
  c.max_iters = j.value("max_iters", c.max_iters);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.horizon_cap = j.value("horizon_cap", c.horizon_cap);
  c.rollout_depth = j.value("rollout_depth", c.rollout_depth);
  require(c.belief_points >= 1 && c.max_iters >= 1 && c.epsilon > 0 && c.horizon_cap >= 0 &&
              c.rollout_depth >= 1,
          Errc::invalid_argument, "solver config out of range");
  return c;
}

const std::vector<AlphaVector>& AlphaSet::at(int x, int steps_remaining) const {
  require(x >= 0 && x < n_views, Errc::invalid_argument, "alpha set: state out of range");
  require(!stages.empty(), Errc::invalid_argument, "alpha set is empty");
  if (stationary) return stages[0][x];
  const int k = steps_remaining < 0 ? horizon() : std::min(steps_remaining, horizon());
  return stages[k][x];
}

double AlphaSet::value(int s, const Belief& p, int steps_remaining) const {
  require(p.size() == M, Errc::invalid_argument, "alpha set: belief size mismatch");
  if (s >= n_views && s < n_views + M) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : at(s, steps_remaining)) best = std::min(best, a.values.dot(p));
  return best;
}

json AlphaSet::to_json() const {
  json j;
  j["n_views"] = n_views;
  j["M"] = M;
  j["stationary"] = stationary;
  j["converged"] = converged;
  j["iterations"] = iterations;
  j["residual"] = residual;
  j["instance_hash"] = hex(instance_hash);
  json stages_j = json::array();
  for (const auto& stage : stages) {
    json xs = json::array();
    for (const auto& set : stage) {
      json as = json::array();
      for (const auto& a : set) {
        as.push_back({{"kind", a.action.kind == Action::Move ? "move" : "decide"},
                      {"target", a.action.target},
                      {"values", std::vector<double>(a.values.data(),
                                                     a.values.data() + a.values.size())}});
      }
      xs.push_back(std::move(as));
    }
    stages_j.push_back(std::move(xs));
  }
  j["stages"] = std::move(stages_j);
  return j;
}

AlphaSet AlphaSet::from_json(const json& j) {
  AlphaSet a;
  a.n_views = j.at("n_views").get<int>();
  a.M = j.at("M").get<int>();
  a.stationary = j.at("stationary").get<bool>();
  a.converged = j.at("converged").get<bool>();
  a.iterations = j.at("iterations").get<int>();
  a.residual = j.at("residual").get<double>();
  a.instance_hash = std::stoull(j.at("instance_hash").get<std::string>(), nullptr, 16);
  for (const auto& stage : j.at("stages")) {
    std::vector<std::vector<AlphaVector>> xs;
    for (const auto& set : stage) {
      std::vector<AlphaVector> as;
      for (const auto& e : set) {
        const auto vals = e.at("values").get<std::vector<double>>();
        require(static_cast<int>(vals.size()) == a.M, Errc::io, "alpha set: bad vector size");
        AlphaVector av;
        av.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), a.M);
        const std::string kind = e.at("kind").get<std::string>();
        av.action = kind == "move" ? Action::move(e.at("target").get<int>())
                                   : Action::decide(e.at("target").get<int>());
        as.push_back(std::move(av));
      }
      xs.push_back(std::move(as));
    }
    require(static_cast<int>(xs.size()) == a.n_views, Errc::io, "alpha set: bad stage size");
    a.stages.push_back(std::move(xs));
  }
  require(!a.stages.empty(), Errc::io, "alpha set: no stages");
  return a;
}

std::vector<Belief> sample_beliefs(const PlanningProblem& problem, int count, int depth,
                                   std::uint64_t seed) {
  const int M = problem.M();
  std::vector<Belief> out;
  out.push_back(uniform_belief(M));
  for (int h = 0; h < M; ++h) out.push_back(Belief::Unit(M, h));
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::uniform_int_distribution<int> view(0, problem.n_views() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](const Eigen::VectorXd& weights) {
    const double u = unit(rng) * weights.sum();
    double acc = 0.0;
    for (int i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return static_cast<int>(weights.size()) - 1;
  };
  int episode = 0;
  while (static_cast<int>(out.size()) < count) {
    Belief b;
    if (episode++ % 2 == 0) {
      b = uniform_belief(M);
    } else {
      b.resize(M);
      for (int h = 0; h < M; ++h) b[h] = gamma(rng);
      b /= b.sum();
      out.push_back(b);
    }
    for (int d = 0; d < depth && static_cast<int>(out.size()) < count; ++d) {
      const int x = view(rng);
      const int h = draw(b);
      const int z = draw(problem.obs[x].row(h).transpose());
      b = bayes_update(b, problem.obs[x].col(z));
      out.push_back(b);
    }
  }
  out.resize(std::min<std::size_t>(out.size(), std::max(count, 1)));
  return out;
}

namespace {

struct Backup {
  const PlanningProblem& problem;
  std::vector<Eigen::VectorXd> decide;  // lambda * J_D rows

  explicit Backup(const PlanningProblem& p) : problem(p) {
    for (int a = 0; a < p.M(); ++a)
      decide.push_back(p.costs.lambda * p.costs.decision.row(a).transpose());
  }

  std::vector<AlphaVector> decide_alphas() const {
    std::vector<AlphaVector> out;
    for (int a = 0; a < problem.M(); ++a) out.push_back({decide[a], Action::decide(a)});
    return out;
  }

  // One Bellman backup of `prev` at every belief. out[b][x] is the new alpha
  // at state x; vals[b][x] its value at belief b.
  void run(const std::vector<std::vector<AlphaVector>>& prev, const std::vector<Belief>& beliefs,
           int threads, std::vector<std::vector<AlphaVector>>& out,
           std::vector<std::vector<double>>& vals) const {
    const int X = problem.n_views(), M = problem.M(), Zn = problem.Z();
    std::vector<Eigen::MatrixXd> stacked(X);
    for (int x = 0; x < X; ++x) {
      stacked[x].resize(prev[x].size(), M);
      for (std::size_t i = 0; i < prev[x].size(); ++i) stacked[x].row(i) = prev[x][i].values;
    }
    out.assign(beliefs.size(), {});
    vals.assign(beliefs.size(), {});
    parallel_for(beliefs.size(), threads, [&](std::size_t bi) {
      const Belief& b = beliefs[bi];
      std::vector<Eigen::VectorXd> beta(X);
      Eigen::VectorXd beta_value(X);
      for (int nx = 0; nx < X; ++nx) {
        const Eigen::MatrixXd& o = problem.obs[nx];
        const Eigen::MatrixXd w = b.asDiagonal() * o;  // M x Z
        const Eigen::MatrixXd scores = stacked[nx] * w;  // |G| x Z
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(M);
        for (int z = 0; z < Zn; ++z) {
          Eigen::Index best;
          scores.col(z).minCoeff(&best);
          acc += o.col(z).cwiseProduct(stacked[nx].row(best).transpose());
        }
        beta[nx] = std::move(acc);
        beta_value[nx] = beta[nx].dot(b);
      }
      std::vector<double> decide_value(M);
      for (int a = 0; a < M; ++a) decide_value[a] = decide[a].dot(b);

      out[bi].resize(X);
      vals[bi].resize(X);
      for (int x = 0; x < X; ++x) {
        int best_action = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int nx = 0; nx < X; ++nx) {
          const double v = problem.move_cost(x, nx) + beta_value[nx];
          if (v < best) {
            best = v;
            best_action = nx;
          }
        }
        for (int a = 0; a < M; ++a) {
          if (decide_value[a] < best) {
            best = decide_value[a];
            best_action = X + a;
          }
        }
        // Keep the previous alpha when the backup is no better here, so the
        // values at the sampled beliefs never increase.
        Eigen::Index keep;
        const double prev_best = (stacked[x] * b).minCoeff(&keep);
        if (prev_best <= best) {
          out[bi][x] = prev[x][keep];
          vals[bi][x] = prev_best;
          continue;
        }
        if (best_action < X) {
          out[bi][x] = {beta[best_action].array() + problem.move_cost(x, best_action),
                        Action::move(best_action)};
        } else {
          out[bi][x] = {decide[best_action - X], Action::decide(best_action - X)};
        }
        vals[bi][x] = best;
      }
    });
  }

  // Decision alphas plus the distinct backed-up alphas, in belief order.
  std::vector<std::vector<AlphaVector>> collect(
      const std::vector<std::vector<AlphaVector>>& backed) const {
    const int X = problem.n_views();
    std::vector<std::vector<AlphaVector>> sets(X, decide_alphas());
    for (int x = 0; x < X; ++x) {
      std::unordered_set<std::string> seen;
      for (const auto& a : sets[x]) seen.insert(key(a));
      for (const auto& per_belief : backed) {
        const AlphaVector& a = per_belief[x];
        if (seen.insert(key(a)).second) sets[x].push_back(a);
      }
    }
    return sets;
  }

  static std::string key(const AlphaVector& a) {
    std::string k(reinterpret_cast<const char*>(a.values.data()), a.values.size() * sizeof(double));
    k += static_cast<char>(a.action.kind);
    k.append(reinterpret_cast<const char*>(&a.action.target), sizeof(int));
    return k;
  }
};

}  // namespace

AlphaSet nvp_solve(const PlanningProblem& problem, const SolverConfig& config, std::uint64_t seed,
                   int threads) {
  problem.validate();
  require(config.belief_points >= 1 && config.max_iters >= 1 && config.epsilon > 0.0,
          Errc::invalid_argument, "nvp_solve: bad solver config");
  const std::vector<Belief> beliefs =
      sample_beliefs(problem, config.belief_points, config.rollout_depth, seed);
  Backup backup(problem);

  AlphaSet result;
  result.n_views = problem.n_views();
  result.M = problem.M();
  result.instance_hash = problem.hash();
  std::vector<std::vector<AlphaVector>> current(problem.n_views(), backup.decide_alphas());

  std::vector<std::vector<AlphaVector>> backed;
  std::vector<std::vector<double>> vals;

  if (config.horizon_cap > 0) {
    result.stationary = false;
    result.stages.push_back(current);
    for (int k = 1; k <= config.horizon_cap; ++k) {
      backup.run(current, beliefs, threads, backed, vals);
      current = backup.collect(backed);
      result.stages.push_back(current);
    }
    result.converged = true;
    result.iterations = config.horizon_cap;
    return result;
  }

  result.stationary = true;
  std::vector<std::vector<double>> old_vals;
  for (int it = 1; it <= config.max_iters; ++it) {
    backup.run(current, beliefs, threads, backed, vals);
    current = backup.collect(backed);
    double change = 0.0;
    if (!old_vals.empty()) {
      for (std::size_t b = 0; b < vals.size(); ++b)
        for (std::size_t x = 0; x < vals[b].size(); ++x)
          change = std::max(change, std::abs(vals[b][x] - old_vals[b][x]));
    } else {
      change = std::numeric_limits<double>::infinity();
    }
    old_vals = vals;
    result.iterations = it;
    result.residual = change;
    if (change < config.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.stages.push_back(std::move(current));
  return result;
}

Action nvp_policy_action(const AlphaSet& alphas, int s, const Belief& p, int steps_remaining,
                         const std::vector<char>* blocked) {
  require(p.size() == alphas.M, Errc::invalid_argument, "nvp_policy_action: belief size mismatch");
  require(s >= 0 && s < alphas.n_views + alphas.M, Errc::invalid_argument,
          "nvp_policy_action: state out of range");
  if (s >= alphas.n_views) return Action::decide(s - alphas.n_views);
  const auto& set = alphas.at(s, steps_remaining);
  require(!set.empty(), Errc::invalid_argument, "nvp_policy_action: empty alpha set");
  require(blocked == nullptr || blocked->empty() ||
              static_cast<int>(blocked->size()) == alphas.n_views,
          Errc::invalid_argument, "nvp_policy_action: blocked mask size mismatch");
  const AlphaVector* best = nullptr;
  double best_value = 0.0;
  for (const auto& a : set) {
    if (blocked && !blocked->empty() && a.action.kind == Action::Move && (*blocked)[a.action.target])
      continue;
    const double v = a.values.dot(p);
    if (best == nullptr) {
      best = &a;
      best_value = v;
      continue;
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(best_value));
    if (v < best_value - tol ||
        (std::abs(v - best_value) <= tol &&
         a.action.index(alphas.n_views) < best->action.index(alphas.n_views))) {
      best = &a;
      best_value = std::min(v, best_value);
    }
  }
  // Decision alphas are never skipped, so something always survives.
  require(best != nullptr, Errc::internal_consistency, "nvp_policy_action: no admissible alpha");
  return best->action;
}

NvpPolicy::NvpPolicy(const PlanningProblem& problem, const AlphaSet& alphas) : alphas_(alphas) {
  require(alphas.n_views == problem.n_views() && alphas.M == problem.M(),
          Errc::invalid_argument, "nvp policy: alpha set does not match the problem");
  require(alphas.instance_hash == problem.hash(), Errc::hash_mismatch,
          "nvp policy: alpha set was solved for a different instance");
}

Action NvpPolicy::act(const PolicyState& state, std::mt19937_64&) const {
  const int remaining =
      alphas_.stationary ? -1 : std::max(0, alphas_.horizon() - state.steps);
  // Repeating a view in a static scene returns nearly the same measurement,
  // which the conditionally independent model would count as new evidence.
  return nvp_policy_action(alphas_, state.current, state.belief, remaining, &state.visited);
}

}  // namespace avp
