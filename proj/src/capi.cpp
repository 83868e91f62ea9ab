#include "avp/avp.h"

#include <cstring>
#include <string>

#include "avp/error.hpp"
#include "avp/pipeline.hpp"

struct avp_scenario {
  avp::Scenario scenario;
};

struct avp_artifacts {
  avp::LoadedArtifacts loaded;
};

namespace {

thread_local std::string last_error;

template <class Fn>
int guarded(Fn&& fn) {
  last_error.clear();
  try {
    fn();
    return AVP_OK;
  } catch (const avp::Error& e) {
    last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return AVP_E_UNKNOWN;
  } catch (...) {
    last_error = "unknown failure";
    return AVP_E_UNKNOWN;
  }
}

void need(const void* p, const char* what) {
  avp::require(p != nullptr, avp::Errc::invalid_argument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  avp::require(out != nullptr, avp::Errc::resource_limit, "out of memory");
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* avp_version(void) { return "1.0.0"; }

const char* avp_status_name(int status) {
  if (status == AVP_OK) return "ok";
  if (status == AVP_E_UNKNOWN) return "unknown";
  if (status >= 1 && status <= AVP_E_IO) return avp::to_string(static_cast<avp::Errc>(status));
  return "invalid-status";
}

const char* avp_last_error(void) { return last_error.c_str(); }

int avp_scenario_load(const char* config_path, avp_scenario** out) {
  return guarded([&] {
    need(config_path, "config_path");
    need(out, "out");
    *out = nullptr;
    auto* s = new avp_scenario{avp::Scenario::load(config_path)};
    *out = s;
  });
}

int avp_scenario_set_seed(avp_scenario* scenario, uint64_t seed) {
  return guarded([&] {
    need(scenario, "scenario");
    scenario->scenario.seed = seed;
  });
}

int avp_scenario_set_output_dir(avp_scenario* scenario, const char* dir) {
  return guarded([&] {
    need(scenario, "scenario");
    need(dir, "dir");
    avp::require(*dir != '\0', avp::Errc::invalid_argument, "output directory is empty");
    scenario->scenario.output_dir = dir;
  });
}

int avp_scenario_json(const avp_scenario* scenario, char** out_json) {
  return guarded([&] {
    need(scenario, "scenario");
    need(out_json, "out_json");
    *out_json = dup_string(scenario->scenario.to_json().dump(2));
  });
}

void avp_scenario_free(avp_scenario* scenario) { delete scenario; }

int avp_run_stage(const avp_scenario* scenario, const char* stage, int threads, avp_log_fn log,
                  void* user, char** summary_json) {
  return guarded([&] {
    need(scenario, "scenario");
    need(stage, "stage");
    avp::require(threads >= 0, avp::Errc::invalid_argument, "threads must be >= 0");
    avp::StageOptions opt;
    opt.threads = threads;
    if (log) opt.log = [log, user](const std::string& line) { log(line.c_str(), user); };
    const avp::Scenario& sc = scenario->scenario;
    const std::string name = stage;
    nlohmann::json summary;
    if (name == "train-vptree")
      summary = avp::run_train_vptree(sc, opt);
    else if (name == "build-obsmodel")
      summary = avp::run_build_obsmodel(sc, opt);
    else if (name == "derive-obsmodel")
      summary = avp::run_derive_obsmodel(sc, opt);
    else if (name == "solve")
      summary = avp::run_solve(sc, opt);
    else if (name == "bench")
      summary = avp::run_bench(sc, opt);
    else if (name == "orient-sweep")
      summary = avp::run_orient_sweep(sc, opt);
    else
      avp::fail(avp::Errc::invalid_argument, "unknown stage '" + name + "'");
    if (summary_json) *summary_json = dup_string(summary.dump(2));
  });
}

int avp_export_models(const avp_scenario* scenario, const char* dir) {
  return guarded([&] {
    need(scenario, "scenario");
    need(dir, "dir");
    avp::export_models(scenario->scenario.load_models(), dir);
  });
}

void avp_string_free(char* s) { std::free(s); }

int avp_artifacts_load(const avp_scenario* scenario, avp_artifacts** out) {
  return guarded([&] {
    need(scenario, "scenario");
    need(out, "out");
    *out = nullptr;
    *out = new avp_artifacts{avp::load_all(scenario->scenario)};
  });
}

void avp_artifacts_free(avp_artifacts* artifacts) { delete artifacts; }

int avp_artifacts_shape(const avp_artifacts* artifacts, int* n_views, int* n_hypotheses,
                        int* n_observations) {
  return guarded([&] {
    need(artifacts, "artifacts");
    const auto& p = artifacts->loaded.planning;
    if (n_views) *n_views = p.n_views();
    if (n_hypotheses) *n_hypotheses = p.M();
    if (n_observations) *n_observations = p.Z();
  });
}

int avp_hypothesis_label(const avp_artifacts* artifacts, int hypothesis, char** out) {
  return guarded([&] {
    need(artifacts, "artifacts");
    need(out, "out");
    const auto& hyps = artifacts->loaded.planning.hypotheses();
    avp::require(hypothesis >= 0 && hypothesis < hyps.size(), avp::Errc::invalid_argument,
                 "hypothesis out of range");
    *out = dup_string(hyps.label(hypothesis));
  });
}

int avp_bayes_update(const avp_artifacts* artifacts, const double* belief, int x, int z, int psi,
                     double* out) {
  return guarded([&] {
    need(artifacts, "artifacts");
    need(belief, "belief");
    need(out, "out");
    avp::require(psi >= 0 && psi < avp::kOcclusionStates, avp::Errc::invalid_argument,
                 "occlusion state out of range");
    const auto& p = artifacts->loaded.planning;
    const avp::Belief prior = Eigen::Map<const Eigen::VectorXd>(belief, p.M());
    avp::require(avp::is_valid_belief(prior), avp::Errc::invalid_argument,
                 "belief must be a probability vector");
    const avp::Belief post =
        avp::bayes_update(prior, x, z, static_cast<avp::OcclusionState>(psi), p);
    Eigen::Map<Eigen::VectorXd>(out, p.M()) = post;
  });
}

int avp_policy_action(const avp_artifacts* artifacts, int x, const double* belief, int* kind,
                      int* target) {
  return guarded([&] {
    need(artifacts, "artifacts");
    need(belief, "belief");
    need(kind, "kind");
    need(target, "target");
    const auto& a = artifacts->loaded;
    const avp::Belief p = Eigen::Map<const Eigen::VectorXd>(belief, a.problem.M());
    avp::require(avp::is_valid_belief(p), avp::Errc::invalid_argument,
                 "belief must be a probability vector");
    avp::require(x >= 0 && x < a.problem.n_views(), avp::Errc::invalid_argument,
                 "viewpoint out of range");
    const avp::Action act = avp::nvp_policy_action(a.alphas, x, p);
    *kind = act.kind == avp::Action::Move ? 0 : 1;
    *target = act.target;
  });
}

}  // extern "C"
