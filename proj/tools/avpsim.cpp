// Command-line driver. Uses only the C interface.
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "avp/avp.h"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out;
  bool quiet = false;
};

void print_line(const char* line, void*) { std::fprintf(stderr, "  %s\n", line); }

int report(int status, const char* what) {
  if (status != AVP_OK)
    std::fprintf(stderr, "avpsim: %s failed (%s): %s\n", what, avp_status_name(status),
                 avp_last_error());
  return status;
}

int run(const std::string& stage, const Options& opt) {
  avp_scenario* sc = nullptr;
  int status = avp_scenario_load(opt.config.c_str(), &sc);
  if (status != AVP_OK) return report(status, "loading the config");
  if (opt.seed) status = avp_scenario_set_seed(sc, *opt.seed);
  if (status == AVP_OK && !opt.out.empty()) status = avp_scenario_set_output_dir(sc, opt.out.c_str());
  if (status == AVP_OK) {
    if (stage == "export-models") {
      status = avp_export_models(sc, opt.out.empty() ? "models" : opt.out.c_str());
    } else {
      char* summary = nullptr;
      status = avp_run_stage(sc, stage.c_str(), opt.threads, opt.quiet ? nullptr : print_line,
                             nullptr, &summary);
      if (status == AVP_OK && summary) std::printf("%s\n", summary);
      avp_string_free(summary);
    }
  }
  avp_scenario_free(sc);
  return report(status, stage.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active view planning simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", avp_version());

  Options opt;
  const std::pair<const char*, const char*> stages[] = {
      {"train-vptree", "Render training templates and train the detector"},
      {"build-obsmodel", "Simulate the nominal observation model"},
      {"derive-obsmodel", "Map the nominal model onto planning viewpoints and hypotheses"},
      {"solve", "Solve the nonmyopic planning problem"},
      {"bench", "Run the policy comparison benchmark"},
      {"orient-sweep", "Run the orientation accuracy sweep"},
      {"export-models", "Write the model database as .tri files (--out is the directory)"},
  };
  std::string chosen;
  for (const auto& [name, help] : stages) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", opt.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Override the scenario seed");
    sub->add_option("--threads", opt.threads, "Worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out", opt.out, "Override the output directory");
    sub->add_flag("-q,--quiet", opt.quiet, "No progress output");
    sub->callback([&chosen, n = std::string(name)] { chosen = n; });
  }
  CLI11_PARSE(app, argc, argv);
  return run(chosen, opt);
}
