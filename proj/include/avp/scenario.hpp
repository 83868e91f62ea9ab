#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "avp/belief.hpp"
#include "avp/features.hpp"
#include "avp/harness.hpp"
#include "avp/obsmodel.hpp"
#include "avp/policies.hpp"
#include "avp/vptree.hpp"

namespace avp {

struct SphereSizes {
  int train = 48;     // full lattice
  int plan = 42;      // upper hemisphere
  int nominal = 128;  // full lattice
  double radius = 1.0;
  int neighbors = 6;
};

struct BenchmarkSettings {
  BenchmarkConfig config;
  double threshold = 0.6;
  int pool = 3;
};

/// Everything one experiment needs, loaded from a JSON config file. Unknown
/// keys are rejected so typos do not silently fall back to defaults.
struct Scenario {
  std::string name = "scenario";
  std::filesystem::path models_dir;  // empty: built-in models
  std::vector<std::string> interest;
  int yaw_bins = 6;
  int roll_bins = 1;
  DecisionCostParams costs;
  SphereSizes spheres;
  SensorConfig sensor;
  FeatureConfig features;
  VPTreeConfig vptree;
  NominalConfig nominal;
  SolverConfig solver;
  BenchmarkSettings bench;
  SweepConfig sweep;
  std::string sweep_target;  // defaults to the first interest model
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";

  void validate() const;
  nlohmann::json to_json() const;
  static Scenario from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static Scenario load(const std::filesystem::path& path);

  /// Model database (files from models_dir, or the built-in set).
  std::vector<ObjectModel> load_models() const;
  /// Database reordered so interest models occupy the first slots.
  std::vector<ObjectModel> models_by_slot(const std::vector<ObjectModel>& database) const;
  std::vector<int> interest_classes(const std::vector<ObjectModel>& database) const;
  HypothesisSet hypotheses(const std::vector<ObjectModel>& database) const;
};

}  // namespace avp
