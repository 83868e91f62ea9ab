#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <json.hpp>

#include "avp/hypotheses.hpp"
#include "avp/sensing.hpp"
#include "avp/vptree.hpp"

namespace avp {

/// Linear observation index, 1-based: viewpoint-resolved for interest model
/// slots, one bin per non-interest slot.
int observation_index(int l, int g, int G, int n_interest, int n_models);
int observation_count(int G, int n_interest, int n_models);

/// Simulated sensor shared by every stage.
struct SensorConfig {
  CameraSpec camera;
  double sigma = 0.001;
  OcclusionSpec occlusion;

  nlohmann::json to_json() const;
  static SensorConfig from_json(const nlohmann::json& j);
};

struct NominalConfig {
  int samples = 20;
  double alpha = 0.5;

  void validate() const;
};

/// Observation from one noisy, masked, feature-extracted view. Returns 0 when
/// the feature set is degenerate.
int simulate_observation(const PointCloud& render, const std::vector<HalfPlane>& mask,
                         const VPTree& tree, double sigma, std::mt19937_64& rng);

class NominalObsModel {
 public:
  struct Cell {
    std::vector<std::pair<int, double>> counts;  // (z, count), z ascending
    double uniform_mass = 0.0;                   // degenerate samples
    int samples = 0;
  };

  NominalObsModel() = default;

  const ViewGraph& views() const { return views_; }
  int n_models() const { return static_cast<int>(model_classes_.size()); }
  const std::vector<int>& model_classes() const { return model_classes_; }
  int G() const { return G_; }
  int n_interest() const { return n_interest_; }
  int Z() const { return Z_; }
  double alpha() const { return alpha_; }

  /// Cell for viewpoint v (0-based id), model slot l (1-based) and state psi.
  const Cell& cell(int v, int l, OcclusionState psi) const;
  /// Smoothed probability vector over z = 1..Z (stored at [z-1]).
  Eigen::VectorXd row(int v, int l, OcclusionState psi) const;
  /// Counts re-expressed as a dense vector (degenerate mass spread evenly).
  Eigen::VectorXd raw_counts(int v, int l, OcclusionState psi) const;

  const nlohmann::json& provenance() const { return provenance_; }
  nlohmann::json to_json() const;
  static NominalObsModel from_json(const nlohmann::json& j);
  std::uint64_t hash() const;

  friend NominalObsModel build_nominal_model(const std::vector<ObjectModel>&, const ViewGraph&,
                                             const VPTree&, const SensorConfig&,
                                             const NominalConfig&, std::uint64_t, int,
                                             nlohmann::json);

 private:
  std::size_t cell_index(int v, int l, OcclusionState psi) const;

  ViewGraph views_;
  std::vector<int> model_classes_;
  int G_ = 0, n_interest_ = 0, Z_ = 0;
  double alpha_ = 0.5;
  int samples_ = 0;
  std::vector<Cell> cells_;
  nlohmann::json provenance_;
};

/// `models_by_slot[l-1]` must be the model of tree slot l.
NominalObsModel build_nominal_model(const std::vector<ObjectModel>& models_by_slot,
                                    const ViewGraph& fine, const VPTree& tree,
                                    const SensorConfig& sensor, const NominalConfig& config,
                                    std::uint64_t seed, int threads,
                                    nlohmann::json provenance = {});

class PlanningObsModel {
 public:
  /// Nominal cell a planning row was copied from.
  struct Ref {
    int v;
    int l;
    OcclusionState psi;
  };

  PlanningObsModel() = default;

  const ViewGraph& graph() const { return graph_; }
  const HypothesisSet& hypotheses() const { return hyps_; }
  const NominalObsModel& nominal() const { return nominal_; }
  int n_views() const { return static_cast<int>(graph_.size()); }
  int M() const { return hyps_.size(); }
  int Z() const { return nominal_.Z(); }

  /// h_z(x, hyp, psi); z is 1-based.
  double likelihood(int z, int x, int hyp, OcclusionState psi) const;
  /// Pointer to the Z probabilities of row (x, hyp, psi).
  const double* row(int x, int hyp, OcclusionState psi) const;
  const std::vector<Ref>& refs(int x, int hyp, OcclusionState psi) const;
  /// M x Z likelihood matrix at viewpoint x for state psi.
  Eigen::MatrixXd matrix(int x, OcclusionState psi) const;

  nlohmann::json to_json() const;
  static PlanningObsModel from_json(const nlohmann::json& j);
  std::uint64_t hash() const;

  friend PlanningObsModel derive_planning_model(const NominalObsModel&, const ViewGraph&,
                                                const HypothesisSet&,
                                                const std::vector<ObjectModel>&,
                                                const SensorConfig&);

 private:
  std::size_t row_index(int x, int hyp, OcclusionState psi) const;
  void materialize();

  ViewGraph graph_;
  HypothesisSet hyps_;
  NominalObsModel nominal_;
  std::vector<std::vector<Ref>> refs_;
  std::vector<double> table_;
};

/// Maps the nominal model onto planning viewpoints and hypotheses.
PlanningObsModel derive_planning_model(const NominalObsModel& nominal, const ViewGraph& planning,
                                       const HypothesisSet& hyps,
                                       const std::vector<ObjectModel>& models_by_slot,
                                       const SensorConfig& sensor);

}  // namespace avp
