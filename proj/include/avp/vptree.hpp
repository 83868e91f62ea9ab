#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "avp/features.hpp"

namespace avp {

/// Template key: training viewpoint g in 1..G and model slot l in 1..|D|.
/// Interest models occupy the lowest l.
struct TemplateId {
  int g = 1;
  int l = 1;

  friend bool operator==(const TemplateId& a, const TemplateId& b) {
    return a.g == b.g && a.l == b.l;
  }
  friend bool operator<(const TemplateId& a, const TemplateId& b) {
    return a.l != b.l ? a.l < b.l : a.g < b.g;
  }
};

/// Sparse vector over node ids, sorted by id.
using SparseVec = std::vector<std::pair<int, double>>;

struct VocabNode {
  Descriptor center = Descriptor::Zero();
  std::vector<int> children;
  int level = 0;
  int eta = 0;          // templates with at least one feature through the node
  double weight = 0.0;  // ln(|T| / eta)
};

struct VPTreeConfig {
  int max_levels = 4;
  int kmeans_iters = 10;

  void validate() const;
};

struct TrainingTemplate {
  TemplateId id;
  FeatureSet features;
};

/// Relevance score: L1 distance between the L1-normalised arguments, in [0, 2].
/// Throws invalid_argument if either has zero L1 norm.
double score(const SparseVec& q, const SparseVec& d);

class VPTree {
 public:
  struct Match {
    TemplateId id;
    double score;
  };

  /// `model_classes[l-1]` is the class id of model slot l; the first
  /// `n_interest` slots are the interest models.
  static VPTree train(const std::vector<TrainingTemplate>& templates,
                      std::vector<int> model_classes, int n_interest, int G,
                      const VPTreeConfig& config, const FeatureConfig& features,
                      std::uint64_t seed);

  /// Weighted visit counts q_i = n_i w_i.
  SparseVec describe_query(const FeatureSet& fs) const;
  /// Every template, ascending score, ties by (l, g).
  std::vector<Match> query(const FeatureSet& fs) const;
  TemplateId best_match(const FeatureSet& fs) const;

  int G() const { return G_; }
  int n_models() const { return static_cast<int>(model_classes_.size()); }
  int n_interest() const { return n_interest_; }
  const std::vector<int>& model_classes() const { return model_classes_; }
  /// Slot l (1-based) of a class id; throws if the class is not in the tree.
  int slot_of_class(int class_id) const;
  const std::vector<VocabNode>& nodes() const { return nodes_; }
  int depth() const;
  const std::vector<TemplateId>& template_ids() const { return template_ids_; }
  const std::vector<SparseVec>& template_descriptors() const { return template_desc_; }
  const FeatureConfig& feature_config() const { return features_; }
  const VPTreeConfig& config() const { return config_; }

  nlohmann::json to_json() const;
  static VPTree from_json(const nlohmann::json& j);
  std::uint64_t hash() const;

 private:
  // Per-node raw visit counts for a feature list.
  std::vector<std::pair<int, int>> path_counts(const std::vector<Descriptor>& fs) const;
  int descend(const Descriptor& f, std::vector<int>* path) const;

  std::vector<VocabNode> nodes_;
  std::vector<TemplateId> template_ids_;
  std::vector<SparseVec> template_desc_;
  std::vector<int> model_classes_;
  int n_interest_ = 0;
  int G_ = 0;
  VPTreeConfig config_;
  FeatureConfig features_;
  std::uint64_t seed_ = 0;
};

}  // namespace avp
