#include "avp/vptree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>

#include "avp/error.hpp"
#include "avp/serialize.hpp"

namespace avp {

using nlohmann::json;

void VPTreeConfig::validate() const {
  require(max_levels >= 1, Errc::invalid_argument, "vptree: max_levels must be >= 1");
  require(kmeans_iters >= 0, Errc::invalid_argument, "vptree: kmeans_iters must be >= 0");
}

namespace {

double l1(const SparseVec& v) {
  double s = 0.0;
  for (const auto& [id, x] : v) s += std::abs(x);
  return s;
}

// L1 distance of normalised vectors; a zero vector normalises to zero.
double normalized_l1(const SparseVec& q, double nq, const SparseVec& d, double nd) {
  const double iq = nq > 0 ? 1.0 / nq : 0.0;
  const double id = nd > 0 ? 1.0 / nd : 0.0;
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < q.size() || j < d.size()) {
    if (j == d.size() || (i < q.size() && q[i].first < d[j].first)) {
      s += std::abs(q[i++].second * iq);
    } else if (i == q.size() || d[j].first < q[i].first) {
      s += std::abs(d[j++].second * id);
    } else {
      s += std::abs(q[i++].second * iq - d[j++].second * id);
    }
  }
  return s;
}

int nearest_center(const Descriptor& f, const std::vector<Descriptor>& centers) {
  int best = 0;
  double best_d = (f - centers[0]).squaredNorm();
  for (std::size_t k = 1; k < centers.size(); ++k) {
    const double d = (f - centers[k]).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

SparseVec weighted(const std::vector<std::pair<int, int>>& counts,
                   const std::vector<VocabNode>& nodes) {
  SparseVec v;
  for (const auto& [id, n] : counts) {
    const double w = n * nodes[id].weight;
    if (w != 0.0) v.emplace_back(id, w);
  }
  return v;
}

}  // namespace

double score(const SparseVec& q, const SparseVec& d) {
  const double nq = l1(q), nd = l1(d);
  require(nq > 0.0 && nd > 0.0, Errc::invalid_argument, "score: zero-norm descriptor");
  return normalized_l1(q, nq, d, nd);
}

VPTree VPTree::train(const std::vector<TrainingTemplate>& templates,
                     std::vector<int> model_classes, int n_interest, int G,
                     const VPTreeConfig& config, const FeatureConfig& features,
                     std::uint64_t seed) {
  config.validate();
  const int D = static_cast<int>(model_classes.size());
  require(D >= 2, Errc::training_input, "vptree: need at least two models");
  require(n_interest >= 1 && n_interest <= D, Errc::training_input,
          "vptree: interest count out of range");
  require(G >= 1, Errc::training_input, "vptree: G must be >= 1");
  require(!templates.empty(), Errc::training_input, "vptree: no templates");

  VPTree tree;
  tree.model_classes_ = std::move(model_classes);
  tree.n_interest_ = n_interest;
  tree.G_ = G;
  tree.config_ = config;
  tree.features_ = features;
  tree.seed_ = seed;

  // Flatten features; remember their model slot.
  std::vector<const Descriptor*> feats;
  std::vector<int> slot;
  std::vector<TrainingTemplate const*> ordered;
  for (const auto& t : templates) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(),
            [](const TrainingTemplate* a, const TrainingTemplate* b) { return a->id < b->id; });
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const auto& t = *ordered[i];
    const std::string name = "template (g=" + std::to_string(t.id.g) +
                             ", l=" + std::to_string(t.id.l) + ")";
    require(t.id.g >= 1 && t.id.g <= G && t.id.l >= 1 && t.id.l <= D, Errc::training_input,
            name + " is out of range");
    require(i == 0 || !(ordered[i - 1]->id == t.id), Errc::training_input,
            name + " appears twice");
    require(!t.features.degenerate && !t.features.descriptors.empty(), Errc::training_input,
            name + " has a degenerate feature set");
    for (const auto& d : t.features.descriptors) {
      feats.push_back(&d);
      slot.push_back(t.id.l);
    }
  }

  // Level-order construction.
  std::vector<int> all(feats.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  VocabNode root;
  for (const auto* f : feats) root.center += *f;
  root.center /= static_cast<double>(feats.size());
  tree.nodes_.push_back(root);

  std::deque<std::pair<int, std::vector<int>>> work;
  work.emplace_back(0, std::move(all));
  while (!work.empty()) {
    auto [node, members] = std::move(work.front());
    work.pop_front();
    const int level = tree.nodes_[node].level;
    if (level >= config.max_levels || static_cast<int>(members.size()) < 2 * D) continue;

    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(node)));
    std::vector<std::vector<int>> by_slot(D + 1);
    for (int m : members) by_slot[slot[m]].push_back(m);
    std::vector<Descriptor> centers;
    for (int l = 1; l <= D; ++l) {
      const auto& pool = by_slot[l].empty() ? members : by_slot[l];
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      centers.push_back(*feats[pool[pick(rng)]]);
    }

    std::vector<int> assign(members.size());
    for (int it = 0; it < config.kmeans_iters; ++it) {
      for (std::size_t i = 0; i < members.size(); ++i)
        assign[i] = nearest_center(*feats[members[i]], centers);
      std::vector<Descriptor> sum(D, Descriptor::Zero());
      std::vector<int> count(D, 0);
      for (std::size_t i = 0; i < members.size(); ++i) {
        sum[assign[i]] += *feats[members[i]];
        ++count[assign[i]];
      }
      for (int k = 0; k < D; ++k)
        if (count[k] > 0) centers[k] = sum[k] / count[k];
    }
    std::vector<std::vector<int>> cells(D);
    for (int m : members) cells[nearest_center(*feats[m], centers)].push_back(m);

    for (int k = 0; k < D; ++k) {
      if (cells[k].empty()) continue;
      VocabNode child;
      child.center = centers[k];
      child.level = level + 1;
      const int id = static_cast<int>(tree.nodes_.size());
      tree.nodes_.push_back(child);
      tree.nodes_[node].children.push_back(id);
      work.emplace_back(id, std::move(cells[k]));
    }
  }

  // eta and weights.
  std::vector<std::vector<std::pair<int, int>>> counts;
  for (const auto* t : ordered) {
    counts.push_back(tree.path_counts(t->features.descriptors));
    for (const auto& [id, n] : counts.back()) ++tree.nodes_[id].eta;
  }
  const double T = static_cast<double>(ordered.size());
  for (auto& n : tree.nodes_) n.weight = n.eta > 0 ? std::log(T / n.eta) : 0.0;

  for (std::size_t i = 0; i < ordered.size(); ++i) {
    tree.template_ids_.push_back(ordered[i]->id);
    tree.template_desc_.push_back(weighted(counts[i], tree.nodes_));
  }
  return tree;
}

int VPTree::descend(const Descriptor& f, std::vector<int>* path) const {
  int node = 0;
  if (path) path->push_back(0);
  while (!nodes_[node].children.empty()) {
    const auto& ch = nodes_[node].children;
    int best = ch[0];
    double best_d = (f - nodes_[best].center).squaredNorm();
    for (std::size_t k = 1; k < ch.size(); ++k) {
      const double d = (f - nodes_[ch[k]].center).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = ch[k];
      }
    }
    node = best;
    if (path) path->push_back(node);
  }
  return node;
}

std::vector<std::pair<int, int>> VPTree::path_counts(const std::vector<Descriptor>& fs) const {
  std::map<int, int> counts;
  std::vector<int> path;
  for (const auto& f : fs) {
    path.clear();
    descend(f, &path);
    for (int id : path) ++counts[id];
  }
  return {counts.begin(), counts.end()};
}

SparseVec VPTree::describe_query(const FeatureSet& fs) const {
  require(!fs.degenerate && !fs.descriptors.empty(), Errc::degenerate_input,
          "describe_query: degenerate feature set");
  return weighted(path_counts(fs.descriptors), nodes_);
}

std::vector<VPTree::Match> VPTree::query(const FeatureSet& fs) const {
  const SparseVec q = describe_query(fs);
  const double nq = l1(q);
  std::vector<Match> out;
  out.reserve(template_ids_.size());
  for (std::size_t i = 0; i < template_ids_.size(); ++i) {
    out.push_back({template_ids_[i],
                   normalized_l1(q, nq, template_desc_[i], l1(template_desc_[i]))});
  }
  std::stable_sort(out.begin(), out.end(), [](const Match& a, const Match& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.id < b.id;
  });
  return out;
}

TemplateId VPTree::best_match(const FeatureSet& fs) const { return query(fs).front().id; }

int VPTree::slot_of_class(int class_id) const {
  for (std::size_t i = 0; i < model_classes_.size(); ++i)
    if (model_classes_[i] == class_id) return static_cast<int>(i) + 1;
  fail(Errc::invalid_argument, "class " + std::to_string(class_id) + " is not in the tree");
}

int VPTree::depth() const {
  int d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.level);
  return d;
}

json VPTree::to_json() const {
  json j;
  j["G"] = G_;
  j["n_interest"] = n_interest_;
  j["model_classes"] = model_classes_;
  j["max_levels"] = config_.max_levels;
  j["kmeans_iters"] = config_.kmeans_iters;
  j["seed"] = seed_;
  j["features"] = features_.to_json();
  json nodes = json::array();
  for (const auto& n : nodes_) {
    nodes.push_back({{"center", std::vector<double>(n.center.data(), n.center.data() + n.center.size())},
                     {"children", n.children},
                     {"level", n.level},
                     {"eta", n.eta},
                     {"weight", n.weight}});
  }
  j["nodes"] = std::move(nodes);
  json tmpl = json::array();
  for (std::size_t i = 0; i < template_ids_.size(); ++i) {
    json ids = json::array(), vals = json::array();
    for (const auto& [id, v] : template_desc_[i]) {
      ids.push_back(id);
      vals.push_back(v);
    }
    tmpl.push_back({{"g", template_ids_[i].g},
                    {"l", template_ids_[i].l},
                    {"nodes", std::move(ids)},
                    {"values", std::move(vals)}});
  }
  j["templates"] = std::move(tmpl);
  return j;
}

VPTree VPTree::from_json(const json& j) {
  VPTree t;
  t.G_ = j.at("G").get<int>();
  t.n_interest_ = j.at("n_interest").get<int>();
  t.model_classes_ = j.at("model_classes").get<std::vector<int>>();
  t.config_.max_levels = j.at("max_levels").get<int>();
  t.config_.kmeans_iters = j.at("kmeans_iters").get<int>();
  t.seed_ = j.at("seed").get<std::uint64_t>();
  t.features_ = FeatureConfig::from_json(j.at("features"));
  for (const auto& n : j.at("nodes")) {
    VocabNode node;
    const auto c = n.at("center").get<std::vector<double>>();
    require(c.size() == static_cast<std::size_t>(kDescriptorDim), Errc::io,
            "vptree: bad center dimension");
    for (int k = 0; k < kDescriptorDim; ++k) node.center[k] = c[k];
    node.children = n.at("children").get<std::vector<int>>();
    node.level = n.at("level").get<int>();
    node.eta = n.at("eta").get<int>();
    node.weight = n.at("weight").get<double>();
    t.nodes_.push_back(std::move(node));
  }
  for (const auto& n : t.nodes_)
    for (int c : n.children)
      require(c > 0 && c < static_cast<int>(t.nodes_.size()), Errc::io,
              "vptree: child index out of range");
  for (const auto& e : j.at("templates")) {
    t.template_ids_.push_back({e.at("g").get<int>(), e.at("l").get<int>()});
    const auto ids = e.at("nodes").get<std::vector<int>>();
    const auto vals = e.at("values").get<std::vector<double>>();
    require(ids.size() == vals.size(), Errc::io, "vptree: template vector size mismatch");
    SparseVec v;
    for (std::size_t k = 0; k < ids.size(); ++k) v.emplace_back(ids[k], vals[k]);
    t.template_desc_.push_back(std::move(v));
  }
  require(!t.nodes_.empty() && !t.template_ids_.empty(), Errc::io, "vptree: empty tree");
  return t;
}

std::uint64_t VPTree::hash() const { return hash_json(to_json()); }

}  // namespace avp
