#include "avp/obsmodel.hpp"

#include <map>

#include "avp/error.hpp"
#include "avp/parallel.hpp"
#include "avp/serialize.hpp"

namespace avp {

using nlohmann::json;

int observation_count(int G, int n_interest, int n_models) {
  require(G >= 1 && n_interest >= 1 && n_interest <= n_models, Errc::invalid_argument,
          "observation_count: bad dimensions");
  return G * n_interest + (n_models - n_interest);
}

int observation_index(int l, int g, int G, int n_interest, int n_models) {
  require(G >= 1 && n_interest >= 0 && n_interest <= n_models, Errc::invalid_argument,
          "observation_index: bad dimensions");
  require(l >= 1 && l <= n_models, Errc::invalid_argument,
          "observation_index: model index out of range");
  require(g >= 1 && g <= G, Errc::invalid_argument,
          "observation_index: viewpoint index out of range");
  if (l <= n_interest) return (l - 1) * G + g;
  return G * n_interest + (l - n_interest);
}

json SensorConfig::to_json() const {
  return {{"width", camera.width},
          {"height", camera.height},
          {"fov_y_deg", camera.fov_y * 180.0 / M_PI},
          {"sigma", sigma},
          {"epsilon", occlusion.epsilon},
          {"min_points", occlusion.min_points}};
}

SensorConfig SensorConfig::from_json(const json& j) {
  reject_unknown(j, {"width", "height", "fov_y_deg", "sigma", "epsilon", "min_points"}, "sensor");
  SensorConfig s;
  s.camera.width = j.value("width", s.camera.width);
  s.camera.height = j.value("height", s.camera.height);
  s.camera.fov_y = j.value("fov_y_deg", 60.0) * M_PI / 180.0;
  s.sigma = j.value("sigma", s.sigma);
  s.occlusion.epsilon = j.value("epsilon", s.occlusion.epsilon);
  s.occlusion.min_points = j.value("min_points", s.occlusion.min_points);
  require(s.sigma >= 0.0, Errc::invalid_argument, "sigma must be >= 0");
  s.occlusion.validate();
  return s;
}

void NominalConfig::validate() const {
  require(samples >= 1, Errc::invalid_argument, "nominal model: samples must be >= 1");
  require(alpha > 0.0, Errc::invalid_argument, "nominal model: smoothing alpha must be > 0");
}

int simulate_observation(const PointCloud& render, const std::vector<HalfPlane>& mask,
                         const VPTree& tree, double sigma, std::mt19937_64& rng) {
  PointCloud cloud = apply_occlusion(render, mask);
  add_depth_noise_inplace(cloud, sigma, rng);
  const std::uint64_t kp_seed = rng();
  if (cloud.empty()) return 0;
  const FeatureSet fs = extract_features(cloud, tree.feature_config(), kp_seed);
  if (fs.degenerate) return 0;
  const TemplateId m = tree.best_match(fs);
  return observation_index(m.l, m.g, tree.G(), tree.n_interest(), tree.n_models());
}

// --- nominal ----------------------------------------------------------------

std::size_t NominalObsModel::cell_index(int v, int l, OcclusionState psi) const {
  require(v >= 0 && v < static_cast<int>(views_.size()) && l >= 1 && l <= n_models() &&
              psi < kOcclusionStates,
          Errc::invalid_argument, "nominal model: cell index out of range");
  return (static_cast<std::size_t>(v) * n_models() + (l - 1)) * kOcclusionStates + psi;
}

const NominalObsModel::Cell& NominalObsModel::cell(int v, int l, OcclusionState psi) const {
  return cells_.at(cell_index(v, l, psi));
}

Eigen::VectorXd NominalObsModel::raw_counts(int v, int l, OcclusionState psi) const {
  const Cell& c = cell(v, l, psi);
  Eigen::VectorXd out = Eigen::VectorXd::Constant(Z_, c.uniform_mass / Z_);
  for (const auto& [z, n] : c.counts) out[z - 1] += n;
  return out;
}

Eigen::VectorXd NominalObsModel::row(int v, int l, OcclusionState psi) const {
  const Cell& c = cell(v, l, psi);
  return (raw_counts(v, l, psi).array() + alpha_) / (c.samples + alpha_ * Z_);
}

json NominalObsModel::to_json() const {
  json j;
  j["views"] = views_.to_json();
  j["model_classes"] = model_classes_;
  j["G"] = G_;
  j["n_interest"] = n_interest_;
  j["Z"] = Z_;
  j["alpha"] = alpha_;
  j["samples"] = samples_;
  j["provenance"] = provenance_;
  json cells = json::array();
  for (const auto& c : cells_) {
    json zs = json::array(), ns = json::array();
    for (const auto& [z, n] : c.counts) {
      zs.push_back(z);
      ns.push_back(n);
    }
    cells.push_back({c.samples, c.uniform_mass, std::move(zs), std::move(ns)});
  }
  j["cells"] = std::move(cells);
  return j;
}

NominalObsModel NominalObsModel::from_json(const json& j) {
  NominalObsModel m;
  m.views_ = ViewGraph::from_json(j.at("views"));
  m.model_classes_ = j.at("model_classes").get<std::vector<int>>();
  m.G_ = j.at("G").get<int>();
  m.n_interest_ = j.at("n_interest").get<int>();
  m.Z_ = j.at("Z").get<int>();
  m.alpha_ = j.at("alpha").get<double>();
  m.samples_ = j.at("samples").get<int>();
  m.provenance_ = j.value("provenance", json::object());
  require(m.Z_ == observation_count(m.G_, m.n_interest_, m.n_models()), Errc::io,
          "nominal model: inconsistent observation count");
  require(m.alpha_ > 0.0, Errc::io, "nominal model: alpha must be > 0");
  const auto& cells = j.at("cells");
  require(cells.size() == m.views_.size() * m.n_models() * kOcclusionStates, Errc::io,
          "nominal model: wrong cell count");
  for (const auto& e : cells) {
    Cell c;
    c.samples = e.at(0).get<int>();
    c.uniform_mass = e.at(1).get<double>();
    const auto zs = e.at(2).get<std::vector<int>>();
    const auto ns = e.at(3).get<std::vector<double>>();
    require(zs.size() == ns.size(), Errc::io, "nominal model: malformed cell");
    for (std::size_t k = 0; k < zs.size(); ++k) {
      require(zs[k] >= 1 && zs[k] <= m.Z_, Errc::io, "nominal model: z out of range");
      c.counts.emplace_back(zs[k], ns[k]);
    }
    m.cells_.push_back(std::move(c));
  }
  return m;
}

std::uint64_t NominalObsModel::hash() const { return hash_json(to_json()); }

NominalObsModel build_nominal_model(const std::vector<ObjectModel>& models_by_slot,
                                    const ViewGraph& fine, const VPTree& tree,
                                    const SensorConfig& sensor, const NominalConfig& config,
                                    std::uint64_t seed, int threads, json provenance) {
  config.validate();
  sensor.occlusion.validate();
  require(static_cast<int>(models_by_slot.size()) == tree.n_models(), Errc::invalid_argument,
          "nominal model: model list does not match the tree");
  for (int l = 1; l <= tree.n_models(); ++l)
    require(models_by_slot[l - 1].class_id == tree.model_classes()[l - 1],
            Errc::invalid_argument, "nominal model: models not in tree slot order");

  NominalObsModel m;
  m.views_ = fine;
  m.model_classes_ = tree.model_classes();
  m.G_ = tree.G();
  m.n_interest_ = tree.n_interest();
  m.Z_ = observation_count(m.G_, m.n_interest_, m.n_models());
  m.alpha_ = config.alpha;
  m.samples_ = config.samples;
  m.provenance_ = std::move(provenance);
  m.cells_.assign(fine.size() * m.n_models() * kOcclusionStates, {});

  const int D = m.n_models();
  parallel_for(fine.size() * D, threads, [&](std::size_t job) {
    const int v = static_cast<int>(job / D);
    const int l = static_cast<int>(job % D) + 1;
    const PointCloud render =
        render_depth(models_by_slot[l - 1], fine.at(v), sensor.camera);
    for (int psi = 0; psi < kFullyOccluded; ++psi) {
      std::map<int, double> hist;
      NominalObsModel::Cell cell;
      for (int s = 0; s < config.samples; ++s) {
        std::mt19937_64 rng(mix_seed(seed, v, l, static_cast<std::uint64_t>(psi) * 100003 + s));
        double inset = 0.0;
        if (psi != kNotOccluded)
          inset = std::uniform_real_distribution<double>(0.0, sensor.occlusion.epsilon)(rng);
        const auto mask = occlusion_mask(static_cast<OcclusionState>(psi), sensor.occlusion, inset);
        const int z = simulate_observation(render, mask, tree, sensor.sigma, rng);
        if (z == 0)
          cell.uniform_mass += 1.0;
        else
          hist[z] += 1.0;
        ++cell.samples;
      }
      cell.counts.assign(hist.begin(), hist.end());
      m.cells_[m.cell_index(v, l, static_cast<OcclusionState>(psi))] = std::move(cell);
    }
  });
  return m;
}

// --- planning ---------------------------------------------------------------

std::size_t PlanningObsModel::row_index(int x, int hyp, OcclusionState psi) const {
  require(x >= 0 && x < n_views() && hyp >= 0 && hyp < M() && psi < kOcclusionStates,
          Errc::invalid_argument, "planning model: index out of range");
  return (static_cast<std::size_t>(x) * M() + hyp) * kOcclusionStates + psi;
}

const double* PlanningObsModel::row(int x, int hyp, OcclusionState psi) const {
  return table_.data() + row_index(x, hyp, psi) * Z();
}

double PlanningObsModel::likelihood(int z, int x, int hyp, OcclusionState psi) const {
  require(z >= 1 && z <= Z(), Errc::invalid_argument, "likelihood: z out of range");
  return row(x, hyp, psi)[z - 1];
}

const std::vector<PlanningObsModel::Ref>& PlanningObsModel::refs(int x, int hyp,
                                                                 OcclusionState psi) const {
  return refs_[row_index(x, hyp, psi)];
}

Eigen::MatrixXd PlanningObsModel::matrix(int x, OcclusionState psi) const {
  Eigen::MatrixXd out(M(), Z());
  for (int h = 0; h < M(); ++h)
    for (int z = 0; z < Z(); ++z) out(h, z) = row(x, h, psi)[z];
  return out;
}

void PlanningObsModel::materialize() {
  const int Zn = Z();
  table_.assign(refs_.size() * Zn, 0.0);
  for (std::size_t r = 0; r < refs_.size(); ++r) {
    require(!refs_[r].empty(), Errc::internal_consistency, "planning model: missing nominal cell");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(Zn);
    for (const auto& ref : refs_[r]) acc += nominal_.row(ref.v, ref.l, ref.psi);
    acc /= static_cast<double>(refs_[r].size());
    for (int z = 0; z < Zn; ++z) table_[r * Zn + z] = acc[z];
  }
}

json PlanningObsModel::to_json() const {
  json j;
  j["graph"] = graph_.to_json();
  j["hypotheses"] = hyps_.to_json();
  j["nominal"] = nominal_.to_json();
  j["nominal_hash"] = hex(nominal_.hash());
  json refs = json::array();
  for (const auto& rs : refs_) {
    json row = json::array();
    for (const auto& r : rs) row.push_back({r.v, r.l, r.psi});
    refs.push_back(std::move(row));
  }
  j["refs"] = std::move(refs);
  return j;
}

PlanningObsModel PlanningObsModel::from_json(const json& j) {
  PlanningObsModel p;
  p.graph_ = ViewGraph::from_json(j.at("graph"));
  p.hyps_ = HypothesisSet::from_json(j.at("hypotheses"));
  p.nominal_ = NominalObsModel::from_json(j.at("nominal"));
  require(hex(p.nominal_.hash()) == j.at("nominal_hash").get<std::string>(), Errc::hash_mismatch,
          "planning model: embedded nominal model does not match its recorded hash");
  const auto& refs = j.at("refs");
  require(refs.size() == p.graph_.size() * p.hyps_.size() * kOcclusionStates, Errc::io,
          "planning model: wrong row count");
  for (const auto& rs : refs) {
    std::vector<Ref> row;
    for (const auto& r : rs)
      row.push_back({r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<OcclusionState>()});
    p.refs_.push_back(std::move(row));
  }
  p.materialize();
  return p;
}

std::uint64_t PlanningObsModel::hash() const { return hash_json(to_json()); }

PlanningObsModel derive_planning_model(const NominalObsModel& nominal, const ViewGraph& planning,
                                       const HypothesisSet& hyps,
                                       const std::vector<ObjectModel>& models_by_slot,
                                       const SensorConfig& sensor) {
  require(static_cast<int>(models_by_slot.size()) == nominal.n_models(), Errc::invalid_argument,
          "derive: model list does not match the nominal model");
  auto slot_of = [&](int class_id) {
    for (int l = 1; l <= nominal.n_models(); ++l)
      if (nominal.model_classes()[l - 1] == class_id) return l;
    fail(Errc::internal_consistency,
         "derive: class " + std::to_string(class_id) + " missing from the nominal model");
  };
  for (int c : hyps.interest_classes())
    require(slot_of(c) <= nominal.n_interest(), Errc::internal_consistency,
            "derive: hypothesis class is not an interest model of the nominal model");

  PlanningObsModel p;
  p.graph_ = planning;
  p.hyps_ = hyps;
  p.nominal_ = nominal;
  p.refs_.resize(planning.size() * hyps.size() * kOcclusionStates);

  std::map<std::pair<int, int>, PointCloud> renders;
  auto render_of = [&](int v, int l) -> const PointCloud& {
    auto it = renders.find({v, l});
    if (it == renders.end())
      it = renders
               .emplace(std::make_pair(v, l),
                        render_depth(models_by_slot[l - 1], nominal.views().at(v), sensor.camera))
               .first;
    return it->second;
  };

  // Nominal state seen from v when the psi masks are fixed in the frame of w.
  auto nominal_state = [&](const Pose& w, int v, int l, OcclusionState psi) -> OcclusionState {
    if (psi == kNotOccluded || psi == kFullyOccluded) return psi;
    const Viewpoint& vp = nominal.views().at(v);
    const Mat3 rv = vp.orientation.toRotationMatrix();
    const Mat3 rw_t = w.rotation.toRotationMatrix().transpose();
    const auto mask = occlusion_mask(psi, sensor.occlusion, 0.5 * sensor.occlusion.epsilon);
    PointCloud kept;
    for (const auto& p : render_of(v, l)) {
      const Vec3 in_w = rw_t * (rv * p + vp.position - w.position);
      bool hidden = false;
      for (const auto& h : mask) hidden = hidden || h.contains(in_w);
      if (!hidden) kept.push_back(p);
    }
    return classify_occlusion(kept, sensor.occlusion);
  };

  const std::vector<int> interest = hyps.interest_classes();
  for (int x = 0; x < static_cast<int>(planning.size()); ++x) {
    for (int h = 0; h < hyps.size(); ++h) {
      const Hypothesis& hyp = hyps[h];
      const Pose w = sensor_pose_in_object_frame(planning.at(x), hyp.orientation);
      const int v = nearest_viewpoint(w, nominal.views()).id;
      std::vector<int> slots;
      if (hyp.is_null()) {
        for (int l = 1; l <= nominal.n_models(); ++l) {
          bool is_interest = false;
          for (int c : interest) is_interest = is_interest || nominal.model_classes()[l - 1] == c;
          if (!is_interest) slots.push_back(l);
        }
        require(!slots.empty(), Errc::internal_consistency,
                "derive: no non-interest models for the null hypothesis");
      } else {
        slots.push_back(slot_of(hyp.class_id));
      }
      for (int psi = 0; psi < kOcclusionStates; ++psi) {
        auto& refs = p.refs_[p.row_index(x, h, static_cast<OcclusionState>(psi))];
        for (int l : slots)
          refs.push_back({v, l, nominal_state(w, v, l, static_cast<OcclusionState>(psi))});
      }
    }
  }
  p.materialize();
  return p;
}

}  // namespace avp
