#include <gtest/gtest.h>

#include "avp/error.hpp"
#include "avp/obsmodel.hpp"
#include "avp/serialize.hpp"

using namespace avp;

namespace {

struct Fixture {
  std::vector<ObjectModel> models;
  VPTree tree;
  ViewGraph fine;
  SensorConfig sensor;
  NominalObsModel nominal;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x;
    const auto all = shipped_models();
    x.models = {all[0], all[2], all[3]};
    const ViewGraph train = build_viewsphere(12, 1.0, false);
    std::vector<TrainingTemplate> t;
    for (int l = 1; l <= 3; ++l)
      for (int g = 1; g <= 12; ++g)
        t.push_back({{g, l},
                     extract_features(render_depth(x.models[l - 1], train.at(g - 1)),
                                      FeatureConfig{}, mix_seed(2, l, g))});
    x.tree = VPTree::train(t, {0, 2, 3}, 1, 12, {}, FeatureConfig{}, 1);
    x.fine = build_viewsphere(8, 1.0, false);
    x.nominal = build_nominal_model(x.models, x.fine, x.tree, x.sensor, {2, 0.5}, 17, 1);
    return x;
  }();
  return f;
}

}  // namespace

TEST(ObservationIndex, Examples) {
  EXPECT_EQ(observation_index(1, 5, 48, 1, 6), 5);
  EXPECT_EQ(observation_index(1, 48, 48, 1, 6), 48);
  for (int g : {1, 17, 48}) EXPECT_EQ(observation_index(3, g, 48, 1, 6), 50);
  EXPECT_EQ(observation_index(6, 1, 48, 1, 6), 53);
  EXPECT_EQ(observation_count(48, 1, 6), 53);
  EXPECT_EQ(observation_index(2, 3, 10, 2, 4), 13);
  EXPECT_THROW(observation_index(0, 1, 48, 1, 6), Error);
  EXPECT_THROW(observation_index(1, 49, 48, 1, 6), Error);
}

TEST(NominalConfig, RejectsZeroSmoothing) {
  EXPECT_THROW((NominalConfig{1, 0.0}.validate()), Error);
  EXPECT_THROW((NominalConfig{0, 0.5}.validate()), Error);
}

TEST(Nominal, RowsAreDistributions) {
  const auto& f = fixture();
  const int Z = f.nominal.Z();
  EXPECT_EQ(Z, 12 + 2);
  for (int v = 0; v < 8; ++v)
    for (int l = 1; l <= 3; ++l)
      for (OcclusionState psi = 0; psi < kOcclusionStates; ++psi) {
        const Eigen::VectorXd r = f.nominal.row(v, l, psi);
        ASSERT_EQ(r.size(), Z);
        EXPECT_NEAR(r.sum(), 1.0, 1e-9);
        EXPECT_TRUE((r.array() > 0).all());
        if (psi == kFullyOccluded)
          for (int z = 0; z < Z; ++z) EXPECT_DOUBLE_EQ(r[z], 1.0 / Z);
        else
          EXPECT_EQ(f.nominal.cell(v, l, psi).samples, 2);
      }
}

TEST(Nominal, DeterministicForSeed) {
  const auto& f = fixture();
  const NominalObsModel again = build_nominal_model(f.models, f.fine, f.tree, f.sensor, {2, 0.5}, 17, 2);
  EXPECT_EQ(again.hash(), f.nominal.hash());
}

TEST(Nominal, JsonRoundTrip) {
  const auto& f = fixture();
  const NominalObsModel back = NominalObsModel::from_json(nlohmann::json::parse(f.nominal.to_json().dump()));
  EXPECT_EQ(back.hash(), f.nominal.hash());
  EXPECT_EQ(back.row(3, 2, 5), f.nominal.row(3, 2, 5));
}

TEST(Planning, IdentityOrientationCopiesNominalRow) {
  const auto& f = fixture();
  const HypothesisSet hyps = HypothesisSet::grid({0}, 1);
  const PlanningObsModel p = derive_planning_model(f.nominal, f.fine, hyps, f.models, f.sensor);
  for (int x = 0; x < 8; ++x) {
    const Eigen::VectorXd expect = f.nominal.row(x, 1, kNotOccluded);
    for (int z = 1; z <= p.Z(); ++z) EXPECT_EQ(p.likelihood(z, x, 0, kNotOccluded), expect[z - 1]);
  }
}

TEST(Planning, NullRowAveragesNonInterestSlots) {
  const auto& f = fixture();
  const HypothesisSet hyps = HypothesisSet::grid({0}, 2);
  const PlanningObsModel p = derive_planning_model(f.nominal, f.fine, hyps, f.models, f.sensor);
  const int null_h = hyps.null_index();
  for (int x = 0; x < 8; ++x) {
    ASSERT_EQ(p.refs(x, null_h, kNotOccluded).size(), 2u);
    const Eigen::VectorXd expect =
        0.5 * (f.nominal.row(x, 2, kNotOccluded) + f.nominal.row(x, 3, kNotOccluded));
    for (int z = 1; z <= p.Z(); ++z)
      EXPECT_NEAR(p.likelihood(z, x, null_h, kNotOccluded), expect[z - 1], 1e-15);
  }
}

TEST(Planning, SevenHypothesesOver42Viewpoints) {
  const auto& f = fixture();
  const HypothesisSet hyps = HypothesisSet::grid({0}, 6);
  const ViewGraph plan = build_viewsphere(84, 1.0, true);
  const PlanningObsModel p = derive_planning_model(f.nominal, plan, hyps, f.models, f.sensor);
  EXPECT_EQ(p.n_views(), 42);
  EXPECT_EQ(p.M(), 7);
  int rows = 0;
  for (int x = 0; x < 42; ++x)
    for (int h = 0; h < 7; ++h)
      for (OcclusionState psi = 0; psi < kOcclusionStates; ++psi) {
        ++rows;
        double sum = 0;
        for (int z = 1; z <= p.Z(); ++z) sum += p.likelihood(z, x, h, psi);
        EXPECT_NEAR(sum, 1.0, 1e-9);
      }
  EXPECT_EQ(rows, 42 * 7 * 16);
  const Eigen::MatrixXd m = p.matrix(5, kNotOccluded);
  EXPECT_EQ(m.rows(), 7);
  EXPECT_EQ(m.cols(), p.Z());
}

TEST(Planning, DerivationIsIdempotentAndSerializable) {
  const auto& f = fixture();
  const HypothesisSet hyps = HypothesisSet::grid({0}, 3);
  const ViewGraph plan = build_viewsphere(10, 1.0, true);
  const PlanningObsModel a = derive_planning_model(f.nominal, plan, hyps, f.models, f.sensor);
  const PlanningObsModel b = derive_planning_model(f.nominal, plan, hyps, f.models, f.sensor);
  EXPECT_EQ(a.hash(), b.hash());
  nlohmann::json j = nlohmann::json::parse(a.to_json().dump());
  const PlanningObsModel c = PlanningObsModel::from_json(j);
  EXPECT_EQ(c.hash(), a.hash());
  EXPECT_EQ(c.likelihood(3, 2, 1, 6), a.likelihood(3, 2, 1, 6));

  j["nominal_hash"] = "0000000000000000";
  try {
    PlanningObsModel::from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::hash_mismatch);
  }
}

TEST(Planning, MissingClassRejected) {
  const auto& f = fixture();
  const HypothesisSet hyps = HypothesisSet::grid({5}, 2);
  EXPECT_THROW(derive_planning_model(f.nominal, f.fine, hyps, f.models, f.sensor), Error);
}
