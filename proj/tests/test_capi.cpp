#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "avp/avp.h"

namespace fs = std::filesystem;

namespace {

const std::string kSmoke = std::string(AVP_SOURCE_DIR) + "/configs/smoke.json";

void collect(const char* line, void* user) {
  static_cast<std::vector<std::string>*>(user)->push_back(line);
}

}  // namespace

TEST(CApi, StatusNames) {
  EXPECT_STREQ(avp_status_name(AVP_OK), "ok");
  EXPECT_STREQ(avp_status_name(AVP_E_HASH_MISMATCH), "hash-mismatch");
  EXPECT_NE(std::strlen(avp_version()), 0u);
}

TEST(CApi, BadArguments) {
  avp_scenario* sc = nullptr;
  EXPECT_EQ(avp_scenario_load(nullptr, &sc), AVP_E_INVALID_ARGUMENT);
  EXPECT_EQ(avp_scenario_load("/no/such/config.json", &sc), AVP_E_IO);
  EXPECT_EQ(sc, nullptr);
  EXPECT_NE(std::strlen(avp_last_error()), 0u);

  ASSERT_EQ(avp_scenario_load(kSmoke.c_str(), &sc), AVP_OK);
  EXPECT_EQ(avp_run_stage(sc, "no-such-stage", 1, nullptr, nullptr, nullptr),
            AVP_E_INVALID_ARGUMENT);
  avp_scenario_free(sc);
  avp_scenario_free(nullptr);
}

TEST(CApi, ScenarioJsonReflectsOverrides) {
  avp_scenario* sc = nullptr;
  ASSERT_EQ(avp_scenario_load(kSmoke.c_str(), &sc), AVP_OK);
  ASSERT_EQ(avp_scenario_set_seed(sc, 4242), AVP_OK);
  char* text = nullptr;
  ASSERT_EQ(avp_scenario_json(sc, &text), AVP_OK);
  EXPECT_NE(std::string(text).find("4242"), std::string::npos);
  avp_string_free(text);
  avp_scenario_free(sc);
}

TEST(CApi, StagesArtifactsAndQueries) {
  const fs::path work = fs::path(AVP_BINARY_DIR) / "test_work" / "capi";
  fs::remove_all(work);
  avp_scenario* sc = nullptr;
  ASSERT_EQ(avp_scenario_load(kSmoke.c_str(), &sc), AVP_OK);
  ASSERT_EQ(avp_scenario_set_output_dir(sc, work.c_str()), AVP_OK);

  avp_artifacts* art = nullptr;
  EXPECT_NE(avp_artifacts_load(sc, &art), AVP_OK);

  std::vector<std::string> log;
  for (const char* stage : {"train-vptree", "build-obsmodel", "derive-obsmodel", "solve"}) {
    char* summary = nullptr;
    ASSERT_EQ(avp_run_stage(sc, stage, 1, collect, &log, &summary), AVP_OK) << avp_last_error();
    ASSERT_NE(summary, nullptr);
    EXPECT_EQ(summary[0], '{');
    avp_string_free(summary);
  }
  EXPECT_FALSE(log.empty());

  ASSERT_EQ(avp_artifacts_load(sc, &art), AVP_OK) << avp_last_error();
  int X = 0, M = 0, Z = 0;
  ASSERT_EQ(avp_artifacts_shape(art, &X, &M, &Z), AVP_OK);
  EXPECT_EQ(X, 6);
  EXPECT_EQ(M, 3);
  EXPECT_EQ(Z, 12 + 5);

  char* label = nullptr;
  ASSERT_EQ(avp_hypothesis_label(art, M - 1, &label), AVP_OK);
  EXPECT_STREQ(label, "null");
  avp_string_free(label);
  EXPECT_EQ(avp_hypothesis_label(art, M, &label), AVP_E_INVALID_ARGUMENT);

  std::vector<double> p(M, 1.0 / M), q(M);
  ASSERT_EQ(avp_bayes_update(art, p.data(), 0, 1, 0, q.data()), AVP_OK);
  double sum = 0;
  for (double v : q) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  // Full occlusion carries no information.
  ASSERT_EQ(avp_bayes_update(art, p.data(), 0, 1, 15, q.data()), AVP_OK);
  for (double v : q) EXPECT_NEAR(v, 1.0 / M, 1e-12);
  EXPECT_EQ(avp_bayes_update(art, p.data(), X, 1, 0, q.data()), AVP_E_INVALID_ARGUMENT);

  int kind = -1, target = -1;
  std::vector<double> sure(M, 0.0);
  sure[0] = 1.0;
  ASSERT_EQ(avp_policy_action(art, 0, sure.data(), &kind, &target), AVP_OK);
  EXPECT_EQ(kind, 1);
  EXPECT_EQ(target, 0);
  avp_artifacts_free(art);

  // A different seed no longer matches the stored fingerprints.
  ASSERT_EQ(avp_scenario_set_seed(sc, 99), AVP_OK);
  EXPECT_EQ(avp_artifacts_load(sc, &art), AVP_E_HASH_MISMATCH);
  EXPECT_EQ(avp_run_stage(sc, "bench", 1, nullptr, nullptr, nullptr), AVP_E_HASH_MISMATCH);
  avp_scenario_free(sc);
}
