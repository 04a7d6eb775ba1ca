#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "tailcop/errors.hpp"
#include "tailcop/harness.hpp"

namespace tailcop {
namespace {

using nlohmann::json;

json mse_config() {
  return {{"campaign", "mse-sweep"}, {"seed", 11}, {"n", 400}, {"k", {20, 40, 80}},
          {"reps", 12}, {"angles", "pi/8"},
          {"models", {{{"family", "clayton"}, {"lambda", 0.25}}}}};
}

TEST(Config, RequiredFields) {
  auto j = mse_config();
  j.erase("seed");
  EXPECT_THROW(CampaignConfig::from_json(j), ConfigError);
  j = mse_config();
  j["reps"] = 0;
  EXPECT_THROW(CampaignConfig::from_json(j), ConfigError);
  j = mse_config();
  j["campaign"] = "table-9";
  EXPECT_THROW(CampaignConfig::from_json(j), ConfigError);
  j = mse_config();
  j["models"][0]["lambda"] = 0.9999;
  j["models"][0]["family"] = "mixed";
  EXPECT_THROW(CampaignConfig::from_json(j), ConfigError);
  j = mse_config();
  j["kinds"] = {"bogus"};
  EXPECT_THROW(CampaignConfig::from_json(j), ConfigError);
  j = mse_config();
  j["n"] = "many";
  EXPECT_THROW(CampaignConfig::from_json(j), ConfigError);
  EXPECT_THROW(CampaignConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST(Config, ParsesModelsAndKs) {
  json j = {{"campaign", "ci-coverage"}, {"seed", 1}, {"reps", 3}, {"k", {50, "50/200", {20, 100}}},
            {"models", {{{"family", "clayton"}, {"lambda_target", 0.5}},
                        {{"family", "mixed"}, {"theta", 0.6}}}}};
  const auto c = CampaignConfig::from_json(j);
  ASSERT_EQ(c.ks.size(), 3u);
  EXPECT_EQ(c.ks[1].estimate, 50);
  EXPECT_EQ(c.ks[1].bootstrap, 200);
  EXPECT_EQ(c.ks[1].label(), "50/200");
  EXPECT_EQ(c.ks[2].label(), "20/100");
  EXPECT_EQ(c.ks[0].label(), "50");
  EXPECT_NEAR(c.models[0].theta, 1.0, 1e-12);
  EXPECT_EQ(c.models[0].label(), "clayton(0.5)");
  EXPECT_EQ(c.models[1].label(), "mixed[theta=0.6]");
  EXPECT_EQ(c.alphas, (std::vector<double>{0.1, 0.05}));
  EXPECT_EQ(c.kinds, (std::vector<std::string>{"pdm"}));
  EXPECT_EQ(angle_preset("diagonal"), (std::vector<double>{std::numbers::pi / 4}));
  EXPECT_THROW(angle_preset("pi/7"), ConfigError);
}

TEST(Config, ScaledReps) {
  auto j = mse_config();
  j["reps"] = 1000;
  j["scale"] = 0.05;
  EXPECT_EQ(CampaignConfig::from_json(j).effective_reps(), 50u);
  j["scale"] = 1e-9;
  EXPECT_EQ(CampaignConfig::from_json(j).effective_reps(), 1u);
}

TEST(MseSweep, InjectedTruthHasZeroError) {
  auto j = mse_config();
  j["reps"] = 1;
  j["k"] = 50;
  HarnessHooks hooks;
  hooks.estimator = [](const BivariateSample&, int, Point x, const TailCopulaModel& truth) {
    return truth.eval(x);
  };
  const auto r = run_mse_sweep(CampaignConfig::from_json(j), hooks);
  EXPECT_EQ(r.value("mse", {{"k", "50"}}, "mse"), 0.0);
  for (const auto& c : r.cells) {
    if (c.table == "mse_points") EXPECT_EQ(c.values.at("mse"), 0.0);
  }
}

TEST(MseSweep, DecompositionIsExact) {
  const auto r = run_mse_sweep(CampaignConfig::from_json(mse_config()));
  int seen = 0;
  for (const auto& c : r.cells) {
    if (c.table != "mse" && c.table != "mse_points") continue;
    ++seen;
    EXPECT_NEAR(c.values.at("mse"), c.values.at("var") + c.values.at("bias2"), 1e-12);
    EXPECT_EQ(c.reps, 12u);
  }
  EXPECT_EQ(seen, 3 + 9);
  const double k = r.value("argmin", {}, "k");
  EXPECT_TRUE(k == 20 || k == 40 || k == 80);
}

TEST(Campaigns, DeterministicAcrossThreadCounts) {
  const json configs[] = {
      mse_config(),
      {{"campaign", "cov-table"}, {"seed", 5}, {"n", 300}, {"k", 30}, {"reps", 4}, {"B", 40},
       {"angles", "pi/8"}, {"models", {{{"family", "clayton"}, {"lambda", 0.25}}}}},
      {{"campaign", "equality-test"}, {"seed", 6}, {"n", 300}, {"k", 30}, {"reps", 4}, {"B", 30},
       {"pairs", {{{{"family", "clayton"}, {"lambda", 0.25}}, {{"family", "clayton"}, {"lambda", 0.5}}}}}},
      {{"campaign", "ci-coverage"}, {"seed", 7}, {"n", 300}, {"k", {30, "20/40"}}, {"reps", 3}, {"B", 30},
       {"with_sigma2", true}, {"models", {{{"family", "clayton"}, {"lambda", 0.5}}}}},
      {{"campaign", "gof-test"}, {"seed", 8}, {"n", 300}, {"k", 30}, {"reps", 3}, {"B", 30},
       {"models", {{{"family", "aneglog"}, {"lambda", 0.4}}}}},
  };
  for (json j : configs) {
    j["threads"] = 1;
    const auto a = run_campaign(CampaignConfig::from_json(j));
    j["threads"] = 3;
    const auto b = run_campaign(CampaignConfig::from_json(j));
    ASSERT_EQ(a.cells.size(), b.cells.size()) << j["campaign"];
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
      EXPECT_EQ(a.cells[i].labels, b.cells[i].labels);
      EXPECT_EQ(a.cells[i].values, b.cells[i].values) << j["campaign"] << " cell " << i;
    }
  }
}

TEST(Campaigns, RatesAndNesting) {
  json j = {{"campaign", "equality-test"}, {"seed", 9}, {"n", 300}, {"k", 30}, {"reps", 6}, {"B", 40},
            {"kinds", {"pdm"}},
            {"pairs", {{{{"family", "clayton"}, {"lambda", 0.25}}, {{"family", "clayton"}, {"lambda", 0.25}}}}}};
  const auto r = run_campaign(CampaignConfig::from_json(j));
  const double r15 = r.value("rejection", {{"alpha", "0.15"}}, "rate");
  const double r05 = r.value("rejection", {{"alpha", "0.05"}}, "rate");
  EXPECT_GE(r15, r05);
  for (const auto& c : r.cells) {
    const double rate = c.values.at("rate");
    EXPECT_GE(rate, 0.0);
    EXPECT_LE(rate, 1.0);
    EXPECT_DOUBLE_EQ(rate * 6, std::round(rate * 6));
  }
  EXPECT_THROW(r.value("rejection", {{"alpha", "0.5"}}, "rate"), ConfigError);
}

TEST(Campaigns, CoverageNestedLevels) {
  json j = {{"campaign", "ci-coverage"}, {"seed", 10}, {"n", 400}, {"k", 40}, {"reps", 5}, {"B", 50},
            {"models", {{{"family", "clayton"}, {"lambda", 0.5}}}}};
  const auto r = run_campaign(CampaignConfig::from_json(j));
  const auto* c95 = r.find("coverage", {{"level", "0.95"}});
  const auto* c90 = r.find("coverage", {{"level", "0.9"}});
  ASSERT_NE(c95, nullptr);
  ASSERT_NE(c90, nullptr);
  EXPECT_GE(c95->values.at("coverage"), c90->values.at("coverage"));
  EXPECT_GE(c95->values.at("mean_width"), c90->values.at("mean_width"));
}

TEST(Campaigns, WritesCsvAndManifest) {
  const auto dir = std::filesystem::temp_directory_path() / "tailcop_harness_test";
  std::filesystem::remove_all(dir);
  auto j = mse_config();
  j["name"] = "sweep";
  j["output"] = dir.string();
  const auto r = run_campaign(CampaignConfig::from_json(j));
  ASSERT_TRUE(std::filesystem::exists(dir / "sweep_mse.csv"));
  ASSERT_TRUE(std::filesystem::exists(dir / "sweep_manifest.json"));
  std::ifstream csv(dir / "sweep_mse.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_NE(header.find("k"), std::string::npos);
  EXPECT_NE(header.find("bias2"), std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, 3);
  std::ifstream mf(dir / "sweep_manifest.json");
  const json manifest = json::parse(mf);
  EXPECT_EQ(manifest["format_version"], CampaignResult::kFormatVersion);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
  EXPECT_TRUE(manifest.contains("wall_seconds"));
  EXPECT_EQ(r.to_json()["cells"].size(), r.cells.size());
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace tailcop
