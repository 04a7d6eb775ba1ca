#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tailcop/bootstrap.hpp"
#include "tailcop/estimators.hpp"
#include "tailcop/models.hpp"
#include "tailcop/point.hpp"
#include "tailcop/sample.hpp"

namespace tailcop {

enum class Campaign { MseSweep, CovTable, EqualityTest, CiCoverage, GofTest };

std::string_view campaign_name(Campaign c);
Campaign parse_campaign(std::string_view name);

// A model given by its family and either a tail dependence coefficient or a
// parameter value.
struct ModelSpec {
  Family family = Family::Clayton;
  std::optional<double> lambda;
  double theta = 1.0;
  ModelShape shape;

  static ModelSpec from_lambda(Family family, double lambda, ModelShape shape = {});
  static ModelSpec from_json(const nlohmann::json& j);

  TailCopulaModel model() const { return {family, theta, shape}; }
  std::string label() const;  // e.g. "clayton(0.25)" or "mixed[theta=0.6]"
};

// Threshold counts of one cell: the estimation k and the bootstrap k (equal
// except in the dual-k coverage mode).
struct KSpec {
  int estimate = 50;
  int bootstrap = 50;
  std::string label() const;  // "50" or "50/200"
};

// Angle presets: "pi/8" is {pi/8, 2pi/8, 3pi/8}; "diagonal" is {pi/4}.
std::vector<double> angle_preset(std::string_view name);

struct CampaignConfig {
  Campaign campaign = Campaign::MseSweep;
  std::string name;
  std::uint64_t seed = 0;
  std::size_t n = 1000;
  std::vector<KSpec> ks;
  std::size_t reps = 1;
  std::size_t B = 500;
  std::vector<double> alphas;
  std::vector<std::string> kinds;
  std::size_t grid_nodes = 100;
  std::vector<double> angles;
  std::vector<ModelSpec> models;                           // all but equality-test
  std::vector<std::pair<ModelSpec, ModelSpec>> pairs;      // equality-test
  Family null_family = Family::Clayton;                    // gof-test
  unsigned threads = 0;
  double scale = 1.0;
  std::string output;
  EstimatorForm form = EstimatorForm::Copula;
  MultiplierScheme multipliers = MultiplierScheme::two_point();
  bool with_sigma2 = false;
  nlohmann::json raw;

  // Throws ConfigError on missing or invalid fields and on unattainable
  // tail dependence targets.
  static CampaignConfig from_json(const nlohmann::json& j);
  static CampaignConfig load(const std::filesystem::path& path);

  std::size_t effective_reps() const;
};

// One aggregated row of an output table.
struct Cell {
  std::string table;
  std::map<std::string, std::string> labels;
  std::map<std::string, double> values;
  std::size_t reps = 0;
};

struct CampaignResult {
  static constexpr int kFormatVersion = 1;

  Campaign campaign = Campaign::MseSweep;
  std::string name;
  nlohmann::json config;
  std::vector<Cell> cells;
  std::size_t reps = 0;
  double wall_seconds = 0.0;

  // First cell of `table` whose labels include all of `labels`.
  const Cell* find(std::string_view table, const std::map<std::string, std::string>& labels) const;
  double value(std::string_view table, const std::map<std::string, std::string>& labels,
               const std::string& key) const;

  nlohmann::json to_json() const;
  // One CSV per table plus <name>_manifest.json in `dir`. Returns the files.
  std::vector<std::filesystem::path> write(const std::filesystem::path& dir) const;
};

struct HarnessHooks {
  // Replaces the tail copula estimator in the MSE sweep.
  std::function<double(const BivariateSample&, int k, Point x, const TailCopulaModel& truth)>
      estimator;
};

// Label formatting shared with consumers of CampaignResult::find.
std::string format_label(double v);

CampaignResult run_mse_sweep(const CampaignConfig& config, const HarnessHooks& hooks = {});
CampaignResult run_cov_table(const CampaignConfig& config, const HarnessHooks& hooks = {});
CampaignResult run_equality_test(const CampaignConfig& config, const HarnessHooks& hooks = {});
CampaignResult run_ci_coverage(const CampaignConfig& config, const HarnessHooks& hooks = {});
CampaignResult run_gof(const CampaignConfig& config, const HarnessHooks& hooks = {});
CampaignResult run_campaign(const CampaignConfig& config, const HarnessHooks& hooks = {});

}  // namespace tailcop
