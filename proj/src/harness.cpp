#include "tailcop/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "tailcop/errors.hpp"
#include "tailcop/inference.hpp"
#include "tailcop/kernels.hpp"
#include "tailcop/parallel.hpp"

namespace tailcop {

using nlohmann::json;

std::string_view campaign_name(Campaign c) {
  switch (c) {
    case Campaign::MseSweep: return "mse-sweep";
    case Campaign::CovTable: return "cov-table";
    case Campaign::EqualityTest: return "equality-test";
    case Campaign::CiCoverage: return "ci-coverage";
    case Campaign::GofTest: return "gof-test";
  }
  return "unknown";
}

Campaign parse_campaign(std::string_view name) {
  for (auto c : {Campaign::MseSweep, Campaign::CovTable, Campaign::EqualityTest,
                 Campaign::CiCoverage, Campaign::GofTest}) {
    if (campaign_name(c) == name) return c;
  }
  throw ConfigError(fmt::format("unknown campaign '{}'", name));
}

std::string format_label(double v) { return fmt::format("{}", v); }

ModelSpec ModelSpec::from_lambda(Family family, double lambda, ModelShape shape) {
  ModelSpec s;
  s.family = family;
  s.lambda = lambda;
  s.shape = shape;
  try {
    s.theta = solve_theta_for_lambda(family, lambda, shape);
  } catch (const RangeError& e) {
    throw ConfigError(fmt::format("tail dependence {} is not attainable for {}: {}", lambda,
                                  family_name(family), e.what()));
  }
  return s;
}

ModelSpec ModelSpec::from_json(const json& j) try {
  if (!j.is_object() || !j.contains("family")) throw ConfigError("model spec needs a family");
  const Family family = parse_family(j.at("family").get<std::string>());
  ModelShape shape;
  const json& sp = j.contains("shape_params") ? j["shape_params"] : j;
  if (sp.contains("convex_weight")) shape.convex_weight = sp["convex_weight"].get<double>();
  if (sp.contains("psi1")) shape.psi1 = sp["psi1"].get<double>();
  if (sp.contains("psi2")) shape.psi2 = sp["psi2"].get<double>();
  for (const char* key : {"lambda", "lambda_target"}) {
    if (j.contains(key)) return from_lambda(family, j[key].get<double>(), shape);
  }
  if (!j.contains("theta")) throw ConfigError("model spec needs lambda or theta");
  ModelSpec s;
  s.family = family;
  s.shape = shape;
  s.theta = j["theta"].get<double>();
  if (!theta_domain(family).contains(s.theta)) throw ConfigError("theta outside the family domain");
  return s;
} catch (const json::exception& e) {
  throw ConfigError(fmt::format("bad model spec: {}", e.what()));
}

std::string ModelSpec::label() const {
  if (lambda) return fmt::format("{}({})", family_name(family), *lambda);
  return fmt::format("{}[theta={}]", family_name(family), theta);
}

std::string KSpec::label() const {
  if (estimate == bootstrap) return std::to_string(estimate);
  return fmt::format("{}/{}", estimate, bootstrap);
}

std::vector<double> angle_preset(std::string_view name) {
  constexpr double pi = std::numbers::pi;
  if (name == "pi/8") return {pi / 8, 2 * pi / 8, 3 * pi / 8};
  if (name == "diagonal") return {pi / 4};
  throw ConfigError(fmt::format("unknown angle preset '{}'", name));
}

namespace {

template <class T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("field '{}': {}", key, e.what()));
  }
}

KSpec parse_kspec(const json& j) {
  KSpec k;
  if (j.is_number_integer()) {
    k.estimate = k.bootstrap = j.get<int>();
  } else if (j.is_array() && j.size() == 2) {
    k.estimate = j[0].get<int>();
    k.bootstrap = j[1].get<int>();
  } else if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      k.estimate = std::stoi(s.substr(0, slash));
      k.bootstrap = slash == std::string::npos ? k.estimate : std::stoi(s.substr(slash + 1));
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("bad k entry '{}'", s));
    }
  } else {
    throw ConfigError("k entries must be integers, [k_est, k_boot] pairs or \"a/b\" strings");
  }
  if (k.estimate < 1 || k.bootstrap < 1) throw ConfigError("k must be positive");
  return k;
}

}  // namespace

CampaignConfig CampaignConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("campaign config must be a JSON object");
  CampaignConfig c;
  c.raw = j;
  if (!j.contains("campaign")) throw ConfigError("missing field 'campaign'");
  c.campaign = parse_campaign(field<std::string>(j, "campaign", ""));
  c.name = field<std::string>(j, "name", std::string(campaign_name(c.campaign)));
  if (!j.contains("seed")) throw ConfigError("missing field 'seed'");
  c.seed = field<std::uint64_t>(j, "seed", 0);
  c.n = field<std::size_t>(j, "n", 1000);
  if (!j.contains("reps")) throw ConfigError("missing field 'reps'");
  const auto reps = field<long long>(j, "reps", 0);
  if (reps < 1) throw ConfigError("reps must be at least 1");
  c.reps = static_cast<std::size_t>(reps);
  const auto B = field<long long>(j, "B", 500);
  if (B < 1) throw ConfigError("B must be at least 1");
  c.B = static_cast<std::size_t>(B);
  c.grid_nodes = field<std::size_t>(j, "grid", 100);
  if (c.grid_nodes == 0) throw ConfigError("grid must have at least one node");
  c.threads = field<unsigned>(j, "threads", 0);
  c.scale = field<double>(j, "scale", 1.0);
  if (!(c.scale > 0.0)) throw ConfigError("scale must be positive");
  c.output = field<std::string>(j, "output", "");
  c.with_sigma2 = field<bool>(j, "with_sigma2", false);

  const auto form = field<std::string>(j, "form", "copula");
  if (form == "copula") {
    c.form = EstimatorForm::Copula;
  } else if (form == "rank") {
    c.form = EstimatorForm::Rank;
  } else {
    throw ConfigError(fmt::format("unknown estimator form '{}'", form));
  }
  const auto mult = field<std::string>(j, "multipliers", "two_point");
  if (mult == "two_point") {
    c.multipliers = MultiplierScheme::two_point();
  } else if (mult == "exponential") {
    c.multipliers = MultiplierScheme::exponential();
  } else {
    throw ConfigError(fmt::format("unknown multiplier scheme '{}'", mult));
  }

  if (!j.contains("k")) throw ConfigError("missing field 'k'");
  if (j["k"].is_array()) {
    for (const auto& e : j["k"]) c.ks.push_back(parse_kspec(e));
  } else {
    c.ks.push_back(parse_kspec(j["k"]));
  }
  if (c.ks.empty()) throw ConfigError("k list is empty");
  for (const auto& k : c.ks) {
    if (static_cast<std::size_t>(std::max(k.estimate, k.bootstrap)) > c.n) {
      throw ConfigError("k must not exceed n");
    }
  }

  const bool ci = c.campaign == Campaign::CiCoverage;
  c.alphas = field<std::vector<double>>(j, "alphas", ci ? std::vector<double>{0.1, 0.05}
                                                        : std::vector<double>{0.15, 0.1, 0.05});
  if (c.alphas.empty()) throw ConfigError("alphas list is empty");
  for (double a : c.alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alphas must lie in (0, 1)");
  }
  std::vector<std::string> default_kinds;
  switch (c.campaign) {
    case Campaign::MseSweep: break;
    case Campaign::CovTable: default_kinds = {"sampling", "pdm", "dm", "resample"}; break;
    case Campaign::EqualityTest: default_kinds = {"pdm", "dm"}; break;
    case Campaign::CiCoverage:
    case Campaign::GofTest: default_kinds = {"pdm"}; break;
  }
  c.kinds = field<std::vector<std::string>>(j, "kinds", default_kinds);
  if (c.kinds.empty() && c.campaign != Campaign::MseSweep) throw ConfigError("kinds list is empty");
  for (const auto& kind : c.kinds) {
    if (kind != "sampling") parse_kind(kind);
  }

  if (j.contains("angles")) {
    if (j["angles"].is_string()) {
      c.angles = angle_preset(j["angles"].get<std::string>());
    } else {
      c.angles = field<std::vector<double>>(j, "angles", {});
    }
  } else {
    c.angles = angle_preset("pi/8");
  }
  for (double phi : c.angles) {
    if (!(phi > 0.0 && phi < std::numbers::pi / 2)) throw ConfigError("angles must lie in (0, pi/2)");
  }

  if (c.campaign == Campaign::EqualityTest) {
    if (!j.contains("pairs") || !j["pairs"].is_array() || j["pairs"].empty()) {
      throw ConfigError("equality-test needs a nonempty 'pairs' list");
    }
    for (const auto& p : j["pairs"]) {
      if (!p.is_array() || p.size() != 2) throw ConfigError("each pair needs two model specs");
      c.pairs.emplace_back(ModelSpec::from_json(p[0]), ModelSpec::from_json(p[1]));
    }
  } else {
    if (!j.contains("models") || !j["models"].is_array() || j["models"].empty()) {
      throw ConfigError("campaign needs a nonempty 'models' list");
    }
    for (const auto& m : j["models"]) c.models.push_back(ModelSpec::from_json(m));
  }
  c.null_family = parse_family(field<std::string>(j, "null_family", "clayton"));
  return c;
}

CampaignConfig CampaignConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return from_json(j);
}

std::size_t CampaignConfig::effective_reps() const {
  const auto r = static_cast<long long>(std::llround(static_cast<double>(reps) * scale));
  return static_cast<std::size_t>(std::max(1LL, r));
}

const Cell* CampaignResult::find(std::string_view table,
                                 const std::map<std::string, std::string>& labels) const {
  for (const Cell& cell : cells) {
    if (cell.table != table) continue;
    bool match = true;
    for (const auto& [key, v] : labels) {
      const auto it = cell.labels.find(key);
      if (it == cell.labels.end() || it->second != v) {
        match = false;
        break;
      }
    }
    if (match) return &cell;
  }
  return nullptr;
}

double CampaignResult::value(std::string_view table, const std::map<std::string, std::string>& labels,
                             const std::string& key) const {
  const Cell* cell = find(table, labels);
  if (cell == nullptr) throw ConfigError(fmt::format("no cell in table '{}'", table));
  const auto it = cell->values.find(key);
  if (it == cell->values.end()) throw ConfigError(fmt::format("cell has no value '{}'", key));
  return it->second;
}

json CampaignResult::to_json() const {
  json jc = json::array();
  for (const Cell& c : cells) {
    jc.push_back({{"table", c.table}, {"labels", c.labels}, {"values", c.values}, {"reps", c.reps}});
  }
  return {{"format_version", kFormatVersion}, {"campaign", campaign_name(campaign)},
          {"name", name},     {"config", config},
          {"reps", reps},     {"wall_seconds", wall_seconds},
          {"cells", jc}};
}

std::vector<std::filesystem::path> CampaignResult::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  std::vector<std::string> tables;
  for (const Cell& c : cells) {
    if (std::find(tables.begin(), tables.end(), c.table) == tables.end()) tables.push_back(c.table);
  }
  for (const auto& table : tables) {
    std::set<std::string> label_keys, value_keys;
    for (const Cell& c : cells) {
      if (c.table != table) continue;
      for (const auto& [k, v] : c.labels) label_keys.insert(k);
      for (const auto& [k, v] : c.values) value_keys.insert(k);
    }
    const auto path = dir / fmt::format("{}_{}.csv", name, table);
    std::ofstream out(path);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    bool first = true;
    for (const auto& k : label_keys) out << (first ? "" : ",") << k, first = false;
    for (const auto& k : value_keys) out << (first ? "" : ",") << k, first = false;
    out << ",reps\n";
    for (const Cell& c : cells) {
      if (c.table != table) continue;
      first = true;
      for (const auto& k : label_keys) {
        const auto it = c.labels.find(k);
        out << (first ? "" : ",") << (it == c.labels.end() ? "" : it->second);
        first = false;
      }
      for (const auto& k : value_keys) {
        const auto it = c.values.find(k);
        out << (first ? "" : ",") << (it == c.values.end() ? "" : fmt::format("{:.17g}", it->second));
        first = false;
      }
      out << ',' << c.reps << '\n';
    }
    files.push_back(path);
  }
  json manifest = {
      {"format_version", kFormatVersion},
      {"campaign", campaign_name(campaign)},
      {"name", name},
      {"config", config},
      {"config_hash", fmt::format("{:016x}", hash_tag(config.dump()))},
      {"reps", reps},
      {"wall_seconds", wall_seconds},
      {"kernel", kernels::active().name},
      {"compiler", __VERSION__},
      {"files", json::array()},
  };
  for (const auto& f : files) manifest["files"].push_back(f.filename().string());
  const auto mpath = dir / fmt::format("{}_manifest.json", name);
  std::ofstream(mpath) << manifest.dump(2) << '\n';
  files.push_back(mpath);
  return files;
}

namespace {

using Clock = std::chrono::steady_clock;

// Replication stream keyed by (seed, campaign, scenario, rep).
RngStream rep_stream(const CampaignConfig& c, std::size_t scenario, std::size_t rep) {
  return RngStream(c.seed, {hash_tag(campaign_name(c.campaign)), scenario, rep});
}

BivariateSample draw_sample(const TailCopulaModel& model, std::size_t n, const RngStream& stream) {
  RngStream rng = stream;
  return sample_copula(model, n, rng);
}

std::vector<Point> points_of(const std::vector<double>& angles) {
  std::vector<Point> pts;
  for (double phi : angles) pts.push_back(angular_point(phi));
  return pts;
}

std::uint64_t kind_tag(const std::string& kind) { return hash_tag(kind); }

CampaignResult start(const CampaignConfig& c) {
  CampaignResult r;
  r.campaign = c.campaign;
  r.name = c.name;
  r.config = c.raw;
  r.config["effective_reps"] = c.effective_reps();
  r.reps = c.effective_reps();
  return r;
}

void finish(CampaignResult& r, const CampaignConfig& c, Clock::time_point t0) {
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!c.output.empty()) r.write(c.output);
}

TestOptions test_options(const CampaignConfig& c) {
  TestOptions o;
  o.scheme = c.multipliers;
  o.grid = AngularGrid::midpoint(c.grid_nodes);
  o.form = c.form;
  o.threads = 1;
  return o;
}

}  // namespace

CampaignResult run_mse_sweep(const CampaignConfig& c, const HarnessHooks& hooks) {
  const auto t0 = Clock::now();
  CampaignResult result = start(c);
  const std::size_t reps = result.reps;
  const auto pts = points_of(c.angles);
  const std::size_t P = pts.size(), K = c.ks.size();
  for (std::size_t m = 0; m < c.models.size(); ++m) {
    const TailCopulaModel model = c.models[m].model();
    // estimates[rep][k][p]
    std::vector<std::vector<double>> est(reps, std::vector<double>(K * P));
    parallel_for(reps, c.threads, [&](std::size_t rep, unsigned) {
      const BivariateSample s = draw_sample(model, c.n, rep_stream(c, m, rep).child(StreamRole::Data));
      for (std::size_t ki = 0; ki < K; ++ki) {
        const int k = c.ks[ki].estimate;
        if (hooks.estimator) {
          for (std::size_t p = 0; p < P; ++p) est[rep][ki * P + p] = hooks.estimator(s, k, pts[p], model);
        } else {
          const EmpiricalTailCopula etc(s, k);
          for (std::size_t p = 0; p < P; ++p) est[rep][ki * P + p] = etc.eval(pts[p], c.form);
        }
      }
    });
    double best_mse = kInf;
    int best_k = 0;
    for (std::size_t ki = 0; ki < K; ++ki) {
      double mse_avg = 0.0, var_avg = 0.0, bias2_avg = 0.0;
      for (std::size_t p = 0; p < P; ++p) {
        const double truth = model.eval(pts[p]);
        double mean = 0.0;
        for (std::size_t r = 0; r < reps; ++r) mean += est[r][ki * P + p];
        mean /= static_cast<double>(reps);
        double var = 0.0, mse = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
          const double v = est[r][ki * P + p];
          var += (v - mean) * (v - mean);
          mse += (v - truth) * (v - truth);
        }
        var /= static_cast<double>(reps);
        mse /= static_cast<double>(reps);
        const double bias2 = (mean - truth) * (mean - truth);
        result.cells.push_back({"mse_points",
                                {{"model", c.models[m].label()},
                                 {"k", c.ks[ki].label()},
                                 {"angle", format_label(c.angles[p])}},
                                {{"mean", mean}, {"truth", truth}, {"mse", mse}, {"var", var}, {"bias2", bias2}},
                                reps});
        mse_avg += mse / P;
        var_avg += var / P;
        bias2_avg += bias2 / P;
      }
      result.cells.push_back({"mse",
                              {{"model", c.models[m].label()}, {"k", c.ks[ki].label()}},
                              {{"mse", mse_avg}, {"var", var_avg}, {"bias2", bias2_avg}},
                              reps});
      if (mse_avg < best_mse) best_mse = mse_avg, best_k = c.ks[ki].estimate;
    }
    result.cells.push_back({"argmin",
                            {{"model", c.models[m].label()}},
                            {{"k", static_cast<double>(best_k)}, {"mse", best_mse}},
                            reps});
  }
  finish(result, c, t0);
  return result;
}

CampaignResult run_cov_table(const CampaignConfig& c, const HarnessHooks&) {
  const auto t0 = Clock::now();
  CampaignResult result = start(c);
  const std::size_t reps = result.reps;
  const auto pts = points_of(c.angles);
  const std::size_t P = pts.size();
  const std::size_t PP = P * P;
  for (std::size_t m = 0; m < c.models.size(); ++m) {
    const TailCopulaModel model = c.models[m].model();
    const auto truth = true_cov_matrix(model, pts);
    const std::string mlabel = c.models[m].label();
    for (std::size_t i = 0; i < P; ++i) {
      for (std::size_t j = i; j < P; ++j) {
        result.cells.push_back({"true_cov",
                                {{"model", mlabel}, {"i", std::to_string(i + 1)}, {"j", std::to_string(j + 1)}},
                                {{"value", truth[i * P + j]}},
                                1});
      }
    }
    for (std::size_t ki = 0; ki < c.ks.size(); ++ki) {
      const int k = c.ks[ki].estimate;
      const std::size_t nk = c.kinds.size();
      // per rep: the tail copula process at the points, then one covariance matrix per bootstrap kind
      std::vector<std::vector<double>> rec(reps, std::vector<double>(P + nk * PP, 0.0));
      parallel_for(reps, c.threads, [&](std::size_t rep, unsigned) {
        const RngStream stream = rep_stream(c, m, rep);
        const BivariateSample s = draw_sample(model, c.n, stream.child(StreamRole::Data));
        const EmpiricalTailCopula etc(s, k);
        auto& out = rec[rep];
        for (std::size_t p = 0; p < P; ++p) {
          out[p] = std::sqrt(static_cast<double>(k)) * (etc.eval(pts[p], c.form) - model.eval(pts[p]));
        }
        for (std::size_t q = 0; q < nk; ++q) {
          if (c.kinds[q] == "sampling") continue;
          const BootstrapKind kind = parse_kind(c.kinds[q]);
          const StreamRole role = kind == BootstrapKind::Resample ? StreamRole::Resample : StreamRole::Weights;
          EnsembleOptions eo;
          eo.form = c.form;
          const auto ens = build_ensemble(kind, s, k, c.B, pts, c.multipliers,
                                          stream.child(role).child(ki).child(kind_tag(c.kinds[q])), eo);
          const auto cov = ens.covariance();
          std::copy(cov.begin(), cov.end(), out.begin() + P + q * PP);
        }
      });
      for (std::size_t q = 0; q < nk; ++q) {
        if (c.kinds[q] == "sampling") {
          std::vector<double> mean(P, 0.0);
          for (const auto& r : rec) {
            for (std::size_t p = 0; p < P; ++p) mean[p] += r[p];
          }
          for (auto& v : mean) v /= static_cast<double>(reps);
          for (std::size_t i = 0; i < P; ++i) {
            for (std::size_t j = i; j < P; ++j) {
              double cov = 0.0;
              for (const auto& r : rec) cov += (r[i] - mean[i]) * (r[j] - mean[j]);
              cov /= static_cast<double>(std::max<std::size_t>(reps, 2) - 1);
              result.cells.push_back({"sampling_cov",
                                      {{"model", mlabel}, {"k", c.ks[ki].label()},
                                       {"i", std::to_string(i + 1)}, {"j", std::to_string(j + 1)}},
                                      {{"cov", cov}, {"true", truth[i * P + j]}},
                                      reps});
            }
          }
          continue;
        }
        for (std::size_t i = 0; i < P; ++i) {
          for (std::size_t j = i; j < P; ++j) {
            const std::size_t off = P + q * PP + i * P + j;
            const double t = truth[i * P + j];
            double mean = 0.0;
            for (const auto& r : rec) mean += r[off];
            mean /= static_cast<double>(reps);
            double var = 0.0, mse = 0.0;
            for (const auto& r : rec) {
              var += (r[off] - mean) * (r[off] - mean);
              mse += (r[off] - t) * (r[off] - t);
            }
            var /= static_cast<double>(reps);
            mse /= static_cast<double>(reps);
            result.cells.push_back({"bootstrap_cov",
                                    {{"model", mlabel}, {"k", c.ks[ki].label()}, {"kind", c.kinds[q]},
                                     {"i", std::to_string(i + 1)}, {"j", std::to_string(j + 1)}},
                                    {{"mean", mean}, {"true", t}, {"mse", mse}, {"var", var},
                                     {"bias2", (mean - t) * (mean - t)},
                                     {"se", std::sqrt(var / static_cast<double>(reps))}},
                                    reps});
          }
        }
      }
    }
  }
  finish(result, c, t0);
  return result;
}

namespace {

void push_rates(CampaignResult& result, const CampaignConfig& c,
                const std::map<std::string, std::string>& base,
                const std::vector<std::vector<std::uint8_t>>& decisions, std::size_t reps) {
  const std::size_t A = c.alphas.size();
  for (std::size_t q = 0; q < c.kinds.size(); ++q) {
    for (std::size_t a = 0; a < A; ++a) {
      std::size_t hits = 0;
      for (const auto& d : decisions) hits += d[q * A + a];
      auto labels = base;
      labels["kind"] = c.kinds[q];
      labels["alpha"] = format_label(c.alphas[a]);
      result.cells.push_back({"rejection", labels,
                              {{"rate", static_cast<double>(hits) / static_cast<double>(reps)}}, reps});
    }
  }
}

}  // namespace

CampaignResult run_equality_test(const CampaignConfig& c, const HarnessHooks&) {
  const auto t0 = Clock::now();
  CampaignResult result = start(c);
  const std::size_t reps = result.reps;
  const TestOptions opts = test_options(c);
  const std::size_t A = c.alphas.size();
  for (std::size_t s = 0; s < c.pairs.size(); ++s) {
    const TailCopulaModel mx = c.pairs[s].first.model();
    const TailCopulaModel my = c.pairs[s].second.model();
    for (std::size_t ki = 0; ki < c.ks.size(); ++ki) {
      const int k = c.ks[ki].estimate;
      std::vector<std::vector<std::uint8_t>> decisions(reps, std::vector<std::uint8_t>(c.kinds.size() * A));
      parallel_for(reps, c.threads, [&](std::size_t rep, unsigned) {
        const RngStream stream = rep_stream(c, s, rep);
        const auto data = stream.child(StreamRole::Data);
        const BivariateSample x = draw_sample(mx, c.n, data.child(1));
        const BivariateSample y = draw_sample(my, c.n, data.child(2));
        for (std::size_t q = 0; q < c.kinds.size(); ++q) {
          const auto report = two_sample_test(
              x, y, k, k, c.B, c.alphas.front(), parse_kind(c.kinds[q]),
              stream.child(StreamRole::Weights).child(ki).child(kind_tag(c.kinds[q])), opts);
          for (std::size_t a = 0; a < A; ++a) decisions[rep][q * A + a] = report.rejects_at(c.alphas[a]);
        }
      });
      push_rates(result, c,
                 {{"x", c.pairs[s].first.label()}, {"y", c.pairs[s].second.label()}, {"k", c.ks[ki].label()}},
                 decisions, reps);
    }
  }
  finish(result, c, t0);
  return result;
}

CampaignResult run_ci_coverage(const CampaignConfig& c, const HarnessHooks&) {
  const auto t0 = Clock::now();
  CampaignResult result = start(c);
  const std::size_t reps = result.reps;
  const TestOptions opts = test_options(c);
  const std::size_t A = c.alphas.size();
  for (std::size_t m = 0; m < c.models.size(); ++m) {
    const ModelSpec& spec = c.models[m];
    const TailCopulaModel model = spec.model();
    for (std::size_t ki = 0; ki < c.ks.size(); ++ki) {
      const KSpec ks = c.ks[ki];
      const std::size_t nk = c.kinds.size();
      // per rep and kind: theta_hat, then (covered, width) per level
      std::vector<std::vector<double>> rec(reps, std::vector<double>(nk * (1 + 2 * A)));
      parallel_for(reps, c.threads, [&](std::size_t rep, unsigned) {
        const RngStream stream = rep_stream(c, m, rep);
        const BivariateSample s = draw_sample(model, c.n, stream.child(StreamRole::Data));
        for (std::size_t q = 0; q < nk; ++q) {
          MDOptions md;
          md.k_bootstrap = ks.bootstrap;
          md.shape = spec.shape;
          const auto est = md_inference(s, ks.estimate, spec.family, c.B, c.alphas.front(),
                                        parse_kind(c.kinds[q]),
                                        stream.child(StreamRole::Weights).child(ki).child(kind_tag(c.kinds[q])),
                                        opts, md);
          double* out = rec[rep].data() + q * (1 + 2 * A);
          out[0] = est.theta_hat;
          for (std::size_t a = 0; a < A; ++a) {
            const Interval ci = est.interval(c.alphas[a]);
            out[1 + 2 * a] = ci.contains(spec.theta) ? 1.0 : 0.0;
            out[2 + 2 * a] = ci.upper - ci.lower;
          }
        }
      });
      for (std::size_t q = 0; q < nk; ++q) {
        double mean_theta = 0.0;
        for (const auto& r : rec) mean_theta += r[q * (1 + 2 * A)];
        mean_theta /= static_cast<double>(reps);
        for (std::size_t a = 0; a < A; ++a) {
          double covered = 0.0, width = 0.0;
          for (const auto& r : rec) {
            covered += r[q * (1 + 2 * A) + 1 + 2 * a];
            width += r[q * (1 + 2 * A) + 2 + 2 * a];
          }
          result.cells.push_back({"coverage",
                                  {{"model", spec.label()}, {"k", ks.label()}, {"kind", c.kinds[q]},
                                   {"level", format_label(1.0 - c.alphas[a])}},
                                  {{"coverage", covered / static_cast<double>(reps)},
                                   {"mean_width", width / static_cast<double>(reps)},
                                   {"mean_theta_hat", mean_theta},
                                   {"theta", spec.theta},
                                   {"ci_scaling_k", static_cast<double>(ks.estimate)}},
                                  reps});
        }
      }
      if (c.with_sigma2) {
        result.cells.push_back({"sigma2",
                                {{"model", spec.label()}},
                                {{"sigma2", analytic_md_variance(model, opts.grid)}},
                                1});
      }
    }
  }
  finish(result, c, t0);
  return result;
}

CampaignResult run_gof(const CampaignConfig& c, const HarnessHooks&) {
  const auto t0 = Clock::now();
  CampaignResult result = start(c);
  const std::size_t reps = result.reps;
  const TestOptions opts = test_options(c);
  const std::size_t A = c.alphas.size();
  for (std::size_t m = 0; m < c.models.size(); ++m) {
    const TailCopulaModel model = c.models[m].model();
    for (std::size_t ki = 0; ki < c.ks.size(); ++ki) {
      const int k = c.ks[ki].estimate;
      std::vector<std::vector<std::uint8_t>> decisions(reps, std::vector<std::uint8_t>(c.kinds.size() * A));
      parallel_for(reps, c.threads, [&](std::size_t rep, unsigned) {
        const RngStream stream = rep_stream(c, m, rep);
        const BivariateSample s = draw_sample(model, c.n, stream.child(StreamRole::Data));
        for (std::size_t q = 0; q < c.kinds.size(); ++q) {
          const auto report = gof_test(
              s, k, c.null_family, c.B, c.alphas.front(), parse_kind(c.kinds[q]),
              stream.child(StreamRole::Weights).child(ki).child(kind_tag(c.kinds[q])), opts);
          for (std::size_t a = 0; a < A; ++a) decisions[rep][q * A + a] = report.rejects_at(c.alphas[a]);
        }
      });
      push_rates(result, c,
                 {{"model", c.models[m].label()},
                  {"null", std::string(family_name(c.null_family))},
                  {"k", c.ks[ki].label()}},
                 decisions, reps);
    }
  }
  finish(result, c, t0);
  return result;
}

CampaignResult run_campaign(const CampaignConfig& config, const HarnessHooks& hooks) {
  switch (config.campaign) {
    case Campaign::MseSweep: return run_mse_sweep(config, hooks);
    case Campaign::CovTable: return run_cov_table(config, hooks);
    case Campaign::EqualityTest: return run_equality_test(config, hooks);
    case Campaign::CiCoverage: return run_ci_coverage(config, hooks);
    case Campaign::GofTest: return run_gof(config, hooks);
  }
  throw ConfigError("unknown campaign");
}

}  // namespace tailcop
