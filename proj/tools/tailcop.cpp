// Command-line front end: campaigns, estimation and tests on CSV data.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tailcop/bootstrap.hpp"
#include "tailcop/errors.hpp"
#include "tailcop/harness.hpp"
#include "tailcop/inference.hpp"
#include "tailcop/io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct DataArgs {
  std::string input;
  char delimiter = ',';
  bool header = false;
  bool ties_by_occurrence = false;

  void add(CLI::App* app, const std::string& flag, const std::string& what) {
    app->add_option(flag, input, what)->required();
    app->add_option("--delimiter", delimiter, "CSV field delimiter");
    app->add_flag("--header", header, "first row is a header");
    app->add_flag("--ties-by-occurrence", ties_by_occurrence, "break ties by row order");
  }

  tailcop::CsvOptions options() const {
    return {delimiter, header,
            ties_by_occurrence ? tailcop::TiePolicy::ByOccurrence : tailcop::TiePolicy::Error};
  }
};

void emit(const nlohmann::json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw tailcop::ConfigError(fmt::format("cannot write '{}'", path));
  out << j.dump(2) << '\n';
}

tailcop::BootstrapKind test_kind(const std::string& name) {
  const auto kind = tailcop::parse_kind(name);
  if (kind != tailcop::BootstrapKind::PDM && kind != tailcop::BootstrapKind::DM) {
    throw tailcop::ConfigError("--kind must be pdm or dm");
  }
  return kind;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail copula estimation, bootstrap inference and simulation campaigns"};
  app.require_subcommand(1);

  // run
  std::string config_path, run_output;
  std::optional<double> scale;
  std::optional<unsigned> run_threads;
  auto* run = app.add_subcommand("run", "run a Monte Carlo campaign from a JSON config");
  run->add_option("config", config_path, "campaign config file")->required();
  run->add_option("--scale", scale, "multiply the configured replication count");
  run->add_option("--threads", run_threads, "worker threads (0 = all cores)");
  run->add_option("--output", run_output, "output directory (overrides the config)");

  // estimate
  DataArgs est_data;
  int est_k = 0;
  std::size_t est_grid = 100;
  std::string est_tail = "lower", est_form = "copula", est_out;
  auto* estimate = app.add_subcommand("estimate", "empirical tail copula on an angular grid");
  est_data.add(estimate, "--input", "two-column CSV");
  estimate->add_option("--k", est_k, "threshold count")->required();
  estimate->add_option("--grid", est_grid, "number of angular nodes");
  estimate->add_option("--tail", est_tail, "lower | upper")->check(CLI::IsMember({"lower", "upper"}));
  estimate->add_option("--form", est_form, "copula | rank")->check(CLI::IsMember({"copula", "rank"}));
  estimate->add_option("--output", est_out, "CSV file (default stdout)");

  // shared test options
  std::size_t B = 500;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::string kind = "pdm", form = "copula", report_out;
  std::size_t grid_nodes = 100;
  unsigned threads = 1;
  bool with_boot = false;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--B", B, "bootstrap draws");
    sub->add_option("--alpha", alpha, "test level");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--kind", kind, "pdm | dm");
    sub->add_option("--grid", grid_nodes, "number of angular nodes");
    sub->add_option("--form", form, "copula | rank")->check(CLI::IsMember({"copula", "rank"}));
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    sub->add_option("--output", report_out, "JSON report file (default stdout)");
    sub->add_flag("--with-boot", with_boot, "include all bootstrap values in the report");
  };

  // test-equal
  DataArgs x_data, y_data;
  int k1 = 0, k2 = 0;
  auto* equal = app.add_subcommand("test-equal", "test equality of two tail copulas");
  x_data.add(equal, "--x", "CSV of the first sample");
  equal->add_option("--y", y_data.input, "CSV of the second sample")->required();
  equal->add_option("--k1", k1, "threshold count of the first sample")->required();
  equal->add_option("--k2", k2, "threshold count of the second sample")->required();
  add_common(equal);

  // gof
  DataArgs gof_data;
  std::string family = "clayton";
  int gof_k = 0;
  auto* gof = app.add_subcommand("gof", "goodness-of-fit test of a parametric family");
  gof_data.add(gof, "--input", "two-column CSV");
  gof->add_option("--family", family, "clayton | convex_clayton | aneglog | mixed");
  gof->add_option("--k", gof_k, "threshold count")->required();
  add_common(gof);

  // md
  DataArgs md_data;
  int md_k = 0, md_k_boot = 0;
  bool md_sigma2 = false;
  auto* md = app.add_subcommand("md", "minimum-distance estimate with bootstrap confidence interval");
  md_data.add(md, "--input", "two-column CSV");
  md->add_option("--family", family, "clayton | convex_clayton | aneglog | mixed");
  md->add_option("--k", md_k, "threshold count of the estimate")->required();
  md->add_option("--k-boot", md_k_boot, "threshold count of the bootstrap ensemble");
  md->add_flag("--sigma2", md_sigma2, "add the asymptotic variance at the fitted model");
  add_common(md);

  // bootstrap
  DataArgs ens_data;
  int ens_k = 0;
  std::string ens_out;
  auto* ensemble = app.add_subcommand("bootstrap", "export a bootstrap ensemble on the angular grid");
  ens_data.add(ensemble, "--input", "two-column CSV");
  ensemble->add_option("--k", ens_k, "threshold count")->required();
  ensemble->add_option("--out", ens_out, "ensemble CSV; metadata goes to <out>.json")->required();
  ensemble->add_option("--kind", kind, "known_margins | beta | pdm | dm | resample");
  ensemble->add_option("--B", B, "bootstrap draws");
  ensemble->add_option("--seed", seed, "random seed");
  ensemble->add_option("--grid", grid_nodes, "number of angular nodes");
  ensemble->add_option("--form", form, "copula | rank")->check(CLI::IsMember({"copula", "rank"}));
  ensemble->add_option("--threads", threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  using namespace tailcop;
  try {
    TestOptions opts;
    opts.grid = AngularGrid::midpoint(grid_nodes);
    opts.threads = threads;
    opts.form = form == "rank" ? EstimatorForm::Rank : EstimatorForm::Copula;

    if (*run) {
      CampaignConfig config = CampaignConfig::load(config_path);
      if (scale) config.scale = *scale;
      if (run_threads) config.threads = *run_threads;
      if (!run_output.empty()) config.output = run_output;
      const CampaignResult result = run_campaign(config);
      std::cout << result.to_json().dump(2) << '\n';
    } else if (*estimate) {
      if (est_grid == 0) throw ConfigError("--grid must be positive");
      const BivariateSample sample = read_sample_csv(est_data.input, est_data.options());
      const EmpiricalTailCopula etc(sample, est_k, est_tail == "upper" ? Tail::Upper : Tail::Lower);
      const AngularGrid grid = AngularGrid::midpoint(est_grid);
      std::vector<double> values(grid.size());
      const EstimatorForm form = est_form == "rank" ? EstimatorForm::Rank : EstimatorForm::Copula;
      for (std::size_t j = 0; j < grid.size(); ++j) values[j] = etc.eval(grid.points()[j], form);
      if (est_out.empty()) {
        write_angular_csv(grid.nodes(), values, std::cout);
      } else {
        std::ofstream out(est_out);
        if (!out) throw ConfigError(fmt::format("cannot write '{}'", est_out));
        write_angular_csv(grid.nodes(), values, out);
      }
    } else if (*equal) {
      y_data.delimiter = x_data.delimiter;
      y_data.header = x_data.header;
      y_data.ties_by_occurrence = x_data.ties_by_occurrence;
      const BivariateSample x = read_sample_csv(x_data.input, x_data.options());
      const BivariateSample y = read_sample_csv(y_data.input, y_data.options());
      const auto report = two_sample_test(x, y, k1, k2, B, alpha, test_kind(kind), RngStream(seed), opts);
      emit(report.to_json(with_boot), report_out);
    } else if (*gof) {
      const BivariateSample sample = read_sample_csv(gof_data.input, gof_data.options());
      const auto report = gof_test(sample, gof_k, parse_family(family), B, alpha, test_kind(kind),
                                   RngStream(seed), opts);
      emit(report.to_json(with_boot), report_out);
    } else if (*md) {
      const BivariateSample sample = read_sample_csv(md_data.input, md_data.options());
      MDOptions mo;
      mo.k_bootstrap = md_k_boot;
      mo.with_sigma2 = md_sigma2;
      const auto est = md_inference(sample, md_k, parse_family(family), B, alpha, test_kind(kind),
                                    RngStream(seed), opts, mo);
      emit(est.to_json(with_boot), report_out);
    } else if (*ensemble) {
      const BivariateSample sample = read_sample_csv(ens_data.input, ens_data.options());
      const AngularGrid grid = AngularGrid::midpoint(grid_nodes);
      EnsembleOptions eo;
      eo.threads = threads;
      eo.form = opts.form;
      const auto ens = build_ensemble(parse_kind(kind), sample, ens_k, B, grid.points(),
                                      MultiplierScheme::two_point(), RngStream(seed), eo);
      std::ofstream out(ens_out);
      if (!out) throw ConfigError(fmt::format("cannot write '{}'", ens_out));
      write_ensemble_csv(ens, out);
      std::ofstream(ens_out + ".json") << ensemble_metadata(ens).dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
