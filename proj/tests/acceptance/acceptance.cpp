// Acceptance run: one PASS/FAIL line per criterion. The property suite runs
// first; the Monte Carlo criteria are only attempted when it passes.
//
//   acceptance [--only N]... [--threads T]
#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tailcop/bootstrap.hpp"
#include "tailcop/estimators.hpp"
#include "tailcop/harness.hpp"
#include "tailcop/inference.hpp"
#include "tailcop/models.hpp"

using namespace tailcop;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kSeed = 20240611;
unsigned g_threads = 0;
// Reproduction campaigns count ranks up to floor(k x). The reference sampling
// covariances are matched by this form; the ceil(k x) form runs about 5% high.
std::string g_form = "rank";

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, std::string what) {
    if (!ok) pass = false;
    notes.push_back(fmt::format("    [{}] {}", ok ? "ok" : "MISS", what));
  }
};

json clayton(double lambda) { return {{"family", "clayton"}, {"lambda", lambda}}; }

CampaignResult run(json config) {
  config["seed"] = kSeed;
  config["threads"] = g_threads;
  config["form"] = g_form;
  return run_campaign(CampaignConfig::from_json(config));
}

std::string ij(int i, int j) { return fmt::format("({},{})", i, j); }

// ---------------------------------------------------------------------------
// 8. property suite

Outcome properties() {
  Outcome o;
  const Family families[] = {Family::Clayton, Family::ConvexClayton, Family::AsymNegLogistic,
                             Family::Mixed};
  const auto models_of = [](Family f) {
    std::vector<TailCopulaModel> ms;
    const std::vector<double> thetas = f == Family::Mixed ? std::vector<double>{0.2, 0.6, 1.0}
                                                          : std::vector<double>{0.5, 1.0, 3.0};
    for (double t : thetas) ms.emplace_back(f, t);
    return ms;
  };

  // homogeneity, groundedness, bounds
  {
    double worst_hom = 0.0, worst_ground = 0.0;
    bool bounded = true;
    for (Family f : families) {
      for (const auto& m : models_of(f)) {
        for (int i = 0; i <= 20; ++i) {
          for (int j = 0; j <= 20; ++j) {
            const Point x{0.15 * i, 0.15 * j};
            const double v = m.eval(x);
            bounded &= v >= 0.0 && v <= std::min(x.x1, x.x2) + 1e-15;
            for (double c : {0.3, 2.0, 7.5}) {
              worst_hom = std::max(worst_hom, std::abs(m.eval({c * x.x1, c * x.x2}) - c * v));
            }
          }
          worst_ground = std::max({worst_ground, std::abs(m.eval({0.15 * i, 0.0})),
                                   std::abs(m.eval({0.0, 0.15 * i}))});
        }
      }
    }
    o.check(worst_hom < 1e-12, fmt::format("homogeneity grid, max error {:.2e}", worst_hom));
    o.check(worst_ground == 0.0, "groundedness on both axes");
    o.check(bounded, "0 <= Lambda(x) <= min(x1, x2) on the grid");
  }

  // analytic partials against central differences
  {
    double worst = 0.0, worst_theta = 0.0;
    for (Family f : families) {
      for (const auto& m : models_of(f)) {
        for (int j = 1; j < 20; ++j) {
          const Point x = angular_point(j * kPi / 40);
          const double h = 1e-5;
          const double d1 = (m.eval({x.x1 + h, x.x2}) - m.eval({x.x1 - h, x.x2})) / (2 * h);
          const double d2 = (m.eval({x.x1, x.x2 + h}) - m.eval({x.x1, x.x2 - h})) / (2 * h);
          worst = std::max({worst, std::abs(d1 - m.partial(x, 1)), std::abs(d2 - m.partial(x, 2))});
          const double th = m.theta(), e = 1e-5;
          if (f == Family::Mixed && th + e > 1.0) continue;
          const double dt = (m.with_theta(th + e).eval(x) - m.with_theta(th - e).eval(x)) / (2 * e);
          worst_theta = std::max(worst_theta, std::abs(dt - m.dtheta(x)));
        }
      }
    }
    o.check(worst < 1e-6, fmt::format("coordinate partials vs finite differences, max {:.2e}", worst));
    o.check(worst_theta < 1e-6, fmt::format("theta derivatives vs finite differences, max {:.2e}", worst_theta));
  }

  // axis limit and the discontinuity of the first partial at the origin
  {
    double worst = 0.0;
    bool jump = true;
    for (Family f : families) {
      const std::vector<double> thetas = f == Family::Mixed ? std::vector<double>{0.4, 1.0}
                                                            : std::vector<double>{1.0, 2.0, 4.0};
      for (double t : thetas) {
        const TailCopulaModel m(f, t);
        for (double x2 : {0.3, 1.0, 5.0}) {
          worst = std::max(worst, std::abs(m.partial({0.0, x2}, 1) - m.eval({1.0, 1e6})));
        }
        jump &= m.partial({0.0, 0.0}, 1) == 0.0 && m.partial({0.0, 1.0}, 1) > 0.1;
      }
    }
    o.check(worst < 1e-4, fmt::format("d1 Lambda(0, x) = Lambda(1, 1e6), max deviation {:.2e}", worst));
    o.check(jump, "d1 Lambda(0, 0) = 0 differs from d1 Lambda(0, x) > 0");
  }

  // quadrature self-consistency
  {
    const auto g100 = AngularGrid::midpoint(100), g400 = AngularGrid::midpoint(400),
               g1000 = AngularGrid::midpoint(1000);
    const TailCopulaModel c05(Family::Clayton, 0.5);
    const double s100 = analytic_md_variance(c05, g100), s400 = analytic_md_variance(c05, g400);
    o.check(std::abs(s100 - s400) < 1e-4 * s400,
            fmt::format("sigma2 at 100 vs 400 nodes: {:.6f} vs {:.6f}", s100, s400));
    double worst = 0.0;
    for (Family f : families) {
      const TailCopulaModel a(f, f == Family::Mixed ? 0.6 : 1.0), b(f, f == Family::Mixed ? 0.3 : 2.0);
      const double d1 = angular_distance(model_curve(a, g100), model_curve(b, g100), g100);
      const double d2 = angular_distance(model_curve(a, g1000), model_curve(b, g1000), g1000);
      worst = std::max(worst, std::abs(d1 - d2) / d2);
    }
    o.check(worst < 1e-4, fmt::format("distance at 100 vs 1000 nodes, max relative {:.2e}", worst));
  }

  // PSD of oracle covariance matrices
  {
    std::vector<Point> pts;
    for (int j = 0; j < 10; ++j) pts.push_back(angular_point((j + 0.5) * kPi / 20));
    double min_eig = 1.0;
    for (Family f : families) {
      for (const auto& m : models_of(f)) {
        const auto c = true_cov_matrix(m, pts);
        const Eigen::Map<const Eigen::Matrix<double, 10, 10, Eigen::RowMajor>> M(c.data());
        min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 10, 10>>(M).eigenvalues().minCoeff());
      }
    }
    o.check(min_eig >= -1e-10, fmt::format("oracle covariance minimum eigenvalue {:.2e}", min_eig));
  }

  // rank invariance
  {
    RngStream rng(kSeed, {8});
    const auto s = sample_copula(TailCopulaModel(Family::Clayton, 0.5), 1000, rng);
    std::vector<double> a(s.column(1).begin(), s.column(1).end()), b(s.column(2).begin(), s.column(2).end());
    for (auto& v : a) v = std::log(v) * 3.0 + 1.0;
    for (auto& v : b) v = std::tan(kPi * (v - 0.5));
    const BivariateSample t(a, b);
    bool same = true;
    for (int k : {50, 200}) {
      for (Tail tail : {Tail::Lower, Tail::Upper}) {
        const EmpiricalTailCopula e1(s, k, tail), e2(t, k, tail);
        for (int i = 0; i <= 30; ++i) {
          const Point x = angular_point(i * kPi / 60);
          same &= e1.rank_form(x) == e2.rank_form(x) && e1.copula_form(x) == e2.copula_form(x);
        }
      }
    }
    const auto g = AngularGrid::midpoint();
    for (BootstrapKind kind : {BootstrapKind::Beta, BootstrapKind::PDM, BootstrapKind::DM, BootstrapKind::Resample}) {
      const auto e1 = build_ensemble(kind, s, 50, 20, g.points(), MultiplierScheme::two_point(), RngStream(kSeed));
      const auto e2 = build_ensemble(kind, t, 50, 20, g.points(), MultiplierScheme::two_point(), RngStream(kSeed));
      same &= e1.draws == e2.draws;
    }
    same &= md_estimate(s, 50, Family::Clayton, g, default_theta_bounds(Family::Clayton)) ==
            md_estimate(t, 50, Family::Clayton, g, default_theta_bounds(Family::Clayton));
    o.check(same, "estimators, ensembles and the fit are bit-identical after monotone transforms");
  }

  // determinism under the parallelism degree
  {
    const json configs[] = {
        {{"campaign", "cov-table"}, {"n", 500}, {"k", 40}, {"reps", 6}, {"B", 50}, {"angles", "pi/8"},
         {"kinds", {"sampling", "pdm", "dm", "resample"}}, {"models", {clayton(0.25)}}},
        {{"campaign", "gof-test"}, {"n", 500}, {"k", 40}, {"reps", 4}, {"B", 50}, {"models", {clayton(0.5)}}},
    };
    bool same = true;
    for (json j : configs) {
      j["seed"] = kSeed;
      j["threads"] = 1;
      const auto a = run_campaign(CampaignConfig::from_json(j));
      j["threads"] = 4;
      const auto b = run_campaign(CampaignConfig::from_json(j));
      same &= a.cells.size() == b.cells.size();
      for (std::size_t i = 0; same && i < a.cells.size(); ++i) same &= a.cells[i].values == b.cells[i].values;
    }
    o.check(same, "campaign results identical with 1 and 4 threads");
  }
  return o;
}

// ---------------------------------------------------------------------------
// 1. analytic oracle

Outcome oracle() {
  Outcome o;
  const TailCopulaModel m(Family::Clayton, solve_theta_for_lambda(Family::Clayton, 0.25));
  const double table[3][3] = {{0.0874, 0.0754, 0.0516}, {0, 0.1160, 0.0754}, {0, 0, 0.0874}};
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      const double v = true_cov_Ghat(m, angular_point((i + 1) * kPi / 8), angular_point((j + 1) * kPi / 8));
      o.check(std::abs(v - table[i][j]) <= 5e-4, fmt::format("{} {:.5f} vs {:.4f}", ij(i + 1, j + 1), v, table[i][j]));
    }
  }
  return o;
}

// ---------------------------------------------------------------------------
// 2. sampling covariance of the tail copula process

Outcome sampling() {
  Outcome o;
  const auto r = run({{"campaign", "cov-table"}, {"n", 1000}, {"k", 50}, {"reps", 50000},
                      {"angles", "pi/8"}, {"kinds", {"sampling"}}, {"models", {clayton(0.25)}}});
  const double table[3][3] = {{0.0889, 0.0737, 0.0476}, {0, 0.1218, 0.0741}, {0, 0, 0.0892}};
  for (int i = 1; i <= 3; ++i) {
    for (int j = i; j <= 3; ++j) {
      const double v = r.value("sampling_cov", {{"i", std::to_string(i)}, {"j", std::to_string(j)}}, "cov");
      const double t = table[i - 1][j - 1];
      o.check(std::abs(v - t) <= 0.006, fmt::format("{} {:.4f} vs {:.4f}", ij(i, j), v, t));
    }
  }
  return o;
}

// ---------------------------------------------------------------------------
// 3. averaged bootstrap covariances

Outcome bootstrap_cov() {
  Outcome o;
  const auto r = run({{"campaign", "cov-table"}, {"n", 1000}, {"k", 50}, {"reps", 200}, {"B", 500},
                      {"angles", "pi/8"}, {"kinds", {"pdm", "dm", "resample"}}, {"models", {clayton(0.25)}}});
  struct Row { const char* kind; double v[3][3]; };
  // The dm (2,3) entry is printed as 0.707; the neighbouring entries place it
  // at 0.0707, which is the value checked.
  const Row rows[] = {{"pdm", {{0.094, 0.072, 0.046}, {0, 0.130, 0.072}, {0, 0, 0.094}}},
                      {"dm", {{0.100, 0.071, 0.045}, {0, 0.136, 0.0707}, {0, 0, 0.099}}},
                      {"resample", {{0.100, 0.070, 0.043}, {0, 0.136, 0.070}, {0, 0, 0.099}}}};
  for (const auto& row : rows) {
    for (int i = 1; i <= 3; ++i) {
      for (int j = i; j <= 3; ++j) {
        const auto* cell = r.find("bootstrap_cov", {{"kind", row.kind}, {"i", std::to_string(i)}, {"j", std::to_string(j)}});
        const double v = cell->values.at("mean"), t = row.v[i - 1][j - 1];
        o.check(std::abs(v - t) <= 0.01, fmt::format("{} {} {:.4f} vs {:.4f} (se {:.4f}, mse x1e4 {:.2f})", row.kind, ij(i, j), v,
                                                     t, cell->values.at("se"), 1e4 * cell->values.at("mse")));
      }
    }
  }
  return o;
}

// ---------------------------------------------------------------------------
// 4. the known-margins-free multiplier process targets the wrong covariance

double clayton_copula(double u, double v, double theta) {
  return std::pow(std::pow(u, -theta) + std::pow(v, -theta) - 1.0, -1.0 / theta);
}

Outcome beta_variance() {
  Outcome o;
  const auto r = run({{"campaign", "cov-table"}, {"n", 1000}, {"k", 50}, {"reps", 200}, {"B", 500},
                      {"angles", {kPi / 8}}, {"kinds", {"beta"}}, {"models", {clayton(0.25)}}});
  const auto* cell = r.find("bootstrap_cov", {{"kind", "beta"}, {"i", "1"}, {"j", "1"}});
  const double mean = cell->values.at("mean"), se = cell->values.at("se");
  const TailCopulaModel m(Family::Clayton, 0.5);
  const double target = m.eval(angular_point(kPi / 8));
  // Two-point multipliers make the conditional variance equal to the finite-level
  // estimate, whose mean is about (n/k) C(floor(k x1)/n, floor(k x2)/n) at n = 1000.
  const Point x = angular_point(kPi / 8);
  const double finite = 1000.0 / 50 * clayton_copula(std::floor(50 * x.x1) / 1000, std::floor(50 * x.x2) / 1000, 0.5);
  o.check(std::abs(mean - target) <= 0.01, fmt::format("variance {:.4f} vs Lambda(x) = {:.4f} (finite-level value {:.4f})",
                                                       mean, target, finite));
  o.check(std::abs(mean - 0.0874) > 5 * se, fmt::format("distance to 0.0874 is {:.1f} standard errors (se {:.5f})",
                                                        std::abs(mean - 0.0874) / se, se));
  return o;
}

// ---------------------------------------------------------------------------
// 5. level and power of the equality test

Outcome equality() {
  Outcome o;
  const auto r = run({{"campaign", "equality-test"}, {"n", 1000}, {"k", {50, 200}}, {"reps", 500}, {"B", 500},
                      {"alphas", {0.15, 0.1, 0.05}}, {"kinds", {"pdm", "dm"}},
                      {"pairs", {{clayton(0.25), clayton(0.25)}, {clayton(0.5), clayton(0.5)},
                                 {clayton(0.75), clayton(0.75)}, {clayton(0.25), clayton(0.75)}}}});
  struct Null { int k; double lambda; double pdm[3]; double dm[3]; };
  const Null nulls[] = {
      {50, 0.25, {0.143, 0.098, 0.054}, {0.125, 0.091, 0.052}},
      {50, 0.5, {0.140, 0.099, 0.047}, {0.108, 0.069, 0.036}},
      {50, 0.75, {0.117, 0.078, 0.029}, {0.068, 0.051, 0.023}},
      {200, 0.25, {0.145, 0.107, 0.052}, {0.125, 0.084, 0.044}},
      {200, 0.5, {0.128, 0.083, 0.037}, {0.140, 0.097, 0.051}},
      {200, 0.75, {0.141, 0.092, 0.041}, {0.103, 0.068, 0.035}},
  };
  const char* alphas[] = {"0.15", "0.1", "0.05"};
  for (const auto& n : nulls) {
    const std::string label = fmt::format("clayton({})", format_label(n.lambda));
    for (const char* kind : {"pdm", "dm"}) {
      for (int a = 0; a < 3; ++a) {
        const double v = r.value("rejection", {{"x", label}, {"y", label}, {"k", std::to_string(n.k)},
                                               {"kind", kind}, {"alpha", alphas[a]}}, "rate");
        const double t = std::strcmp(kind, "pdm") == 0 ? n.pdm[a] : n.dm[a];
        o.check(std::abs(v - t) <= 0.025,
                fmt::format("k={} lambda={} {} alpha={} rate {:.3f} vs {:.3f}", n.k, n.lambda, kind, alphas[a], v, t));
      }
    }
  }
  for (int k : {50, 200}) {
    for (const char* kind : {"pdm", "dm"}) {
      for (const char* a : alphas) {
        const double v = r.value("rejection", {{"x", "clayton(0.25)"}, {"y", "clayton(0.75)"}, {"k", std::to_string(k)},
                                               {"kind", kind}, {"alpha", a}}, "rate");
        o.check(v >= 0.99, fmt::format("k={} 0.25 vs 0.75 {} alpha={} power {:.3f}", k, kind, a, v));
      }
    }
  }
  return o;
}

// ---------------------------------------------------------------------------
// 6. confidence interval coverage

Outcome coverage() {
  Outcome o;
  const auto r = run({{"campaign", "ci-coverage"}, {"n", 1000}, {"k", {50, 200}}, {"reps", 500}, {"B", 500},
                      {"alphas", {0.1, 0.05}}, {"kinds", {"pdm"}},
                      {"models", {clayton(0.25), clayton(0.5), clayton(0.75)}}});
  struct Row { double lambda; double k50[2]; double k200[2]; };
  const Row rows[] = {{0.25, {0.895, 0.955}, {0.014, 0.044}},
                      {0.5, {0.893, 0.936}, {0.779, 0.882}},
                      {0.75, {0.838, 0.887}, {0.900, 0.949}}};
  const char* levels[] = {"0.9", "0.95"};
  for (const auto& row : rows) {
    const std::string label = fmt::format("clayton({})", format_label(row.lambda));
    for (int k : {50, 200}) {
      for (int l = 0; l < 2; ++l) {
        const auto* cell = r.find("coverage", {{"model", label}, {"k", std::to_string(k)}, {"level", levels[l]}});
        const double v = cell->values.at("coverage");
        const double t = k == 50 ? row.k50[l] : row.k200[l];
        o.check(std::abs(v - t) <= 0.03,
                fmt::format("lambda={} k={} level={} coverage {:.3f} vs {:.3f} (mean theta_hat {:.3f}, theta {:.3f})",
                            row.lambda, k, levels[l], v, t, cell->values.at("mean_theta_hat"), cell->values.at("theta")));
      }
    }
  }
  return o;
}

// ---------------------------------------------------------------------------
// 7. goodness of fit

Outcome gof() {
  Outcome o;
  const auto null = run({{"campaign", "gof-test"}, {"n", 1000}, {"k", {50, 200}}, {"reps", 500}, {"B", 500},
                         {"alphas", {0.15, 0.1, 0.05}}, {"kinds", {"pdm"}}, {"null_family", "clayton"},
                         {"models", {clayton(0.25), clayton(0.5), clayton(0.75)}}});
  struct Row { double lambda; double k50[3]; double k200[3]; };
  const Row rows[] = {{0.25, {0.124, 0.087, 0.037}, {0.174, 0.108, 0.049}},
                      {0.5, {0.097, 0.068, 0.032}, {0.117, 0.073, 0.039}},
                      {0.75, {0.091, 0.048, 0.018}, {0.091, 0.058, 0.024}}};
  const char* alphas[] = {"0.15", "0.1", "0.05"};
  for (const auto& row : rows) {
    const std::string label = fmt::format("clayton({})", format_label(row.lambda));
    for (int k : {50, 200}) {
      for (int a = 0; a < 3; ++a) {
        const double v = null.value("rejection", {{"model", label}, {"k", std::to_string(k)}, {"alpha", alphas[a]}}, "rate");
        const double t = k == 50 ? row.k50[a] : row.k200[a];
        o.check(std::abs(v - t) <= 0.025,
                fmt::format("clayton lambda={} k={} alpha={} rate {:.3f} vs {:.3f}", row.lambda, k, alphas[a], v, t));
      }
    }
  }
  const auto alt = run({{"campaign", "gof-test"}, {"n", 1000}, {"k", 200}, {"reps", 500}, {"B", 500},
                        {"alphas", {0.05}}, {"kinds", {"pdm"}}, {"null_family", "clayton"},
                        {"models", {{{"family", "aneglog"}, {"lambda", 0.6}}}}});
  const double power = alt.value("rejection", {{"alpha", "0.05"}}, "rate");
  o.check(power >= 0.99, fmt::format("aneglog lambda=0.6 k=200 alpha=0.05 power {:.3f}", power));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only.insert(std::atoi(argv[++i]));
    else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) g_threads = static_cast<unsigned>(std::atoi(argv[++i]));
    else if (std::strcmp(argv[i], "--form") == 0 && i + 1 < argc) g_form = argv[++i];
  }
  struct Criterion { int id; const char* title; std::function<Outcome()> run; };
  const Criterion criteria[] = {
      {8, "property suite", properties},
      {1, "analytic covariance oracle", oracle},
      {2, "sampling covariance of the tail copula process", sampling},
      {3, "averaged pdm/dm/resample covariances", bootstrap_cov},
      {4, "multiplier process with estimated margins", beta_variance},
      {5, "equality test level and power", equality},
      {6, "confidence interval coverage", coverage},
      {7, "goodness-of-fit level and power", gof},
  };
  bool all = true, properties_ok = true;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    if (c.id != 8 && c.id != 1 && !properties_ok) {
      fmt::print("FAIL criterion {}: {} (not attempted, property suite failed)\n", c.id, c.title);
      all = false;
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, fmt::format("exception: {}", e.what()));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& n : o.notes) fmt::print("{}\n", n);
    fmt::print("{} criterion {}: {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs);
    std::fflush(stdout);
    if (c.id == 8) properties_ok = o.pass;
    all &= o.pass;
  }
  return all ? 0 : 1;
}
