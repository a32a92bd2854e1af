#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anonroute/analysis.hpp"
#include "anonroute/error.hpp"
#include "anonroute/experiment.hpp"
#include "anonroute/graph.hpp"

using namespace anonroute;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an anonroute::Error");
  return Errc::invalid_argument;
}

std::string csv(const SweepResult& r) {
  std::ostringstream os;
  write_sweep_csv(os, r);
  return os.str();
}

SweepConfig small_complete() {
  SweepConfig cfg;
  cfg.graph.kind = GraphKind::complete;
  cfg.graph.n = 40;
  cfg.epsilon = 0.3;
  cfg.adversaries = {"first-step", "time-argmax"};
  cfg.t_hat = 2;
  cfg.w_grid = make_grid(3, 7, 1);
  cfg.trials = 4000;
  cfg.master_seed = 123;
  return cfg;
}

}  // namespace

TEST_CASE("grids") {
  CHECK(make_grid(3, 5, 1) == std::vector<double>{3, 4, 5});
  CHECK(make_grid(0.1, 0.3, 0.1).size() == 3);
  CHECK(make_grid(2, 2, 0.5) == std::vector<double>{2});
  CHECK(code_of([] { make_grid(1, 2, 0); }) == Errc::invalid_argument);
  CHECK(code_of([] { make_grid(3, 2, 1); }) == Errc::invalid_argument);
}

TEST_CASE("graph specs") {
  GraphSpec er{GraphKind::erdos_renyi, 30, 0.5, 1, 7};
  CHECK(build_graph(er, 0) == build_graph(er, 0));
  CHECK_FALSE(build_graph(er, 0) == build_graph(er, 1));
  CHECK(build_graph(er, 2) == make_erdos_renyi(30, 0.5, derive_seed(7, {2})));
  CHECK(density_of(er) == 0.5);

  GraphSpec clique{GraphKind::k_clique, 20, 1.0, 4, 1};
  CHECK(build_graph(clique) == make_k_clique(20, 4));
  CHECK(risk_target_for_graph(clique, 8, 0.3) ==
        doctest::Approx(1.0 / (16 * clique_rho(0.3, 20, 4) - 1 - c_eps(0.3))));
  GraphSpec complete{GraphKind::complete, 20, 1.0, 1, 1};
  CHECK(risk_target_for_graph(complete, 8, 0.3) == doctest::Approx(risk_target_for_delay(8, 1, 0.3)));
  CHECK(risk_target_for_graph(er, 8, 0.3) == doctest::Approx(risk_target_for_delay(8, 0.5, 0.3)));

  GraphSpec custom{GraphKind::custom, 5, 1.0, 1, 1};
  CHECK(code_of([&] { build_graph(custom); }) == Errc::configuration);
}

TEST_CASE("sweep configuration checks") {
  SweepConfig cfg = small_complete();
  CHECK(cfg.resolved_horizon() == 500);
  cfg.w_grid = {40};
  CHECK(cfg.resolved_horizon() == 800);
  cfg.horizon = 64;
  CHECK(cfg.resolved_horizon() == 64);

  SweepConfig bad = small_complete();
  bad.trials = 0;
  CHECK(code_of([&] { run_sweep(bad); }) == Errc::invalid_argument);
  bad = small_complete();
  bad.w_grid.clear();
  CHECK(code_of([&] { run_sweep(bad); }) == Errc::invalid_argument);
  bad = small_complete();
  bad.strategy = "asb";
  bad.q_grid = {0.1};
  CHECK(code_of([&] { run_sweep(bad); }) == Errc::configuration);
  bad = small_complete();
  bad.adversaries = {"bayes"};
  CHECK(code_of([&] { run_sweep(bad); }) == Errc::configuration);
  bad = small_complete();
  bad.strategy = "nope";
  CHECK(code_of([&] { run_sweep(bad); }) == Errc::configuration);

  SweepConfig er = small_complete();
  er.graph = {GraphKind::erdos_renyi, 30, 0.8, 1, 3};
  er.graph_instances = 3;
  er.goals_per_instance = 4;
  er.trials = 5;
  CHECK(er.episodes_per_point() == 60);
}

TEST_CASE("sweeps are identical for any worker count") {
  SweepConfig cfg = small_complete();
  cfg.workers = 1;
  const std::string one = csv(run_sweep(cfg));
  cfg.workers = 3;
  CHECK(csv(run_sweep(cfg)) == one);
  cfg.workers = 0;
  CHECK(csv(run_sweep(cfg)) == one);

  SweepConfig er = small_complete();
  er.graph = {GraphKind::erdos_renyi, 30, 0.8, 1, 3};
  er.graph_instances = 3;
  er.goals_per_instance = 4;
  er.trials = 50;
  er.workers = 1;
  const std::string a = csv(run_sweep(er));
  er.workers = 4;
  CHECK(csv(run_sweep(er)) == a);
}

TEST_CASE("stopping after the observed prefix does not change results") {
  SweepConfig cfg = small_complete();
  const std::string cut = csv(run_sweep(cfg));
  cfg.full_episodes = true;
  CHECK(csv(run_sweep(cfg)) == cut);
}

TEST_CASE("sweep output") {
  SweepConfig cfg = small_complete();
  cfg.epsilon = 0.7;
  cfg.w_grid = {3, 4, 6, 8, 10};
  const SweepResult r = run_sweep(cfg);
  CHECK(r.warnings.size() == 2);
  CHECK(r.warnings[0].w_target == 3);
  REQUIRE(r.points.size() == 3);
  for (std::size_t i = 1; i < r.points.size(); ++i)
    CHECK(r.points[i - 1].mean_delay <= r.points[i].mean_delay);

  const std::string text = csv(r);
  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "graph_kind,n,p,k,eps,w_target,q_bar,trials,mean_delay,delay_se,adversary,risk,risk_se,"
        "timeout_frac,bound_lower,bound_upper,seed");
  std::size_t rows = 0;
  for (std::string row; std::getline(lines, row);) {
    ++rows;
    CHECK(std::count(row.begin(), row.end(), ',') == 16);
  }
  CHECK(rows == 3 * 2);

  const auto j = nlohmann::json::parse(sweep_json(r));
  CHECK(j["points"].size() == 3);
  CHECK(j["warnings"].size() == 2);
  CHECK(j["points"][0]["risks"][1]["adversary"] == "time-argmax");
}

TEST_CASE("sweep points respect the delay floor and decrease in w") {
  SweepConfig cfg = small_complete();
  cfg.adversaries = {"first-step"};
  cfg.w_grid = make_grid(3, 9, 1);
  cfg.trials = 20000;
  const SweepResult r = run_sweep(cfg);
  for (const TradeoffPoint& pt : r.points) {
    const RiskEstimate& risk = pt.risks[0].risk;
    CHECK(pt.mean_delay > 0);
    CHECK(risk.risk >= 0.0);
    CHECK(risk.risk <= 1.0);
    CHECK(risk.risk >= 1.0 / (2 * pt.mean_delay + 1) - 3 * risk.std_err);
    CHECK(pt.timeout_frac == 0.0);
  }
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    const RiskEstimate& a = r.points[i - 1].risks[0].risk;
    const RiskEstimate& b = r.points[i].risks[0].risk;
    CHECK(b.risk <= a.risk + 2 * std::hypot(a.std_err, b.std_err));
  }
}

TEST_CASE("baseline strategies run through the sweep") {
  SweepConfig cfg = small_complete();
  cfg.strategy = "asb";
  cfg.w_grid = {2, 6};
  cfg.trials = 2000;
  const SweepResult r = run_sweep(cfg);
  CHECK(r.points.size() == 2);
  CHECK(std::isnan(r.points[0].q_bar));
  cfg.strategy = "greedy";
  CHECK(run_sweep(cfg).points.size() == 2);
}

TEST_CASE("membership experiment") {
  const MembershipSummary full = run_membership_experiment(60, 1.0, 5, 1);
  CHECK(full.rate == 1.0);
  CHECK(full.members == 5);
  CHECK(code_of([] { run_membership_experiment(60, 0.5, 0, 1); }) == Errc::invalid_argument);

  const MembershipSummary a = run_membership_experiment(200, 0.5, 12, 9, 1);
  const MembershipSummary b = run_membership_experiment(200, 0.5, 12, 9, 3);
  CHECK(a.members == b.members);
  CHECK(a.min_overlap == b.min_overlap);
  CHECK(a.gamma == doctest::Approx(default_gamma(200)));
}
