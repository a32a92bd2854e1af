#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "anonroute/adversary.hpp"
#include "anonroute/dynamics.hpp"
#include "anonroute/error.hpp"
#include "anonroute/graph.hpp"
#include "anonroute/oracle.hpp"
#include "anonroute/rng.hpp"
#include "anonroute/strategy.hpp"

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

std::vector<EpisodeRecord> simulate(const Graph& g, const Strategy& s, const EnvConfig& env,
                                    std::size_t count, std::uint64_t seed) {
  std::vector<EpisodeRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = make_rng(seed, {i});
    const VertexId goal = static_cast<VertexId>(uniform_index(rng, g.size()));
    out.push_back(run_episode(g, s, env, goal, rng));
  }
  return out;
}

}  // namespace

TEST_CASE("first-step and time-argmax predictions") {
  const std::vector<VertexId> states{3, 1, 4, 1, 5};
  const TrajectoryView view(states, 5);
  CHECK(first_step_prediction(view) == 3);
  CHECK(first_step_estimator()->predict(view) == 3);
  for (std::size_t t = 1; t <= 5; ++t) CHECK(time_argmax_prediction(view, t) == states[t - 1]);
  CHECK(time_argmax_estimator(1)->predict(view) == first_step_estimator()->predict(view));
  CHECK(time_argmax_estimator(4)->observation_horizon(10) == 4);
  CHECK(first_step_estimator()->observation_horizon(10) == 1);

  CHECK(code_of([&] { time_argmax_prediction(view, 6); }) == Errc::invalid_argument);
  CHECK(code_of([&] { time_argmax_prediction(view, 0); }) == Errc::invalid_argument);
  CHECK(code_of([] { time_argmax_estimator(0); }) == Errc::invalid_argument);

  const std::vector<VertexId> none;
  CHECK(code_of([&] { first_step_prediction(TrajectoryView(none, 0)); }) == Errc::empty_input);
}

TEST_CASE("MAP estimator: table lookup with lowest-index ties") {
  auto exact = std::make_shared<ExactDistribution>();
  exact->n = 3;
  exact->horizon = 1;
  const std::vector<VertexId> tie{1};
  const std::vector<VertexId> skew{2};
  exact->joint[exact->encode(tie)] = {0.1, 0.1, 0.1};
  exact->joint[exact->encode(skew)] = {0.1, 0.2, 0.4};
  const auto bayes = bayes_map_estimator(exact);
  CHECK(bayes->predict(TrajectoryView(tie, 1)) == 0);
  CHECK(bayes->predict(TrajectoryView(skew, 1)) == 2);
  const std::vector<VertexId> absent{0};
  CHECK(code_of([&] { bayes->predict(TrajectoryView(absent, 1)); }) == Errc::invalid_argument);
  CHECK(code_of([] { bayes_map_estimator(nullptr); }) == Errc::invalid_argument);
}

TEST_CASE("score_risk basics") {
  const Graph g = make_complete(6);
  const auto wf = water_filling(0.3, 0.2);
  std::vector<EpisodeRecord> eps;
  for (std::uint64_t i = 0; i < 500; ++i) {
    Rng rng = make_rng(3, {i});
    eps.push_back(run_episode(g, *wf, {0.2, 200, 0}, 2, rng));
  }
  SUBCASE("always predicting the goal") {
    const RiskEstimate r = score_risk(eps, *constant_estimator(2));
    CHECK(r.risk == 1.0);
    CHECK(r.correct_count == 500);
    CHECK(r.timeout_count == 0);
    CHECK(r.std_err == 0.0);
  }
  SUBCASE("a never-used vertex scores only timeouts") {
    const RiskEstimate r = score_risk(eps, *constant_estimator(5));
    CHECK(r.risk == 0.0);
  }
  SUBCASE("empty input") {
    const std::vector<EpisodeRecord> none;
    CHECK(code_of([&] { score_risk(none, *first_step_estimator()); }) == Errc::empty_input);
  }
}

TEST_CASE("timeouts add to correct guesses") {
  EpisodeRecord r;
  r.goal = 1;
  r.horizon = 2;
  r.states = {0, 0, 1};
  r.T = 3;
  r.T_IH = 3;
  RiskTally tally;
  tally.add(r, 0);
  CHECK(tally.estimate().risk == 1.0);
  tally.add(r, 1);
  const RiskEstimate e = tally.estimate();
  CHECK(e.correct_count == 1);
  CHECK(e.timeout_count == 2);
  CHECK(e.risk == 1.5);
  CHECK(std::isfinite(e.std_err));
}

TEST_CASE("score_risk is invariant under reordering and sharding") {
  const Graph g = make_erdos_renyi(20, 0.5, 2);
  const auto wf = water_filling(0.25, 0.3);
  std::vector<EpisodeRecord> eps = simulate(g, *wf, {0.3, 8, 0}, 3000, 17);
  const auto est = time_argmax_estimator(2);
  const RiskEstimate whole = score_risk(eps, *est);
  CHECK(whole.timeout_count > 0);

  std::mt19937_64 shuffler(5);
  std::shuffle(eps.begin(), eps.end(), shuffler);
  const RiskEstimate shuffled = score_risk(eps, *est);
  CHECK(shuffled.risk == whole.risk);
  CHECK(shuffled.correct_count == whole.correct_count);

  for (std::size_t parts : {2, 3, 7}) {
    RiskTally merged;
    const std::size_t chunk = (eps.size() + parts - 1) / parts;
    for (std::size_t b = 0; b < eps.size(); b += chunk) {
      RiskTally part;
      for (std::size_t i = b; i < std::min(eps.size(), b + chunk); ++i)
        part.add(eps[i], est->predict(eps[i].observed()));
      merged.merge(part);
    }
    CHECK(merged.estimate().risk == whole.risk);
    CHECK(merged.estimate().std_err == whole.std_err);
  }
}

TEST_CASE("noiseless greedy: X_1 is the goal") {
  const Graph g = make_complete(50);
  const auto eps = simulate(g, *greedy(0.0), {0.0, 10, 0}, 2000, 9);
  CHECK(score_risk(eps, *time_argmax_estimator(1)).risk == 1.0);
  // Greedy never stops attempting, so it stays on the goal.
  CHECK(score_risk(eps, *time_argmax_estimator(2)).risk == 1.0);
}

TEST_CASE("Monte Carlo risk of MAP matches the exact optimal risk") {
  const Graph g = make_complete(4);
  const auto wf = water_filling(0.5, 0.5);
  const EnvConfig env{0.5, 5, 0};
  auto exact = std::make_shared<const ExactDistribution>(exact_posterior(g, *wf, env));
  const auto bayes = bayes_map_estimator(exact);
  const auto eps = simulate(g, *wf, env, 200000, 41);
  const RiskEstimate mc = score_risk(eps, *bayes);
  CHECK(std::abs(mc.risk - exact->optimal_risk) <= 4.0 * mc.std_err);
  const RiskEstimate first = score_risk(eps, *first_step_estimator());
  CHECK(std::abs(first.risk - exact_estimator_risk(*exact, *first_step_estimator())) <=
        4.0 * first.std_err);
}

TEST_CASE("exact risks: MAP dominates and the time-argmax floor holds") {
  struct Inst {
    Graph g;
    std::unique_ptr<Strategy> s;
    EnvConfig env;
  };
  std::vector<Inst> insts;
  insts.push_back({make_complete(4), water_filling(0.5, 0.5), {0.5, 5, 0}});
  insts.push_back({make_complete(3), water_filling(0.25, 0.0), {0.0, 6, 0}});
  insts.push_back({make_complete(5), greedy(0.3), {0.3, 4, 0}});
  insts.push_back({make_erdos_renyi(5, 0.6, 3), water_filling(0.4, 0.3), {0.3, 5, 0}});
  const Graph two_cliques = make_k_clique(6, 2);
  insts.push_back({two_cliques, clique_water_filling(0.4, 0.3, two_cliques), {0.3, 5, 0}});
  for (const Inst& in : insts) {
    const ExactDistribution ex = exact_posterior(in.g, *in.s, in.env);
    const double map_risk =
        exact_estimator_risk(ex, *bayes_map_estimator(std::make_shared<const ExactDistribution>(ex)));
    CHECK(map_risk == doctest::Approx(ex.optimal_risk).epsilon(1e-12));
    std::vector<std::unique_ptr<Estimator>> others;
    others.push_back(first_step_estimator());
    for (std::size_t t = 1; t <= in.env.horizon; ++t) others.push_back(time_argmax_estimator(t));
    for (VertexId v = 0; v < in.g.size(); ++v) others.push_back(constant_estimator(v));
    for (const auto& e : others) CHECK(exact_estimator_risk(ex, *e) <= map_risk + 1e-12);

    // Time-argmax at the most likely T in 1..K is at least 1/(2 E[T] + 1).
    std::size_t t_hat = 1;
    for (std::size_t t = 1; t <= in.env.horizon; ++t)
      if (ex.t_pmf[t - 1] > ex.t_pmf[t_hat - 1]) t_hat = t;
    const double risk = exact_estimator_risk(ex, *time_argmax_estimator(t_hat));
    CHECK(risk >= 1.0 / (2.0 * ex.mean_T + 1.0));
  }
}
