#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "anonroute/acceptance.hpp"
#include "anonroute/adversary.hpp"
#include "anonroute/analysis.hpp"
#include "anonroute/dynamics.hpp"
#include "anonroute/error.hpp"
#include "anonroute/experiment.hpp"
#include "anonroute/graph.hpp"
#include "anonroute/oracle.hpp"
#include "anonroute/strategy.hpp"

using namespace anonroute;
using nlohmann::json;

namespace {

struct GraphArgs {
  std::string kind = "complete";
  std::size_t n = 100;
  double p = 1.0;
  std::size_t k = 1;
  std::uint64_t seed = 1;
  std::string file;

  void add(CLI::App* app, bool with_file) {
    app->add_option("--kind", kind, "complete | er | kclique")->check(CLI::IsMember({"complete", "er", "erdos_renyi", "kclique", "k_clique"}));
    app->add_option("--n", n, "vertex count");
    app->add_option("--p", p, "edge density (er)");
    app->add_option("--k", k, "clique count (kclique)");
    app->add_option("--seed", seed, "graph seed (er)");
    if (with_file) app->add_option("--graph", file, "edge-list file instead of a generator");
  }

  GraphSpec spec() const { return {parse_graph_kind(kind), n, p, k, seed}; }

  Graph build() const {
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw Error(Errc::invalid_argument, "cannot open " + file);
      return read_edge_list(in);
    }
    return build_graph(spec());
  }
};

// Writes to `path`, or stdout when empty.
template <class F>
void with_output(const std::string& path, F&& f) {
  if (path.empty()) {
    f(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::invalid_argument, "cannot write " + path);
  f(out);
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, const Graph& g, const GraphSpec& spec,
                                        double eps, std::optional<double> q, std::optional<double> w) {
  if (name == "wf" || name == "clique-wf") {
    double q_bar = 0.0;
    if (q) q_bar = *q;
    else if (w) q_bar = risk_target_for_graph(spec, *w, eps);
    else throw Error(Errc::configuration, "water-filling needs --qbar or --w");
    if (name == "wf") return water_filling(q_bar, eps);
    return clique_water_filling(q_bar, eps, g);
  }
  if (name == "asb") {
    if (!w) throw Error(Errc::configuration, "asb needs --w");
    return adapted_segment_based(*w, eps, density_of(spec));
  }
  if (name == "greedy") return greedy(eps);
  throw Error(Errc::configuration, "unknown strategy " + name);
}

json pmf_json(const std::vector<double>& pmf) {
  json a = json::array();
  for (double p : pmf) a.push_back(p);
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anonymous stochastic routing: simulation, exact analysis and bounds"};
  app.set_config("--config", "", "read options from a TOML/INI config file");
  app.require_subcommand(1);

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "generate a graph and write its edge list");
  GraphArgs graph_args;
  std::string graph_out;
  graph_args.add(graph_cmd, false);
  graph_cmd->add_option("--out", graph_out, "output file (stdout if omitted)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run episodes and score one adversary");
  GraphArgs sim_graph;
  sim_graph.add(sim_cmd, true);
  std::string sim_strategy = "wf";
  std::optional<double> sim_q, sim_w;
  double sim_eps = 0.0;
  std::size_t sim_K = 500, sim_episodes = 10000, sim_t_hat = 1;
  std::uint64_t sim_master = 1;
  std::string sim_adversary = "first-step", sim_dump, sim_out;
  sim_cmd->add_option("--strategy", sim_strategy)->check(CLI::IsMember({"wf", "clique-wf", "asb", "greedy"}));
  auto* q_opt = sim_cmd->add_option("--qbar", sim_q, "target risk level");
  auto* w_opt = sim_cmd->add_option("--w", sim_w, "delay budget");
  q_opt->excludes(w_opt);
  sim_cmd->add_option("--eps", sim_eps, "noise level");
  sim_cmd->add_option("--horizon", sim_K, "horizon K");
  sim_cmd->add_option("--episodes", sim_episodes);
  sim_cmd->add_option("--master-seed", sim_master);
  sim_cmd->add_option("--adversary", sim_adversary)->check(CLI::IsMember({"first-step", "time-argmax", "bayes"}));
  sim_cmd->add_option("--t-hat", sim_t_hat, "time index for time-argmax");
  sim_cmd->add_option("--dump-episodes", sim_dump, "write one line per episode");
  sim_cmd->add_option("--out", sim_out, "summary JSON (stdout if omitted)");

  // tradeoff
  auto* tr_cmd = app.add_subcommand("tradeoff", "delay/risk sweep over a grid of delay budgets");
  GraphArgs tr_graph;
  tr_graph.add(tr_cmd, false);
  SweepConfig tr;
  double w_min = 3, w_max = 15, w_step = 1;
  std::string tr_out, tr_json;
  tr_cmd->add_option("--eps", tr.epsilon);
  tr_cmd->add_option("--strategy", tr.strategy)->check(CLI::IsMember({"wf", "clique-wf", "asb", "greedy"}));
  tr_cmd->add_option("--adversary", tr.adversaries, "first-step and/or time-argmax")->expected(1, -1);
  tr_cmd->add_option("--t-hat", tr.t_hat);
  tr_cmd->add_option("--w-min", w_min);
  tr_cmd->add_option("--w-max", w_max);
  tr_cmd->add_option("--w-step", w_step);
  tr_cmd->add_option("--qbar", tr.q_grid, "explicit risk targets instead of the w grid")->expected(1, -1);
  tr_cmd->add_option("--trials", tr.trials);
  tr_cmd->add_option("--instances", tr.graph_instances, "graph instances (er)");
  tr_cmd->add_option("--goals", tr.goals_per_instance, "fixed goals per instance (0: fresh goal per episode)");
  tr_cmd->add_option("--master-seed", tr.master_seed);
  tr_cmd->add_option("--horizon", tr.horizon, "0: max(20 w_max, 500)");
  tr_cmd->add_option("--workers", tr.workers, "0: hardware concurrency");
  tr_cmd->add_flag("--full-episodes", tr.full_episodes, "simulate every episode to the horizon");
  tr_cmd->add_option("--out", tr_out, "CSV output (stdout if omitted)");
  tr_cmd->add_option("--json", tr_json, "also write the sweep as JSON");

  // bounds
  auto* b_cmd = app.add_subcommand("bounds", "tabulate an analytic bound curve");
  int b_theorem = 1;
  double b_eps = 0.0, b_p = 1.0, b_min = 2, b_max = 20, b_step = 1;
  std::size_t b_n = 100, b_k = 1;
  std::string b_out;
  b_cmd->add_option("--theorem", b_theorem)->check(CLI::IsMember({1, 2, 3}));
  b_cmd->add_option("--eps", b_eps);
  b_cmd->add_option("--p", b_p);
  b_cmd->add_option("--n", b_n);
  b_cmd->add_option("--k", b_k);
  b_cmd->add_option("--w-min", b_min);
  b_cmd->add_option("--w-max", b_max);
  b_cmd->add_option("--w-step", b_step);
  b_cmd->add_option("--out", b_out);

  // oracle
  auto* o_cmd = app.add_subcommand("oracle", "exact enumeration on a tiny instance");
  std::size_t o_n = 4, o_K = 5, o_k = 1;
  double o_eps = 0.5, o_q = 0.5;
  std::string o_strategy = "wf", o_kind = "complete", o_out;
  o_cmd->add_option("--n", o_n);
  o_cmd->add_option("--k-horizon", o_K, "horizon K");
  o_cmd->add_option("--eps", o_eps);
  o_cmd->add_option("--strategy", o_strategy)->check(CLI::IsMember({"wf", "clique-wf", "greedy", "asb"}));
  o_cmd->add_option("--qbar", o_q);
  o_cmd->add_option("--kind", o_kind)->check(CLI::IsMember({"complete", "kclique", "k_clique"}));
  o_cmd->add_option("--k", o_k, "clique count for --kind kclique");
  o_cmd->add_option("--out", o_out);

  // check-family
  auto* f_cmd = app.add_subcommand("check-family", "family membership of a graph or of sampled ER graphs");
  GraphArgs f_graph;
  f_graph.add(f_cmd, true);
  std::optional<double> f_gamma;
  double f_family_p = -1.0;
  std::size_t f_samples = 0;
  f_cmd->add_option("--family-p", f_family_p, "density parameter of the family (default: --p)");
  f_cmd->add_option("--gamma", f_gamma, "slack (default: min(1/2, (ln n / n)^(1/4)))");
  f_cmd->add_option("--samples", f_samples, "sample this many ER graphs instead of checking one");

  // accept
  auto* a_cmd = app.add_subcommand("accept", "run the acceptance criteria");
  std::string a_suite = "all";
  std::size_t a_workers = 0;
  bool a_verbose = false;
  a_cmd->add_option("--suite", a_suite);
  a_cmd->add_option("--workers", a_workers);
  a_cmd->add_flag("--verbose", a_verbose, "print per-point tables");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*graph_cmd) {
      const Graph g = graph_args.build();
      with_output(graph_out, [&](std::ostream& os) { write_edge_list(os, g); });
    } else if (*sim_cmd) {
      const Graph g = sim_graph.build();
      GraphSpec spec = sim_graph.spec();
      if (!sim_graph.file.empty()) spec.kind = g.kind();
      const auto strategy = make_strategy(sim_strategy, g, spec, sim_eps, sim_q, sim_w);
      const EnvConfig env{sim_eps, sim_K, 0};
      std::shared_ptr<const ExactDistribution> exact;
      std::unique_ptr<Estimator> est;
      if (sim_adversary == "first-step") est = first_step_estimator();
      else if (sim_adversary == "time-argmax") est = time_argmax_estimator(sim_t_hat);
      else {
        exact = std::make_shared<ExactDistribution>(exact_posterior(g, *strategy, env));
        est = bayes_map_estimator(exact);
      }
      std::ofstream dump;
      if (!sim_dump.empty()) {
        dump.open(sim_dump);
        if (!dump) throw Error(Errc::invalid_argument, "cannot write " + sim_dump);
      }
      RiskTally tally;
      double sum_T = 0.0, sum_TIH = 0.0;
      for (std::size_t i = 0; i < sim_episodes; ++i) {
        Rng rng = make_rng(sim_master, {i});
        const VertexId goal = static_cast<VertexId>(uniform_index(rng, g.size()));
        const EpisodeRecord rec = run_episode(g, *strategy, env, goal, rng);
        tally.add(rec, est->predict(rec.observed()));
        sum_T += static_cast<double>(rec.T);
        sum_TIH += static_cast<double>(rec.T_IH);
        if (dump) dump << format_episode(rec) << '\n';
      }
      const RiskEstimate r = tally.estimate();
      const double N = static_cast<double>(sim_episodes);
      json j = {{"strategy", strategy->describe()}, {"adversary", est->name()}, {"episodes", sim_episodes},
                {"horizon", sim_K}, {"mean_delay", sum_T / N}, {"mean_tih", sum_TIH / N},
                {"risk", r.risk}, {"risk_se", r.std_err}, {"correct", r.correct_count},
                {"timeouts", r.timeout_count}};
      with_output(sim_out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    } else if (*tr_cmd) {
      tr.graph = tr_graph.spec();
      if (tr.q_grid.empty()) tr.w_grid = make_grid(w_min, w_max, w_step);
      const SweepResult res = run_sweep(tr);
      for (const SweepWarning& w : res.warnings)
        std::cerr << "skipped w=" << w.w_target << ": " << w.message << '\n';
      with_output(tr_out, [&](std::ostream& os) { write_sweep_csv(os, res); });
      if (!tr_json.empty()) with_output(tr_json, [&](std::ostream& os) { os << sweep_json(res) << '\n'; });
    } else if (*b_cmd) {
      const BoundCurve curve = b_theorem == 1   ? theorem1_curve(b_eps)
                               : b_theorem == 2 ? theorem2_curve(b_eps, b_p)
                                                : theorem3_curve(b_eps, b_n, b_k);
      with_output(b_out, [&](std::ostream& os) {
        os << "w,lower,upper\n";
        os.precision(10);
        for (double w : make_grid(b_min, b_max, b_step)) {
          if (!curve.valid(w)) {
            std::cerr << "w=" << w << " is below the validity floor " << curve.validity_floor() << '\n';
            continue;
          }
          os << w << ',' << curve.lower(w) << ',' << curve.upper(w) << '\n';
        }
      });
    } else if (*o_cmd) {
      const Graph g = o_kind == "complete" ? make_complete(o_n) : make_k_clique(o_n, o_k);
      const GraphSpec spec{g.kind(), o_n, 1.0, o_k, 1};
      const auto strategy = make_strategy(o_strategy, g, spec, o_eps, o_q, std::nullopt);
      const EnvConfig env{o_eps, o_K, 0};
      auto exact = std::make_shared<ExactDistribution>(exact_posterior(g, *strategy, env));
      std::size_t t_hat = 1;
      for (std::size_t t = 1; t <= o_K; ++t)
        if (exact->t_pmf[t - 1] > exact->t_pmf[t_hat - 1]) t_hat = t;
      json j = {{"config_digest", exact->config_digest}, {"strategy", strategy->describe()},
                {"n", o_n}, {"horizon", o_K}, {"epsilon", o_eps},
                {"t_pmf", pmf_json(exact->t_pmf)}, {"tih_pmf", pmf_json(exact->tih_pmf)},
                {"mean_T", exact->mean_T}, {"mean_TIH", exact->mean_TIH},
                {"timeout_prob", exact->timeout_prob}, {"total_mass", exact->total_mass},
                {"optimal_risk", exact->optimal_risk}, {"prob_tih_ne_t", exact->prob_tih_ne_t},
                {"tih_bayes_success", exact->tih_bayes_success}};
      j["estimator_risks"] = {
          {"bayes", exact_estimator_risk(*exact, *bayes_map_estimator(exact))},
          {"first-step", exact_estimator_risk(*exact, *first_step_estimator())},
          {"time-argmax", {{"t_hat", t_hat}, {"risk", exact_estimator_risk(*exact, *time_argmax_estimator(t_hat))}}}};
      with_output(o_out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    } else if (*f_cmd) {
      const double fp = f_family_p >= 0.0 ? f_family_p : f_graph.p;
      if (f_samples > 0) {
        const MembershipSummary s = run_membership_experiment(f_graph.n, f_graph.p, f_samples, f_graph.seed);
        json j = {{"n", s.n}, {"p", s.p}, {"gamma", s.gamma}, {"samples", s.samples}, {"members", s.members},
                  {"rate", s.rate}, {"degree_failures", s.degree_failures},
                  {"overlap_failures", s.overlap_failures}, {"min_overlap", s.min_overlap}};
        std::cout << j.dump(2) << '\n';
      } else {
        const Graph g = f_graph.build();
        const FamilyParams params{fp, f_gamma ? *f_gamma : default_gamma(g.size())};
        const MembershipReport r = check_family_membership(g, params);
        json j = {{"member", r.member}, {"degrees_ok", r.degrees_ok}, {"overlap_ok", r.overlap_ok},
                  {"overlap", r.overlap}, {"gamma", params.gamma}, {"degree_violations", r.degree_violations},
                  {"overlap_violations", r.overlap_violations}};
        j["violating_vertices"] = r.violating_vertices;
        j["violating_pairs"] = json::array();
        for (const auto& [u, v] : r.violating_pairs) j["violating_pairs"].push_back({u, v});
        std::cout << j.dump(2) << '\n';
      }
    } else if (*a_cmd) {
      AcceptanceOptions opts;
      opts.workers = a_workers;
      if (a_verbose) opts.log = &std::cerr;
      const auto results = run_acceptance(a_suite, opts);
      bool all = true;
      for (const auto& r : results) {
        std::cout << format_result(r) << '\n';
        all = all && r.passed;
      }
      return all ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 2;
  }
  return 0;
}
