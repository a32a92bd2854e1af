#include "anonroute/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "anonroute/analysis.hpp"
#include "anonroute/dynamics.hpp"
#include "anonroute/error.hpp"
#include "anonroute/rng.hpp"
#include "parallel.hpp"

namespace anonroute {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kGoalStream = 0x60a1;

struct PointTally {
  std::uint64_t episodes = 0;
  std::uint64_t sum_T = 0;
  std::uint64_t sum_T2 = 0;
  std::uint64_t sum_TIH = 0;
  std::uint64_t timeouts = 0;
  std::vector<std::uint64_t> t_counts;
  std::vector<RiskTally> risks;

  void merge(const PointTally& o) {
    episodes += o.episodes;
    sum_T += o.sum_T;
    sum_T2 += o.sum_T2;
    sum_TIH += o.sum_TIH;
    timeouts += o.timeouts;
    for (std::size_t i = 0; i < t_counts.size(); ++i) t_counts[i] += o.t_counts[i];
    for (std::size_t i = 0; i < risks.size(); ++i) risks[i].merge(o.risks[i]);
  }
};

std::unique_ptr<Estimator> make_estimator(const std::string& name, std::size_t t_hat) {
  if (name == "first-step") return first_step_estimator();
  if (name == "time-argmax") return time_argmax_estimator(t_hat);
  throw Error(Errc::configuration, "sweeps support first-step and time-argmax adversaries, not " + name);
}

std::optional<BoundCurve> curve_for(const GraphSpec& spec, double epsilon) {
  switch (spec.kind) {
    case GraphKind::complete: return theorem1_curve(epsilon);
    case GraphKind::erdos_renyi: return theorem2_curve(epsilon, spec.p);
    case GraphKind::k_clique: return theorem3_curve(epsilon, spec.n, spec.k);
    case GraphKind::custom: return std::nullopt;
  }
  return std::nullopt;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

Graph build_graph(const GraphSpec& spec, std::size_t instance) {
  switch (spec.kind) {
    case GraphKind::complete: return make_complete(spec.n);
    case GraphKind::erdos_renyi: return make_erdos_renyi(spec.n, spec.p, derive_seed(spec.seed, {instance}));
    case GraphKind::k_clique: return make_k_clique(spec.n, spec.k);
    case GraphKind::custom: break;
  }
  throw Error(Errc::configuration, "custom graphs cannot be generated from a spec");
}

double risk_target_for_graph(const GraphSpec& spec, double w, double epsilon) {
  if (spec.kind == GraphKind::k_clique) {
    const BoundCurve curve = theorem3_curve(epsilon, spec.n, spec.k);
    if (!curve.valid(w))
      throw Error(Errc::infeasible_delay, "delay budget " + std::to_string(w) +
                                              " is not above the floor " +
                                              std::to_string(curve.validity_floor()));
    return 1.0 / (2.0 * w * curve.scale() - 1.0 - c_eps(epsilon));
  }
  return risk_target_for_delay(w, density_of(spec), epsilon);
}

double density_of(const GraphSpec& spec) {
  return spec.kind == GraphKind::erdos_renyi ? spec.p : 1.0;
}

std::vector<double> make_grid(double min, double max, double step) {
  if (!(step > 0.0) || !(max >= min)) throw Error(Errc::invalid_argument, "bad grid bounds");
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    const double w = min + static_cast<double>(i) * step;
    if (w > max + 1e-9 * std::max(1.0, std::abs(max))) break;
    grid.push_back(w);
  }
  return grid;
}

void SweepConfig::validate() const {
  if (trials < 1) throw Error(Errc::invalid_argument, "trials must be at least 1");
  if (graph_instances < 1) throw Error(Errc::invalid_argument, "graph_instances must be at least 1");
  if (w_grid.empty() && q_grid.empty()) throw Error(Errc::invalid_argument, "empty sweep grid");
  if (!q_grid.empty() && strategy != "wf" && strategy != "clique-wf")
    throw Error(Errc::configuration, "an explicit risk grid needs a water-filling strategy");
  if (adversaries.empty()) throw Error(Errc::configuration, "no adversary configured");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(Errc::domain, "noise level must lie in [0, 1)");
  for (const auto& a : adversaries) make_estimator(a, t_hat);
}

std::size_t SweepConfig::resolved_horizon() const {
  if (horizon > 0) return horizon;
  double w_max = 0.0;
  for (double w : w_grid) w_max = std::max(w_max, w);
  for (double q : q_grid) w_max = std::max(w_max, expected_tih(q, epsilon));
  return std::max<std::size_t>(500, static_cast<std::size_t>(std::ceil(20.0 * w_max)));
}

std::size_t SweepConfig::episodes_per_point() const {
  const std::size_t per_instance = goals_per_instance > 0 ? goals_per_instance * trials : trials;
  return graph_instances * per_instance;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult result;
  result.config = cfg;
  const std::size_t K = cfg.resolved_horizon();
  result.horizon = K;
  const std::size_t n = cfg.graph.n;

  std::vector<Graph> graphs;
  graphs.reserve(cfg.graph_instances);
  for (std::size_t i = 0; i < cfg.graph_instances; ++i) graphs.push_back(build_graph(cfg.graph, i));

  std::vector<std::vector<VertexId>> goal_table(cfg.graph_instances);
  for (std::size_t i = 0; i < cfg.graph_instances; ++i) {
    for (std::size_t j = 0; j < cfg.goals_per_instance; ++j) {
      Rng rng = make_rng(cfg.master_seed, {kGoalStream, i, j});
      goal_table[i].push_back(static_cast<VertexId>(uniform_index(rng, n)));
    }
  }

  std::vector<std::unique_ptr<Estimator>> estimators;
  std::size_t observe_until = 0;
  for (const auto& a : cfg.adversaries) {
    estimators.push_back(make_estimator(a, cfg.t_hat));
    observe_until = std::max(observe_until, estimators.back()->observation_horizon(K));
  }
  RunOptions options;
  if (!cfg.full_episodes) options.observe_until = observe_until;

  const EnvConfig env{cfg.epsilon, K, 0};
  const std::optional<BoundCurve> curve = curve_for(cfg.graph, cfg.epsilon);
  const bool by_q = !cfg.q_grid.empty();
  const std::size_t points = by_q ? cfg.q_grid.size() : cfg.w_grid.size();
  const std::size_t per_instance =
      cfg.goals_per_instance > 0 ? cfg.goals_per_instance * cfg.trials : cfg.trials;
  const std::size_t total = cfg.episodes_per_point();

  for (std::size_t pi = 0; pi < points; ++pi) {
    const double w = by_q ? kNaN : cfg.w_grid[pi];
    double q_bar = kNaN;
    std::unique_ptr<Strategy> strategy;
    try {
      if (cfg.strategy == "wf" || cfg.strategy == "clique-wf") {
        q_bar = by_q ? cfg.q_grid[pi] : risk_target_for_graph(cfg.graph, w, cfg.epsilon);
        strategy = cfg.strategy == "wf" ? water_filling(q_bar, cfg.epsilon)
                                        : clique_water_filling(q_bar, cfg.epsilon, graphs[0]);
      } else if (cfg.strategy == "asb") {
        strategy = adapted_segment_based(w, cfg.epsilon, density_of(cfg.graph));
      } else if (cfg.strategy == "greedy") {
        strategy = greedy(cfg.epsilon);
      } else {
        throw Error(Errc::configuration, "unknown strategy " + cfg.strategy);
      }
    } catch (const Error& e) {
      if (e.code() == Errc::configuration) throw;
      result.warnings.push_back({w, e.what()});
      continue;
    }
    for (const Graph& g : graphs) strategy->validate(g);

    auto init = [&] {
      PointTally t;
      t.t_counts.assign(K + 1, 0);
      t.risks.resize(estimators.size());
      return t;
    };
    auto body = [&](std::size_t begin, std::size_t end, PointTally& acc) {
      for (std::size_t idx = begin; idx < end; ++idx) {
        const std::size_t inst = idx / per_instance;
        const std::size_t rem = idx % per_instance;
        const bool fixed_goals = cfg.goals_per_instance > 0;
        const std::size_t goal_idx = fixed_goals ? rem / cfg.trials : rem;
        const std::size_t trial = fixed_goals ? rem % cfg.trials : 0;
        Rng rng = make_rng(cfg.master_seed, {pi, inst, goal_idx, trial});
        const VertexId goal = fixed_goals ? goal_table[inst][goal_idx]
                                          : static_cast<VertexId>(uniform_index(rng, n));
        const EpisodeRecord rec = run_episode(graphs[inst], *strategy, env, goal, rng, options);
        ++acc.episodes;
        acc.sum_T += rec.T;
        acc.sum_T2 += static_cast<std::uint64_t>(rec.T) * rec.T;
        acc.sum_TIH += rec.T_IH;
        if (rec.timed_out()) ++acc.timeouts;
        ++acc.t_counts[rec.T - 1];
        const TrajectoryView view = rec.observed();
        for (std::size_t a = 0; a < estimators.size(); ++a)
          acc.risks[a].add(rec, estimators[a]->predict(view));
      }
    };
    const PointTally tally = detail::parallel_reduce<PointTally>(
        total, cfg.workers, init, body, [](PointTally& a, const PointTally& b) { a.merge(b); });

    TradeoffPoint pt;
    pt.w_target = w;
    pt.q_bar = q_bar;
    pt.trials = tally.episodes;
    const double N = static_cast<double>(tally.episodes);
    pt.mean_delay = static_cast<double>(tally.sum_T) / N;
    const double var = N > 1 ? (static_cast<double>(tally.sum_T2) - N * pt.mean_delay * pt.mean_delay) / (N - 1)
                             : 0.0;
    pt.delay_se = std::sqrt(std::max(0.0, var) / N);
    pt.mean_tih = static_cast<double>(tally.sum_TIH) / N;
    pt.timeout_frac = static_cast<double>(tally.timeouts) / N;
    pt.max_t_freq = static_cast<double>(*std::max_element(tally.t_counts.begin(), tally.t_counts.end())) / N;
    for (std::size_t a = 0; a < estimators.size(); ++a)
      pt.risks.push_back({cfg.adversaries[a], tally.risks[a].estimate()});
    if (curve) {
      pt.bound_lower = curve->lower(pt.mean_delay);
      pt.bound_upper = curve->upper(pt.mean_delay);
      pt.bound_valid = curve->valid(pt.mean_delay);
    } else {
      pt.bound_lower = kNaN;
      pt.bound_upper = kNaN;
    }
    result.points.push_back(std::move(pt));
  }
  std::stable_sort(result.points.begin(), result.points.end(),
                   [](const TradeoffPoint& a, const TradeoffPoint& b) { return a.mean_delay < b.mean_delay; });
  return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  const SweepConfig& c = result.config;
  os << "graph_kind,n,p,k,eps,w_target,q_bar,trials,mean_delay,delay_se,adversary,risk,risk_se,"
        "timeout_frac,bound_lower,bound_upper,seed\n";
  for (const TradeoffPoint& pt : result.points) {
    for (const AdversaryRisk& r : pt.risks) {
      os << to_string(c.graph.kind) << ',' << c.graph.n << ',' << fmt(c.graph.p) << ',' << c.graph.k << ','
         << fmt(c.epsilon) << ',' << fmt(pt.w_target) << ',' << fmt(pt.q_bar) << ',' << pt.trials << ','
         << fmt(pt.mean_delay) << ',' << fmt(pt.delay_se) << ',' << r.adversary << ',' << fmt(r.risk.risk)
         << ',' << fmt(r.risk.std_err) << ',' << fmt(pt.timeout_frac) << ',' << fmt(pt.bound_lower) << ','
         << fmt(pt.bound_upper) << ',' << c.master_seed << '\n';
    }
  }
}

std::string sweep_json(const SweepResult& result) {
  using nlohmann::json;
  auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  const SweepConfig& c = result.config;
  json j;
  j["graph"] = {{"kind", std::string(to_string(c.graph.kind))}, {"n", c.graph.n}, {"p", c.graph.p},
                {"k", c.graph.k}, {"seed", c.graph.seed}};
  j["epsilon"] = c.epsilon;
  j["strategy"] = c.strategy;
  j["horizon"] = result.horizon;
  j["master_seed"] = c.master_seed;
  j["points"] = json::array();
  for (const TradeoffPoint& pt : result.points) {
    json p = {{"w_target", num(pt.w_target)}, {"q_bar", num(pt.q_bar)}, {"trials", pt.trials},
              {"mean_delay", pt.mean_delay}, {"delay_se", pt.delay_se}, {"mean_tih", pt.mean_tih},
              {"timeout_frac", pt.timeout_frac}, {"max_t_freq", pt.max_t_freq},
              {"bound_lower", num(pt.bound_lower)}, {"bound_upper", num(pt.bound_upper)},
              {"bound_valid", pt.bound_valid}};
    p["risks"] = json::array();
    for (const AdversaryRisk& r : pt.risks)
      p["risks"].push_back({{"adversary", r.adversary}, {"risk", r.risk.risk}, {"risk_se", r.risk.std_err},
                            {"correct", r.risk.correct_count}, {"timeouts", r.risk.timeout_count}});
    j["points"].push_back(std::move(p));
  }
  j["warnings"] = json::array();
  for (const SweepWarning& w : result.warnings)
    j["warnings"].push_back({{"w_target", num(w.w_target)}, {"message", w.message}});
  return j.dump(2);
}

MembershipSummary run_membership_experiment(std::size_t n, double p, std::size_t samples,
                                            std::uint64_t seed, std::size_t workers) {
  if (samples == 0) throw Error(Errc::invalid_argument, "samples must be at least 1");
  MembershipSummary out;
  out.n = n;
  out.p = p;
  out.gamma = default_gamma(n);
  out.samples = samples;
  const FamilyParams params{p, out.gamma};

  struct Acc {
    std::vector<std::pair<std::size_t, MembershipReport>> reports;
  };
  auto body = [&](std::size_t begin, std::size_t end, Acc& acc) {
    for (std::size_t i = begin; i < end; ++i) {
      const Graph g = make_erdos_renyi(n, p, derive_seed(seed, {i}));
      acc.reports.emplace_back(i, check_family_membership(g, params));
    }
  };
  auto merge = [](Acc& a, Acc& b) {
    for (auto& r : b.reports) a.reports.push_back(std::move(r));
  };
  Acc all = detail::parallel_reduce<Acc>(samples, workers, [] { return Acc{}; }, body, merge);
  std::sort(all.reports.begin(), all.reports.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  bool have_failure = false;
  for (const auto& [i, r] : all.reports) {
    if (r.member) ++out.members;
    if (!r.degrees_ok) ++out.degree_failures;
    if (!r.overlap_ok) ++out.overlap_failures;
    out.min_overlap = std::min(out.min_overlap, r.overlap);
    if (!r.member && !have_failure) {
      out.first_failure = r;
      have_failure = true;
    }
  }
  out.rate = static_cast<double>(out.members) / static_cast<double>(samples);
  return out;
}

}  // namespace anonroute
