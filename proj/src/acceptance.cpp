#include "anonroute/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "anonroute/adversary.hpp"
#include "anonroute/analysis.hpp"
#include "anonroute/dynamics.hpp"
#include "anonroute/error.hpp"
#include "anonroute/experiment.hpp"
#include "anonroute/graph.hpp"
#include "anonroute/oracle.hpp"
#include "anonroute/rng.hpp"
#include "anonroute/strategy.hpp"
#include "parallel.hpp"

namespace anonroute {

namespace {

// Seeds shipped with the suite.
constexpr std::uint64_t kPmfSeed = 20240601;
constexpr std::uint64_t kFig2Seed = 11;
constexpr std::uint64_t kConvergenceSeed = 13;
constexpr std::uint64_t kErSeed = 17;
constexpr std::uint64_t kErGraphSeed = 19;
constexpr std::uint64_t kOracleSeed = 23;
constexpr std::uint64_t kOptimalitySeed = 29;
constexpr std::uint64_t kCliqueSeed = 31;
constexpr std::uint64_t kMembershipSeed = 7;

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct NamedPmf {
  std::string label;
  std::vector<double> pmf;  // index t - 1
  double mean = 0.0;
};

struct MeasuredPoint {
  std::string label;
  double mean_delay = 0.0;
  double max_freq = 0.0;
  std::uint64_t trials = 0;
};

struct Context {
  AcceptanceOptions options;
  std::vector<NamedPmf> exact_pmfs;
  std::vector<MeasuredPoint> sweep_points;

  void log(const std::string& line) const {
    if (options.log) *options.log << line << '\n';
  }

  void add_points(const std::string& label, const SweepResult& r) {
    for (const TradeoffPoint& pt : r.points)
      sweep_points.push_back({label + " w=" + num(pt.w_target), pt.mean_delay, pt.max_t_freq, pt.trials});
  }
};

void log_sweep(const Context& ctx, const std::string& label, const SweepResult& r) {
  ctx.log("  " + label + " (K=" + std::to_string(r.horizon) + ")");
  for (const SweepWarning& w : r.warnings) ctx.log("    skipped w=" + num(w.w_target) + ": " + w.message);
  for (const TradeoffPoint& pt : r.points) {
    const RiskEstimate& risk = pt.risks.front().risk;
    ctx.log("    w=" + num(pt.w_target) + " q=" + num(pt.q_bar) + " delay=" + num(pt.mean_delay) +
            " risk=" + num(risk.risk) + " se=" + num(risk.std_err, 3) + " lower=" + num(pt.bound_lower) +
            " upper=" + num(pt.bound_upper) + (pt.bound_valid ? "" : " (below floor)") +
            " timeout=" + num(pt.timeout_frac, 3));
  }
}

// ---------------------------------------------------------------- criterion 1

CriterionResult closed_form_round_trip(Context& ctx) {
  CriterionResult r{1, "closed-form round-trip", false, {}, 0.0};
  const double eps_grid[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const double offsets[] = {0.25, 1.0, 3.0, 10.0, 50.0};
  double worst = 0.0;
  std::size_t pairs = 0;
  for (double eps : eps_grid) {
    const double floor = eps / (2.0 * (1.0 - eps) * (1.0 - eps)) + 1.0;
    for (double off : offsets) {
      const double w = floor + off;
      const double q = qbar_of_w_exact(w, eps);
      worst = std::max(worst, std::abs(expected_tih(q, eps) - w));
      ++pairs;
      if (q <= 1.0) {
        const TihPmf pmf = tih_pmf(q, eps, WaterFillingSchedule(q, eps).t_star() + 400);
        ctx.exact_pmfs.push_back({"recursion q=" + num(q) + " eps=" + num(eps), pmf.probs,
                                  tih_mean_exact(q, eps)});
      }
    }
  }
  r.passed = pairs == 50 && worst <= 1e-10;
  r.detail = std::to_string(pairs) + " (w, eps) pairs, max |E[T_IH](q(w)) - w| = " + num(worst, 3) +
             " (tol 1e-10)";
  return r;
}

// ---------------------------------------------------------------- criterion 2

CriterionResult pmf_fidelity(Context& ctx) {
  CriterionResult r{2, "PMF fidelity", false, {}, 0.0};
  const double q = 0.21;
  const double eps = 0.5;
  const std::size_t n = 100;
  const std::size_t episodes = 200000;
  const std::size_t K = 500;
  const Graph g = make_complete(n);
  const auto wf = water_filling(q, eps);
  const EnvConfig env{eps, K, 0};
  RunOptions opts;
  opts.observe_until = 1;

  struct Acc {
    std::vector<std::uint64_t> counts;
    std::uint64_t sum = 0;
    std::uint64_t sum2 = 0;
  };
  auto init = [&] { return Acc{std::vector<std::uint64_t>(K + 1, 0), 0, 0}; };
  auto body = [&](std::size_t b, std::size_t e, Acc& acc) {
    for (std::size_t i = b; i < e; ++i) {
      Rng rng = make_rng(kPmfSeed, {i});
      const VertexId goal = static_cast<VertexId>(uniform_index(rng, n));
      const EpisodeRecord rec = run_episode(g, *wf, env, goal, rng, opts);
      ++acc.counts[rec.T_IH - 1];
      acc.sum += rec.T_IH;
      acc.sum2 += static_cast<std::uint64_t>(rec.T_IH) * rec.T_IH;
    }
  };
  auto merge = [](Acc& a, const Acc& b) {
    for (std::size_t i = 0; i < a.counts.size(); ++i) a.counts[i] += b.counts[i];
    a.sum += b.sum;
    a.sum2 += b.sum2;
  };
  const Acc acc = detail::parallel_reduce<Acc>(episodes, ctx.options.workers, init, body, merge);

  const double N = static_cast<double>(episodes);
  const TihPmf exact = tih_pmf(q, eps, K);
  std::vector<double> ref = exact.probs;
  ref.push_back(exact.tail);
  ctx.exact_pmfs.push_back({"recursion q=0.21 eps=0.5", exact.probs, tih_mean_exact(q, eps)});

  double worst_z = 0.0;
  std::size_t worst_t = 0;
  bool bins_ok = true;
  for (std::size_t t = 1; t <= K + 1; ++t) {
    const double f = static_cast<double>(acc.counts[t - 1]) / N;
    const double p = ref[t - 1];
    const double se = std::sqrt(p * (1.0 - p) / N);
    if (se == 0.0) {
      if (f != p) bins_ok = false;
      continue;
    }
    const double z = std::abs(f - p) / se;
    if (z > worst_z) {
      worst_z = z;
      worst_t = t;
    }
  }
  bins_ok = bins_ok && worst_z <= 4.0;

  std::size_t arg = 0;
  for (std::size_t i = 1; i < acc.counts.size(); ++i)
    if (acc.counts[i] > acc.counts[arg]) arg = i;
  const double fmax = static_cast<double>(acc.counts[arg]) / N;
  const double fmax_se = std::sqrt(fmax * (1.0 - fmax) / N);
  const bool max_ok = fmax <= q + 3.0 * fmax_se;

  const double mean = static_cast<double>(acc.sum) / N;
  const double var = (static_cast<double>(acc.sum2) - N * mean * mean) / (N - 1.0);
  const double mean_se = std::sqrt(var / N);
  const double closed = expected_tih(q, eps);
  const double recursion_mean = tih_mean_exact(q, eps);
  const bool mean_ok = std::abs(mean - closed) <= 3.0 * mean_se;

  r.passed = bins_ok && max_ok && mean_ok;
  std::ostringstream os;
  os << "max bin z=" << num(worst_z, 3) << " at t=" << worst_t << " (tol 4)"
     << "; max freq " << num(fmax) << " <= q+3se=" << num(q + 3.0 * fmax_se) << (max_ok ? "" : " FAILS")
     << "; E[T_IH]=" << num(mean) << " se=" << num(mean_se, 3) << " vs closed form " << num(closed)
     << " |diff|/se=" << num(std::abs(mean - closed) / mean_se, 3) << " (tol 3)"
     << "; recursion mean " << num(recursion_mean) << " |diff|/se="
     << num(std::abs(mean - recursion_mean) / mean_se, 3);
  r.detail = os.str();
  return r;
}

// ---------------------------------------------------------------- criterion 3

bool check_sandwich(const Context& ctx, const SweepResult& res, double slack, std::string& note) {
  bool ok = true;
  std::size_t checked_upper = 0;
  std::size_t below_floor = 0;
  double worst_upper = -1.0;
  double worst_lower = -1.0;
  for (const TradeoffPoint& pt : res.points) {
    const RiskEstimate& risk = pt.risks.front().risk;
    const double floor_bound = 1.0 / (2.0 * pt.mean_delay + 1.0) - 3.0 * risk.std_err;
    worst_lower = std::max(worst_lower, floor_bound - risk.risk);
    if (risk.risk < floor_bound) ok = false;
    const double up = pt.bound_upper + slack;
    worst_upper = std::max(worst_upper, risk.risk - up);
    if (!(risk.risk <= up)) ok = false;
    if (pt.bound_valid) ++checked_upper;
    else ++below_floor;
  }
  (void)ctx;
  note = std::to_string(res.points.size()) + " points (" + std::to_string(res.warnings.size()) +
         " infeasible w skipped, " + std::to_string(below_floor) +
         " measured delays below the curve floor); max excess over upper+slack " + num(worst_upper, 3) +
         ", max shortfall under 1/(2d+1)-3se " + num(worst_lower, 3);
  (void)checked_upper;
  return ok;
}

CriterionResult fig2_reproduction(Context& ctx) {
  CriterionResult r{3, "complete-graph trade-off sandwich", false, {}, 0.0};
  std::string details;
  bool ok = true;
  const std::pair<double, double> settings[] = {{0.3, 0.02}, {0.7, 0.03}};
  for (const auto& [eps, slack] : settings) {
    SweepConfig cfg;
    cfg.graph = {GraphKind::complete, 100, 1.0, 1, 1};
    cfg.epsilon = eps;
    cfg.w_grid = make_grid(3, 15, 1);
    cfg.trials = 100000;
    cfg.master_seed = kFig2Seed;
    cfg.workers = ctx.options.workers;
    const SweepResult res = run_sweep(cfg);
    log_sweep(ctx, "complete n=100 eps=" + num(eps), res);
    ctx.add_points("complete n=100 eps=" + num(eps), res);
    std::string note;
    const bool pass = check_sandwich(ctx, res, slack, note);
    ok = ok && pass && !res.points.empty();
    details += (details.empty() ? "" : "; ") + std::string("eps=") + num(eps) + (pass ? " ok: " : " FAIL: ") + note;
  }
  r.passed = ok;
  r.detail = details;
  return r;
}

// ---------------------------------------------------------------- criterion 4

CriterionResult size_convergence(Context& ctx) {
  CriterionResult r{4, "size convergence of the upper-bound gap", false, {}, 0.0};
  const std::size_t sizes[] = {50, 100, 200, 400};
  std::vector<double> gaps;
  std::vector<double> ses;
  std::string details;
  for (std::size_t n : sizes) {
    SweepConfig cfg;
    cfg.graph = {GraphKind::complete, n, 1.0, 1, 1};
    cfg.epsilon = 0.3;
    cfg.w_grid = {8.0};
    cfg.trials = 100000;
    cfg.master_seed = kConvergenceSeed;
    cfg.workers = ctx.options.workers;
    const SweepResult res = run_sweep(cfg);
    log_sweep(ctx, "complete n=" + std::to_string(n) + " eps=0.3", res);
    ctx.add_points("convergence n=" + std::to_string(n), res);
    const TradeoffPoint& pt = res.points.front();
    const RiskEstimate& risk = pt.risks.front().risk;
    gaps.push_back(std::abs(risk.risk - pt.bound_upper));
    ses.push_back(risk.std_err);
    details += (details.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + " gap " + num(gaps.back(), 4);
  }
  bool ok = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    const double tol = 2.0 * std::sqrt(ses[i] * ses[i] + ses[i - 1] * ses[i - 1]);
    if (gaps[i] > gaps[i - 1] + tol) ok = false;
  }
  r.passed = ok;
  r.detail = details + " (each step may grow by at most 2 se)";
  return r;
}

// ---------------------------------------------------------------- criterion 5

CriterionResult er_comparison(Context& ctx) {
  CriterionResult r{5, "Erdos-Renyi comparison against the ASB baseline", false, {}, 0.0};
  SweepConfig cfg;
  cfg.graph = {GraphKind::erdos_renyi, 100, 0.8, 1, kErGraphSeed};
  cfg.epsilon = 0.3;
  cfg.w_grid = make_grid(3, 15, 1);
  cfg.trials = 100;
  cfg.graph_instances = 100;
  cfg.goals_per_instance = 100;
  cfg.master_seed = kErSeed;
  cfg.workers = ctx.options.workers;
  const SweepResult res = run_sweep(cfg);
  log_sweep(ctx, "ER n=100 p=0.8 eps=0.3", res);
  ctx.add_points("ER n=100 p=0.8", res);
  bool all_below = !res.points.empty();
  double best_reduction = 0.0;
  double best_delay = 0.0;
  for (const TradeoffPoint& pt : res.points) {
    const double risk = pt.risks.front().risk.risk;
    const double baseline = asb_risk(pt.mean_delay, cfg.epsilon, cfg.graph.p);
    ctx.log("    delay=" + num(pt.mean_delay) + " wf=" + num(risk) + " asb=" + num(baseline));
    if (risk > baseline) all_below = false;
    const double reduction = (baseline - risk) / baseline;
    if (reduction > best_reduction) {
      best_reduction = reduction;
      best_delay = pt.mean_delay;
    }
  }
  r.passed = all_below && best_reduction >= 0.2;
  r.detail = std::to_string(res.points.size()) + " points, WF below baseline everywhere: " +
             (all_below ? "yes" : "no") + "; max relative reduction " + num(100.0 * best_reduction, 4) +
             "% at delay " + num(best_delay, 4) + " (need >= 20%)";
  return r;
}

// ------------------------------------------------------------ oracle instances

struct OracleInstance {
  std::string label;
  Graph graph;
  std::shared_ptr<Strategy> strategy;
  EnvConfig env;
  double q_bar = 0.0;  // 0 for non water-filling strategies
  bool water_filling = false;
  bool complete = false;
};

std::vector<OracleInstance> oracle_instances() {
  std::vector<OracleInstance> out;
  auto wf = [&](std::size_t n, std::size_t K, double eps, double q) {
    out.push_back({"complete n=" + std::to_string(n) + " K=" + std::to_string(K) + " eps=" + num(eps) +
                       " wf q=" + num(q),
                   make_complete(n), std::shared_ptr<Strategy>(water_filling(q, eps)), EnvConfig{eps, K, 0},
                   q, true, true});
  };
  wf(4, 6, 0.5, 0.5);
  wf(4, 5, 0.5, 0.5);
  wf(3, 7, 0.0, 0.25);
  wf(5, 5, 0.3, 0.3);
  wf(6, 5, 0.2, 0.25);
  wf(2, 4, 0.4, 0.6);
  {
    const Graph g = make_erdos_renyi(5, 0.6, 3);
    out.push_back({"er n=5 p=0.6 K=5 eps=0.3 wf q=0.4", g, std::shared_ptr<Strategy>(water_filling(0.4, 0.3)),
                   EnvConfig{0.3, 5, 0}, 0.4, true, false});
  }
  {
    const Graph g = make_k_clique(6, 2);
    out.push_back({"2-clique n=6 K=5 eps=0.3 clique-wf q=0.4", g,
                   std::shared_ptr<Strategy>(clique_water_filling(0.4, 0.3, g)), EnvConfig{0.3, 5, 0}, 0.4,
                   false, false});
  }
  out.push_back({"complete n=4 K=4 eps=0.5 greedy", make_complete(4), std::shared_ptr<Strategy>(greedy(0.5)),
                 EnvConfig{0.5, 4, 0}, 0.0, false, true});
  return out;
}

void collect_oracle_pmfs(Context& ctx, const OracleInstance& inst, const ExactDistribution& exact) {
  ctx.exact_pmfs.push_back({"oracle T " + inst.label, exact.t_pmf, exact.mean_T});
  ctx.exact_pmfs.push_back({"oracle T_IH " + inst.label, exact.tih_pmf, exact.mean_TIH});
}

// ---------------------------------------------------------------- criterion 6

CriterionResult oracle_equivalence(Context& ctx) {
  CriterionResult r{6, "oracle equivalence", false, {}, 0.0};
  const std::size_t n = 4;
  const std::size_t K = 6;
  const double eps = 0.5;
  const double q = 0.5;
  const Graph g = make_complete(n);
  const auto wf = water_filling(q, eps);
  const EnvConfig env{eps, K, 0};
  auto exact = std::make_shared<ExactDistribution>(exact_posterior(g, *wf, env));

  const std::size_t episodes = 1000000;
  using Counts = std::vector<std::uint64_t>;
  auto body = [&](std::size_t b, std::size_t e, Counts& acc) {
    for (std::size_t i = b; i < e; ++i) {
      Rng rng = make_rng(kOracleSeed, {i});
      const VertexId goal = static_cast<VertexId>(uniform_index(rng, n));
      const EpisodeRecord rec = run_episode(g, *wf, env, goal, rng);
      ++acc[rec.T - 1];
    }
  };
  const Counts counts = detail::parallel_reduce<Counts>(
      episodes, ctx.options.workers, [&] { return Counts(K + 1, 0); }, body,
      [](Counts& a, const Counts& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
      });
  const double N = static_cast<double>(episodes);
  double worst_z = 0.0;
  bool pmf_ok = true;
  for (std::size_t t = 1; t <= K + 1; ++t) {
    const double p = exact->t_pmf[t - 1];
    const double f = static_cast<double>(counts[t - 1]) / N;
    const double se = std::sqrt(p * (1.0 - p) / N);
    if (se == 0.0) {
      if (f != p) pmf_ok = false;
      continue;
    }
    worst_z = std::max(worst_z, std::abs(f - p) / se);
  }
  pmf_ok = pmf_ok && worst_z <= 4.0;

  const double bayes = exact_estimator_risk(*exact, *bayes_map_estimator(exact));
  const double first = exact_estimator_risk(*exact, *first_step_estimator());
  const bool bayes_ok = std::abs(bayes - exact->optimal_risk) <= 1e-12;
  const bool first_ok = first <= exact->optimal_risk + 1e-15;
  const bool mass_ok = std::abs(exact->total_mass - 1.0) <= 1e-10;

  ctx.exact_pmfs.push_back({"oracle T complete n=4 K=6", exact->t_pmf, exact->mean_T});
  ctx.exact_pmfs.push_back({"oracle T_IH complete n=4 K=6", exact->tih_pmf, exact->mean_TIH});

  r.passed = pmf_ok && bayes_ok && first_ok && mass_ok;
  r.detail = "T PMF max z=" + num(worst_z, 3) + " over 1e6 episodes (tol 4); bayes risk " + num(bayes, 15) +
             " vs optimal " + num(exact->optimal_risk, 15) + " (|diff| " +
             num(std::abs(bayes - exact->optimal_risk), 3) + "); first-step " + num(first, 10) +
             " <= optimal; total mass " + num(exact->total_mass, 15);
  return r;
}

// ---------------------------------------------------------------- criterion 7

// Independent generator of admissible intentional-hitting-time laws: each
// hazard stays below min(1 - eps, q / S) so no bucket exceeds q and no attempt
// succeeds with probability above 1 - eps.
struct RandomPmf {
  double mean = 0.0;
  double max_bucket = 0.0;
  double total = 0.0;
};

RandomPmf random_feasible_pmf(double q, double eps, Rng& rng) {
  const double pin = uniform01(rng);
  const double shape = 0.05 + 2.0 * uniform01(rng);
  RandomPmf out;
  double survival = 1.0;
  double t = 0.0;
  while (survival > 1e-16) {
    t += 1.0;
    const double cap = std::min(1.0 - eps, q / survival);
    const double u = uniform01(rng);
    const double h = uniform01(rng) < pin ? cap : cap * std::pow(u, shape);
    const double mass = h * survival;
    out.mean += t * mass;
    out.max_bucket = std::max(out.max_bucket, mass);
    out.total += mass;
    survival -= mass;
    if (t > 1e7) break;
  }
  out.mean += (t + 1.0) * survival;
  out.total += survival;
  return out;
}

CriterionResult optimality(Context& ctx) {
  CriterionResult r{7, "water-filling optimality against random feasible laws", false, {}, 0.0};
  const double qs[] = {0.1, 0.21, 0.5};
  const double epss[] = {0.0, 0.3, 0.5};
  double worst = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  bool feasible = true;
  for (double q : qs) {
    for (double eps : epss) {
      const double target = expected_tih(q, eps);
      for (std::size_t i = 0; i < 1000; ++i) {
        Rng rng = make_rng(kOptimalitySeed, {static_cast<std::uint64_t>(q * 1000), static_cast<std::uint64_t>(eps * 1000), i});
        const RandomPmf p = random_feasible_pmf(q, eps, rng);
        if (p.max_bucket > q + 1e-12 || std::abs(p.total - 1.0) > 1e-9) feasible = false;
        worst = std::min(worst, p.mean - target);
        ++count;
      }
      const TihPmf wf = tih_pmf(q, eps, WaterFillingSchedule(q, eps).t_star() + 200);
      ctx.exact_pmfs.push_back({"recursion q=" + num(q) + " eps=" + num(eps), wf.probs, tih_mean_exact(q, eps)});
    }
  }
  r.passed = feasible && worst >= -1e-9;
  r.detail = std::to_string(count) + " random laws, min (mean - expected_tih) = " + num(worst, 4) +
             " (tol -1e-9)" + (feasible ? "" : "; generator produced an infeasible law");
  return r;
}

// ---------------------------------------------------------------- criterion 8

CriterionResult lower_floor(const Context& ctx) {
  CriterionResult r{8, "lower-bound floor on every PMF", false, {}, 0.0};
  double worst_exact = std::numeric_limits<double>::infinity();
  std::string worst_exact_label;
  for (const NamedPmf& p : ctx.exact_pmfs) {
    const double mx = *std::max_element(p.pmf.begin(), p.pmf.end());
    const double margin = mx - 1.0 / (2.0 * p.mean + 1.0);
    if (margin < worst_exact) {
      worst_exact = margin;
      worst_exact_label = p.label;
    }
  }
  double worst_z = -std::numeric_limits<double>::infinity();
  std::string worst_point;
  bool ok = worst_exact >= 0.0 && !ctx.exact_pmfs.empty();
  for (const MeasuredPoint& pt : ctx.sweep_points) {
    const double se = std::sqrt(pt.max_freq * (1.0 - pt.max_freq) / static_cast<double>(pt.trials));
    const double floor = 1.0 / (2.0 * pt.mean_delay + 1.0);
    if (pt.max_freq < floor - 3.0 * se) ok = false;
    const double z = se > 0 ? (floor - pt.max_freq) / se : (floor > pt.max_freq ? 1e9 : -1e9);
    if (z > worst_z) {
      worst_z = z;
      worst_point = pt.label;
    }
  }
  r.passed = ok;
  r.detail = std::to_string(ctx.exact_pmfs.size()) + " exact PMFs, min margin " + num(worst_exact, 4) + " (" +
             worst_exact_label + "); " + std::to_string(ctx.sweep_points.size()) +
             " sweep points, worst (floor - max freq)/se = " + num(worst_z, 3) + " (tol 3)";
  return r;
}

// ---------------------------------------------------------------- criterion 9

CriterionResult bound_inequalities(Context& ctx) {
  CriterionResult r{9, "delay and risk bound inequalities", false, {}, 0.0};
  const std::size_t n = 100;
  const std::size_t k = 5;
  const double eps = 0.3;
  const double w = 8.0;
  SweepConfig cfg;
  cfg.graph = {GraphKind::k_clique, n, 1.0, k, 1};
  cfg.epsilon = eps;
  cfg.strategy = "clique-wf";
  cfg.w_grid = {w};
  cfg.trials = 200000;
  cfg.master_seed = kCliqueSeed;
  cfg.workers = ctx.options.workers;
  cfg.full_episodes = false;
  const SweepResult res = run_sweep(cfg);
  log_sweep(ctx, "5-clique n=100 eps=0.3", res);
  ctx.add_points("5-clique n=100", res);
  const TradeoffPoint& pt = res.points.front();
  const RiskEstimate& risk = pt.risks.front().risk;
  const double delay_bound = clique_delay_upper(pt.q_bar, eps, n, k);
  const double risk_bound = clique_risk_upper(pt.q_bar, n, k, res.horizon, w);
  const bool delay_ok = pt.mean_delay <= delay_bound + 3.0 * pt.delay_se;
  const bool risk_ok = risk.risk <= risk_bound + 3.0 * risk.std_err;

  bool lemma_ok = true;
  std::size_t lemma5 = 0;
  std::size_t lemma_diff = 0;
  double worst5 = -1.0;
  double worst_diff = -1.0;
  for (const OracleInstance& inst : oracle_instances()) {
    const ExactDistribution exact = exact_posterior(inst.graph, *inst.strategy, inst.env);
    collect_oracle_pmfs(ctx, inst, exact);
    if (!inst.water_filling) continue;
    const double dmin = static_cast<double>(inst.graph.min_degree());
    const double diff_bound = 1.0 - std::pow(1.0 - 1.0 / dmin, static_cast<double>(inst.env.horizon));
    worst_diff = std::max(worst_diff, exact.prob_tih_ne_t - diff_bound);
    if (exact.prob_tih_ne_t > diff_bound + 1e-12) lemma_ok = false;
    ++lemma_diff;
    const double b5 = inst.q_bar * static_cast<double>(inst.graph.max_degree()) /
                      static_cast<double>(inst.graph.size());
    ctx.log("    " + inst.label + ": P(guess T_IH)=" + num(exact.tih_bayes_success) + " vs " + num(b5) +
            ", P(T_IH!=T)=" + num(exact.prob_tih_ne_t) + " vs " + num(diff_bound));
    if (inst.complete) {
      worst5 = std::max(worst5, exact.tih_bayes_success - b5);
      if (exact.tih_bayes_success > b5 + 1e-12) lemma_ok = false;
      ++lemma5;
    }
  }
  r.passed = delay_ok && risk_ok && lemma_ok;
  r.detail = "q=" + num(pt.q_bar) + " delay " + num(pt.mean_delay) + " (se " + num(pt.delay_se, 3) +
             ") <= " + num(delay_bound) + (delay_ok ? "" : " FAILS") + "; risk " + num(risk.risk) + " <= " +
             num(risk_bound) + (risk_ok ? "" : " FAILS") + "; exact T_IH-guess bound on " +
             std::to_string(lemma5) + " instances (max excess " + num(worst5, 3) + "), T_IH!=T bound on " +
             std::to_string(lemma_diff) + " instances (max excess " + num(worst_diff, 3) + ")";
  return r;
}

// --------------------------------------------------------------- criterion 10

CriterionResult family_membership(Context& ctx) {
  CriterionResult r{10, "Erdos-Renyi family membership", false, {}, 0.0};
  const MembershipSummary s = run_membership_experiment(1000, 0.5, 200, kMembershipSeed, ctx.options.workers);
  r.passed = s.rate >= 0.95;
  r.detail = std::to_string(s.members) + "/" + std::to_string(s.samples) + " members (rate " + num(s.rate) +
             ", need >= 0.95), gamma=" + num(s.gamma) + ", degree failures " +
             std::to_string(s.degree_failures) + ", overlap failures " + std::to_string(s.overlap_failures) +
             ", min overlap " + num(s.min_overlap);
  return r;
}

using Runner = std::function<CriterionResult(Context&)>;

CriterionResult timed(const Runner& f, Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r = f(ctx);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void floor_sources(Context& ctx) {
  for (const OracleInstance& inst : oracle_instances())
    collect_oracle_pmfs(ctx, inst, exact_posterior(inst.graph, *inst.strategy, inst.env));
  for (double q : {0.1, 0.21, 0.25, 0.5, 1.0}) {
    for (double eps : {0.0, 0.3, 0.5, 0.7}) {
      const TihPmf p = tih_pmf(q, eps, WaterFillingSchedule(q, eps).t_star() + 400);
      ctx.exact_pmfs.push_back({"recursion q=" + num(q) + " eps=" + num(eps), p.probs, tih_mean_exact(q, eps)});
    }
  }
  SweepConfig cfg;
  cfg.graph = {GraphKind::complete, 100, 1.0, 1, 1};
  cfg.epsilon = 0.3;
  cfg.w_grid = make_grid(3, 15, 1);
  cfg.trials = 100000;
  cfg.master_seed = kFig2Seed;
  cfg.workers = ctx.options.workers;
  ctx.add_points("complete n=100 eps=0.3", run_sweep(cfg));
}

}  // namespace

std::vector<std::string> acceptance_suites() {
  return {"closed-forms", "pmf", "tradeoff", "er", "oracle", "floor", "bounds", "membership", "all"};
}

std::vector<CriterionResult> run_acceptance(const std::string& suite, const AcceptanceOptions& options) {
  Context ctx;
  ctx.options = options;
  std::vector<CriterionResult> out;
  auto run = [&](const Runner& f) {
    out.push_back(timed(f, ctx));
    ctx.log(format_result(out.back()));
  };
  if (suite == "closed-forms") {
    run(closed_form_round_trip);
    run(optimality);
  } else if (suite == "pmf") {
    run(pmf_fidelity);
  } else if (suite == "tradeoff") {
    run(fig2_reproduction);
    run(size_convergence);
  } else if (suite == "er") {
    run(er_comparison);
  } else if (suite == "oracle") {
    run(oracle_equivalence);
  } else if (suite == "floor") {
    run([](Context& c) {
      floor_sources(c);
      return lower_floor(c);
    });
  } else if (suite == "bounds") {
    run(bound_inequalities);
  } else if (suite == "membership") {
    run(family_membership);
  } else if (suite == "all") {
    run(closed_form_round_trip);
    run(pmf_fidelity);
    run(fig2_reproduction);
    run(size_convergence);
    run(er_comparison);
    run(oracle_equivalence);
    run(optimality);
    run(bound_inequalities);
    run([](Context& c) { return lower_floor(c); });
    run(family_membership);
    std::stable_sort(out.begin(), out.end(),
                     [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  } else {
    throw Error(Errc::invalid_argument, "unknown acceptance suite '" + suite + "'");
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.title << ": " << r.detail << " ("
     << num(r.seconds, 3) << "s)";
  return os.str();
}

}  // namespace anonroute
