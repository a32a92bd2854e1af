#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "anonroute/adversary.hpp"
#include "anonroute/graph.hpp"
#include "anonroute/strategy.hpp"

namespace anonroute {

struct GraphSpec {
  GraphKind kind = GraphKind::complete;
  std::size_t n = 100;
  double p = 1.0;      // edge density (erdos_renyi)
  std::size_t k = 1;   // clique count (k_clique)
  std::uint64_t seed = 1;
};

/// Instance i of an Erdos-Renyi spec uses seed derive_seed(spec.seed, {i}).
Graph build_graph(const GraphSpec& spec, std::size_t instance = 0);

/// Edge density used in risk-target calibration: p for Erdos-Renyi, 1 otherwise.
double density_of(const GraphSpec& spec);

/// Water-Filling risk target for delay budget w on the spec's topology:
/// 1/(2wp - 1 - c_eps) with p the density, or 1/(2w rho - 1 - c_eps) on
/// k-clique graphs. Throws Errc::infeasible_delay below the matching floor.
double risk_target_for_graph(const GraphSpec& spec, double w, double epsilon);

struct SweepConfig {
  GraphSpec graph;
  double epsilon = 0.0;
  std::string strategy = "wf";  // wf | clique-wf | asb | greedy
  std::vector<std::string> adversaries{"first-step"};  // first-step | time-argmax
  std::size_t t_hat = 1;        // time-argmax index
  std::vector<double> w_grid;   // delay budgets; ignored when q_grid is set
  std::vector<double> q_grid;   // explicit risk targets (wf / clique-wf only)
  std::size_t trials = 1000;    // per goal cell, or per instance when goals_per_instance == 0
  std::size_t graph_instances = 1;
  std::size_t goals_per_instance = 0;  // 0: a fresh uniform goal for every episode
  std::uint64_t master_seed = 1;
  std::size_t horizon = 0;  // 0: max(20 w_max, 500)
  std::size_t workers = 0;  // 0: hardware concurrency
  bool full_episodes = false;  // disable early stopping after the observed prefix

  void validate() const;
  std::size_t resolved_horizon() const;
  std::size_t episodes_per_point() const;
};

/// Builds a grid min, min+step, ... <= max (inclusive up to round-off).
std::vector<double> make_grid(double min, double max, double step);

struct AdversaryRisk {
  std::string adversary;
  RiskEstimate risk;
};

struct TradeoffPoint {
  double w_target = 0.0;
  double q_bar = 0.0;  // NaN when the strategy has no risk target
  std::uint64_t trials = 0;
  double mean_delay = 0.0;
  double delay_se = 0.0;
  double mean_tih = 0.0;
  double timeout_frac = 0.0;
  double max_t_freq = 0.0;  // max_t of the empirical P(T = t)
  std::vector<AdversaryRisk> risks;
  double bound_lower = 0.0;  // analytic curves at the measured delay; NaN if none
  double bound_upper = 0.0;
  bool bound_valid = false;  // measured delay above the curve's validity floor
};

struct SweepWarning {
  double w_target = 0.0;
  std::string message;
};

struct SweepResult {
  SweepConfig config;
  std::size_t horizon = 0;
  std::vector<TradeoffPoint> points;  // sorted by mean_delay
  std::vector<SweepWarning> warnings;
};

SweepResult run_sweep(const SweepConfig& cfg);

/// Fixed columns: graph_kind,n,p,k,eps,w_target,q_bar,trials,mean_delay,delay_se,
/// adversary,risk,risk_se,timeout_frac,bound_lower,bound_upper,seed.
void write_sweep_csv(std::ostream& os, const SweepResult& result);
std::string sweep_json(const SweepResult& result);

struct MembershipSummary {
  std::size_t n = 0;
  double p = 0.0;
  double gamma = 0.0;
  std::size_t samples = 0;
  std::size_t members = 0;
  std::size_t degree_failures = 0;
  std::size_t overlap_failures = 0;
  double min_overlap = 1.0;
  double rate = 0.0;
  MembershipReport first_failure;  // empty when every sample is a member
};

/// Sample i is make_erdos_renyi(n, p, derive_seed(seed, {i})), checked with
/// default_gamma(n). Throws Errc::invalid_argument when samples == 0.
MembershipSummary run_membership_experiment(std::size_t n, double p, std::size_t samples,
                                            std::uint64_t seed, std::size_t workers = 0);

}  // namespace anonroute
