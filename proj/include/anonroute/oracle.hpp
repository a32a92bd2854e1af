#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "anonroute/adversary.hpp"
#include "anonroute/dynamics.hpp"
#include "anonroute/graph.hpp"
#include "anonroute/strategy.hpp"

namespace anonroute {

/// Largest instances the enumeration accepts.
inline constexpr std::size_t kOracleMaxVertices = 6;
inline constexpr std::size_t kOracleMaxHorizon = 7;

/// Exact law of (X_1..X_K, D) with D uniform, plus hitting-time marginals.
///
/// The enumeration tracks, per goal, the weight of each T_IH value on every
/// trajectory prefix. That is enough because a strategy with a kernel acts on
/// (X_t, L(t), post_hit) only: L(t) is a function of the prefix and the goal,
/// and post_hit is "T_IH already resolved".
struct ExactDistribution {
  std::uint64_t config_digest = 0;
  std::size_t n = 0;
  std::size_t horizon = 0;
  /// Base-n code of X_1..X_K -> P(X = x, D = v) for v = 0..n-1. Only
  /// trajectories of positive probability are present.
  std::unordered_map<std::uint64_t, std::vector<double>> joint;
  std::vector<double> t_pmf;    // [t - 1] = P(T = t), t = 1..K+1
  std::vector<double> tih_pmf;  // [t - 1] = P(T_IH = t), t = 1..K+1
  double mean_T = 0.0;
  double mean_TIH = 0.0;
  double timeout_prob = 0.0;  // P(T > K)
  double total_mass = 0.0;
  /// sum_x max_v P(x, v) + P(T > K).
  double optimal_risk = 0.0;
  double prob_tih_ne_t = 0.0;
  /// sum_x max_{1 <= t <= K+1} P(x, T_IH = t): success of the MAP guess of T_IH.
  double tih_bayes_success = 0.0;

  std::uint64_t encode(std::span<const VertexId> states) const;
  std::vector<VertexId> decode(std::uint64_t code) const;
  /// Throws Errc::invalid_argument if x has probability zero.
  const std::vector<double>& joint_row(std::span<const VertexId> states) const;
  VertexId map_prediction(std::span<const VertexId> states) const;
  /// P(D = v | X = x).
  std::vector<double> posterior(std::span<const VertexId> states) const;
};

/// Exact law of X_1..X_K given one goal.
struct GoalDistribution {
  VertexId goal = 0;
  std::unordered_map<std::uint64_t, double> trajectory_probs;
  std::vector<double> t_pmf;
  std::vector<double> tih_pmf;
  double total_mass = 0.0;
};

/// Throws Errc::size_bound_exceeded beyond the size limits and
/// Errc::unsupported_strategy when the strategy has no kernel.
GoalDistribution exact_trajectory_distribution(const Graph& g, const Strategy& strategy,
                                               const EnvConfig& env, VertexId goal);

ExactDistribution exact_posterior(const Graph& g, const Strategy& strategy, const EnvConfig& env);

/// sum_x P(x, estimator(x)) + P(T > K).
double exact_estimator_risk(const ExactDistribution& exact, const Estimator& estimator);

std::uint64_t config_digest(const Graph& g, const Strategy& strategy, const EnvConfig& env);

}  // namespace anonroute
