#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "anonroute/graph.hpp"
#include "anonroute/rng.hpp"

namespace anonroute {

enum class MetaAction : std::uint8_t { random_step, goal_attempt, directed, forced_send };

std::string_view to_string(MetaAction meta);

struct Decision {
  VertexId action = 0;
  MetaAction meta = MetaAction::random_step;
};

struct WeightedDecision {
  VertexId action = 0;
  MetaAction meta = MetaAction::random_step;
  double probability = 0.0;
};

/// Per-episode mutable state. Created fresh for every episode, so a strategy
/// object itself is immutable and can be shared by concurrent episodes.
struct StrategyState {
  std::size_t counter = 0;  // L(t): visits to the counted region at times 1..t
  bool post_hit = false;    // an intentional goal hit has happened
  std::vector<VertexId> path;
  std::size_t path_index = 0;
};

/// Attempt schedule of the Water-Filling strategy for a target risk level.
///
/// t* = ceil(1/q - eps/(1-eps)) (at least 1), and the attempt probability after
/// L visits is q / ((1-eps)(1 - L q)) for L < t* - 1, else 1. With this choice
/// every bucket of the intentional hitting-time PMF up to t* - 1 is exactly q.
class WaterFillingSchedule {
 public:
  WaterFillingSchedule(double q_bar, double epsilon);

  double q_bar() const noexcept { return q_bar_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t t_star() const noexcept { return t_star_; }
  double attempt_prob(std::size_t visits) const;

 private:
  double q_bar_;
  double epsilon_;
  std::size_t t_star_;
};

/// Agent strategy consumed by the dynamics. The strategy sees the current
/// state, the goal and its own per-episode state; never the adversary's view.
class Strategy {
 public:
  virtual ~Strategy() = default;

  /// Short selector name ("wf", "clique-wf", "asb", "greedy").
  virtual std::string name() const = 0;
  /// Name plus parameters; used in config digests and reports.
  virtual std::string describe() const = 0;

  /// Throws Errc::configuration if the strategy cannot run on g.
  virtual void validate(const Graph& g) const { (void)g; }

  virtual StrategyState begin_episode(const Graph& g, VertexId goal, Rng& rng) const;

  virtual Decision decide(const Graph& g, VertexId x, VertexId goal, std::size_t t,
                          StrategyState& state, Rng& rng) const = 0;

  /// Bookkeeping after a transition into `next`: updates L(t) and post_hit.
  virtual void observe(const Graph& g, VertexId next, VertexId goal, bool intentional_hit,
                       StrategyState& state) const;

  /// Membership of v in the region whose visits L(t) counts.
  virtual bool counts_visit(const Graph& g, VertexId v, VertexId goal) const;

  /// True when the action law depends on history only through (x, L, post_hit).
  virtual bool has_kernel() const { return false; }

  /// Action law for the Markov summary (x, L, post_hit); appends to out.
  /// Only meaningful when has_kernel().
  virtual void kernel(const Graph& g, VertexId x, VertexId goal, std::size_t counter,
                      bool post_hit, std::vector<WeightedDecision>& out) const;
};

std::unique_ptr<Strategy> water_filling(double q_bar, double epsilon);

/// Requires g to carry clique metadata (Errc::configuration otherwise).
std::unique_ptr<Strategy> clique_water_filling(double q_bar, double epsilon, const Graph& g);

/// Path length max(1, round(w * p * (1 - eps))) targets an expected delay of
/// about w under a per-hop overhead of 1/(p(1-eps)).
std::unique_ptr<Strategy> adapted_segment_based(double w_target, double epsilon, double p_density);
std::size_t asb_path_length(double w_target, double epsilon, double p_density);

std::unique_ptr<Strategy> greedy(double epsilon);

}  // namespace anonroute
