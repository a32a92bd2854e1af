#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anonroute/graph.hpp"
#include "anonroute/rng.hpp"
#include "anonroute/strategy.hpp"

namespace anonroute {

struct EnvConfig {
  double epsilon = 0.0;
  std::size_t horizon = 1;  // K
  VertexId start_vertex = 0;

  /// Throws Errc::domain / Errc::invalid_argument on a bad config for g.
  void validate(const Graph& g) const;
};

/// What the adversary is allowed to see: X_1..X_K and nothing else.
class TrajectoryView {
 public:
  TrajectoryView(std::span<const VertexId> states, std::size_t horizon)
      : states_(states), horizon_(horizon) {}

  std::size_t horizon() const noexcept { return horizon_; }
  /// Number of leading states present (less than K for truncated episodes).
  std::size_t available() const noexcept { return states_.size(); }
  /// X_t for 1 <= t <= available().
  VertexId at(std::size_t t) const;

 private:
  std::span<const VertexId> states_;
  std::size_t horizon_;
};

/// One play. Index i of actions/noise_flags/meta is the decision taken at
/// time t = i (t = 0..K); states[i] is X_{i+1}. A truncated record stops once
/// T_IH is known and the requested observation prefix has been produced.
struct EpisodeRecord {
  VertexId goal = 0;
  VertexId start = 0;
  std::size_t horizon = 0;
  std::vector<VertexId> states;
  std::vector<VertexId> actions;
  std::vector<std::uint8_t> noise_flags;
  std::vector<MetaAction> meta;
  std::size_t T = 0;
  std::size_t T_IH = 0;
  bool truncated = false;

  bool timed_out() const noexcept { return T > horizon; }
  TrajectoryView observed() const;
};

struct StepResult {
  VertexId next = 0;
  bool fulfilled = false;  // B = 1
};

/// Plays a from x: a with probability 1 - eps, else a uniform member of N(x).
StepResult step(const Graph& g, VertexId x, VertexId a, double epsilon, Rng& rng);

struct RunOptions {
  /// Stop once T_IH is resolved and X_1..X_{observe_until} exist.
  std::size_t observe_until = std::numeric_limits<std::size_t>::max();
};

EpisodeRecord run_episode(const Graph& g, const Strategy& strategy, const EnvConfig& env,
                          VertexId goal, Rng& rng, const RunOptions& options = {});

struct ScriptedStep {
  VertexId action = 0;
  bool fulfilled = true;
  VertexId noise_target = 0;  // used when !fulfilled
};

/// Deterministic replay. Each entry supplies a_t, B_t and the noise draw.
/// After the script ends the record stops if the goal was already reached;
/// otherwise the script must run to t = K - 1 so the forced send applies.
EpisodeRecord replay_episode(const Graph& g, std::span<const ScriptedStep> script,
                             const EnvConfig& env, VertexId goal);

/// First violated record invariant, if any.
std::optional<std::string> check_episode_invariants(const Graph& g, const EpisodeRecord& rec);

/// "goal=<D> T=<T> T_IH=<T_IH> states=<x1,x2,...>"
std::string format_episode(const EpisodeRecord& rec);

}  // namespace anonroute
