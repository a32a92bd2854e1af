#include "anonroute/dynamics.hpp"

#include <sstream>

#include "anonroute/error.hpp"

namespace anonroute {

void EnvConfig::validate(const Graph& g) const {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(Errc::domain, "noise level must lie in [0, 1)");
  if (horizon < 1) throw Error(Errc::invalid_argument, "horizon must be at least 1");
  if (start_vertex >= g.size()) throw Error(Errc::invalid_argument, "start vertex out of range");
}

VertexId TrajectoryView::at(std::size_t t) const {
  if (t < 1 || t > states_.size() || t > horizon_)
    throw Error(Errc::invalid_argument, "trajectory index " + std::to_string(t) + " not observable");
  return states_[t - 1];
}

TrajectoryView EpisodeRecord::observed() const {
  const std::size_t m = std::min(states.size(), horizon);
  return TrajectoryView(std::span<const VertexId>(states.data(), m), horizon);
}

StepResult step(const Graph& g, VertexId x, VertexId a, double epsilon, Rng& rng) {
  if (!g.adjacent(x, a))
    throw Error(Errc::illegal_action,
                "action " + std::to_string(a) + " is not a neighbor of " + std::to_string(x));
  if (epsilon > 0.0 && uniform01(rng) < epsilon) {
    auto nbrs = g.neighbors(x);
    return {nbrs[uniform_index(rng, nbrs.size())], false};
  }
  return {a, true};
}

namespace {

EpisodeRecord begin_record(const EnvConfig& env, VertexId goal) {
  EpisodeRecord rec;
  rec.goal = goal;
  rec.start = env.start_vertex;
  rec.horizon = env.horizon;
  rec.T = env.horizon + 1;
  rec.T_IH = env.horizon + 1;
  rec.states.reserve(env.horizon + 1);
  rec.actions.reserve(env.horizon + 1);
  rec.noise_flags.reserve(env.horizon + 1);
  rec.meta.reserve(env.horizon + 1);
  return rec;
}

void push_forced_send(EpisodeRecord& rec) {
  rec.actions.push_back(rec.goal);
  rec.noise_flags.push_back(1);
  rec.meta.push_back(MetaAction::forced_send);
  rec.states.push_back(rec.goal);
}

// Records the transition taken at time t and updates T / T_IH.
// Returns whether it was an intentional hit.
bool push_transition(EpisodeRecord& rec, std::size_t t, VertexId action, MetaAction meta,
                     bool fulfilled, VertexId next) {
  rec.actions.push_back(action);
  rec.noise_flags.push_back(fulfilled ? 1 : 0);
  rec.meta.push_back(meta);
  rec.states.push_back(next);
  const std::size_t K = rec.horizon;
  if (next == rec.goal && rec.T > K && t + 1 <= K) rec.T = t + 1;
  const bool intentional = meta == MetaAction::goal_attempt && fulfilled && action == rec.goal;
  if (intentional && rec.T_IH > K && t + 1 <= K) rec.T_IH = t + 1;
  return intentional;
}

}  // namespace

EpisodeRecord run_episode(const Graph& g, const Strategy& strategy, const EnvConfig& env,
                          VertexId goal, Rng& rng, const RunOptions& options) {
  env.validate(g);
  if (goal >= g.size()) throw Error(Errc::invalid_argument, "goal out of range");
  EpisodeRecord rec = begin_record(env, goal);
  const std::size_t K = env.horizon;
  StrategyState state = strategy.begin_episode(g, goal, rng);
  VertexId x = env.start_vertex;
  for (std::size_t t = 0; t <= K; ++t) {
    if (t == K && rec.T > K) {
      push_forced_send(rec);
      break;
    }
    const Decision d = strategy.decide(g, x, goal, t, state, rng);
    if (!g.adjacent(x, d.action))
      throw Error(Errc::illegal_action, "strategy " + strategy.name() + " chose non-neighbor " +
                                            std::to_string(d.action) + " at t=" + std::to_string(t));
    const StepResult s = step(g, x, d.action, env.epsilon, rng);
    const bool intentional = push_transition(rec, t, d.action, d.meta, s.fulfilled, s.next);
    strategy.observe(g, s.next, goal, intentional, state);
    x = s.next;
    if (rec.T_IH <= K && t + 1 >= options.observe_until && t + 1 <= K) {
      rec.truncated = t < K;
      break;
    }
  }
  return rec;
}

EpisodeRecord replay_episode(const Graph& g, std::span<const ScriptedStep> script,
                             const EnvConfig& env, VertexId goal) {
  env.validate(g);
  if (goal >= g.size()) throw Error(Errc::invalid_argument, "goal out of range");
  const std::size_t K = env.horizon;
  if (script.size() > K)
    throw Error(Errc::invalid_argument, "script longer than the horizon");
  EpisodeRecord rec = begin_record(env, goal);
  VertexId x = env.start_vertex;
  for (std::size_t t = 0; t <= K; ++t) {
    if (t == K && rec.T > K) {
      push_forced_send(rec);
      break;
    }
    if (t >= script.size()) {
      if (rec.T <= K) {
        rec.truncated = true;
        break;
      }
      throw Error(Errc::invalid_argument, "script ends at index " + std::to_string(t) +
                                              " before the goal is reached");
    }
    const ScriptedStep& s = script[t];
    if (!g.adjacent(x, s.action))
      throw Error(Errc::illegal_action, "scripted action at index " + std::to_string(t) +
                                            " is not a neighbor of " + std::to_string(x));
    if (!s.fulfilled && !g.adjacent(x, s.noise_target))
      throw Error(Errc::illegal_action, "scripted noise target at index " + std::to_string(t) +
                                            " is not a neighbor of " + std::to_string(x));
    const VertexId next = s.fulfilled ? s.action : s.noise_target;
    const MetaAction meta = s.action == goal ? MetaAction::goal_attempt : MetaAction::directed;
    push_transition(rec, t, s.action, meta, s.fulfilled, next);
    x = next;
  }
  return rec;
}

std::optional<std::string> check_episode_invariants(const Graph& g, const EpisodeRecord& rec) {
  const std::size_t K = rec.horizon;
  const std::size_t len = rec.states.size();
  if (rec.actions.size() != len || rec.noise_flags.size() != len || rec.meta.size() != len)
    return "field lengths differ";
  if (len > K + 1) return "record longer than K+1 transitions";
  if (!rec.truncated && len != K + 1) return "untruncated record does not reach K+1";
  VertexId x = rec.start;
  std::size_t first_hit = K + 1;
  std::size_t first_intentional = K + 1;
  for (std::size_t i = 0; i < len; ++i) {
    const VertexId next = rec.states[i];
    // The forced send delivers to D from anywhere, adjacent or not.
    if (rec.meta[i] != MetaAction::forced_send && !g.adjacent(x, next))
      return "X_" + std::to_string(i + 1) + " not adjacent to its predecessor";
    if (rec.noise_flags[i] && next != rec.actions[i])
      return "B=1 at t=" + std::to_string(i) + " but next state differs from the action";
    if (rec.meta[i] == MetaAction::forced_send) {
      if (i != K) return "forced send before the horizon";
      if (next != rec.goal || !rec.noise_flags[i]) return "forced send does not deliver";
    } else if (!g.adjacent(x, rec.actions[i])) {
      return "illegal action at t=" + std::to_string(i);
    }
    if (i + 1 <= K && next == rec.goal && first_hit > K) first_hit = i + 1;
    if (i + 1 <= K && rec.meta[i] == MetaAction::goal_attempt && rec.noise_flags[i] &&
        rec.actions[i] == rec.goal && first_intentional > K)
      first_intentional = i + 1;
    x = next;
  }
  if (rec.T != first_hit) return "T does not match the first goal visit";
  if (rec.T_IH != first_intentional) return "T_IH does not match the first intentional hit";
  if (rec.T > rec.T_IH) return "T exceeds T_IH";
  if (!rec.truncated && rec.T > K) {
    if (rec.states.back() != rec.goal || !rec.noise_flags.back()) return "missing forced send";
  }
  return std::nullopt;
}

std::string format_episode(const EpisodeRecord& rec) {
  std::ostringstream os;
  os << "goal=" << rec.goal << " T=" << rec.T << " T_IH=" << rec.T_IH << " states=";
  for (std::size_t i = 0; i < rec.states.size(); ++i) os << (i ? "," : "") << rec.states[i];
  return os.str();
}

}  // namespace anonroute
