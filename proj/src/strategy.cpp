#include "anonroute/strategy.hpp"

#include <cmath>
#include <sstream>

#include "anonroute/error.hpp"

namespace anonroute {

namespace {

Decision random_step(const Graph& g, VertexId x, Rng& rng) {
  auto nbrs = g.neighbors(x);
  return {nbrs[uniform_index(rng, nbrs.size())], MetaAction::random_step};
}

void uniform_kernel(const Graph& g, VertexId x, double mass, std::vector<WeightedDecision>& out) {
  auto nbrs = g.neighbors(x);
  const double each = mass / static_cast<double>(nbrs.size());
  for (VertexId v : nbrs) out.push_back({v, MetaAction::random_step, each});
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw Error(Errc::domain, "noise level must lie in [0, 1)");
}

std::string format_params(const std::string& name, std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  os.precision(17);
  os << name;
  for (const auto& [k, v] : kv) os << ' ' << k << '=' << v;
  return os.str();
}

class WaterFilling final : public Strategy {
 public:
  WaterFilling(double q_bar, double epsilon) : schedule_(q_bar, epsilon) {}

  std::string name() const override { return "wf"; }
  std::string describe() const override {
    return format_params("wf", {{"q_bar", schedule_.q_bar()}, {"eps", schedule_.epsilon()}});
  }

  Decision decide(const Graph& g, VertexId x, VertexId goal, std::size_t, StrategyState& state,
                  Rng& rng) const override {
    if (!state.post_hit && g.adjacent(x, goal)) {
      const double p = schedule_.attempt_prob(state.counter);
      if (p >= 1.0 || uniform01(rng) < p) return {goal, MetaAction::goal_attempt};
    }
    return random_step(g, x, rng);
  }

  bool counts_visit(const Graph& g, VertexId v, VertexId goal) const override {
    return g.adjacent(v, goal);
  }

  bool has_kernel() const override { return true; }

  void kernel(const Graph& g, VertexId x, VertexId goal, std::size_t counter, bool post_hit,
              std::vector<WeightedDecision>& out) const override {
    double attempt = 0.0;
    if (!post_hit && g.adjacent(x, goal)) attempt = schedule_.attempt_prob(counter);
    if (attempt > 0.0) out.push_back({goal, MetaAction::goal_attempt, attempt});
    if (attempt < 1.0) uniform_kernel(g, x, 1.0 - attempt, out);
  }

 private:
  WaterFillingSchedule schedule_;
};

// Water-Filling inside the goal's clique, directed return along the
// same-position cross edge outside it.
class CliqueWaterFilling final : public Strategy {
 public:
  CliqueWaterFilling(double q_bar, double epsilon) : schedule_(q_bar, epsilon) {}

  std::string name() const override { return "clique-wf"; }
  std::string describe() const override {
    return format_params("clique-wf", {{"q_bar", schedule_.q_bar()}, {"eps", schedule_.epsilon()}});
  }

  void validate(const Graph& g) const override {
    if (!g.clique_meta())
      throw Error(Errc::configuration, "clique water-filling needs a k-clique graph");
  }

  Decision decide(const Graph& g, VertexId x, VertexId goal, std::size_t, StrategyState& state,
                  Rng& rng) const override {
    if (state.post_hit) return random_step(g, x, rng);
    const CliqueMeta& meta = *g.clique_meta();
    if (meta.clique_of(x) != meta.clique_of(goal))
      return {meta.vertex_at(meta.clique_of(goal), meta.position_of(x)), MetaAction::directed};
    const double p = schedule_.attempt_prob(state.counter);
    if (p >= 1.0 || uniform01(rng) < p) return {goal, MetaAction::goal_attempt};
    return random_step(g, x, rng);
  }

  bool counts_visit(const Graph& g, VertexId v, VertexId goal) const override {
    const CliqueMeta& meta = *g.clique_meta();
    return meta.clique_of(v) == meta.clique_of(goal);
  }

  bool has_kernel() const override { return true; }

  void kernel(const Graph& g, VertexId x, VertexId goal, std::size_t counter, bool post_hit,
              std::vector<WeightedDecision>& out) const override {
    if (post_hit) {
      uniform_kernel(g, x, 1.0, out);
      return;
    }
    const CliqueMeta& meta = *g.clique_meta();
    if (meta.clique_of(x) != meta.clique_of(goal)) {
      out.push_back({meta.vertex_at(meta.clique_of(goal), meta.position_of(x)), MetaAction::directed, 1.0});
      return;
    }
    const double attempt = schedule_.attempt_prob(counter);
    out.push_back({goal, MetaAction::goal_attempt, attempt});
    if (attempt < 1.0) uniform_kernel(g, x, 1.0 - attempt, out);
  }

 private:
  WaterFillingSchedule schedule_;
};

class AdaptedSegmentBased final : public Strategy {
 public:
  AdaptedSegmentBased(double w_target, double epsilon, double p_density)
      : w_target_(w_target),
        epsilon_(epsilon),
        p_density_(p_density),
        path_length_(asb_path_length(w_target, epsilon, p_density)) {}

  std::string name() const override { return "asb"; }
  std::string describe() const override {
    return format_params("asb", {{"w", w_target_}, {"eps", epsilon_}, {"p", p_density_}});
  }

  StrategyState begin_episode(const Graph& g, VertexId goal, Rng& rng) const override {
    StrategyState state;
    state.path.resize(path_length_);
    const std::size_t goal_slot = uniform_index(rng, path_length_);
    for (std::size_t i = 0; i < path_length_; ++i)
      state.path[i] = i == goal_slot ? goal : static_cast<VertexId>(uniform_index(rng, g.size()));
    return state;
  }

  Decision decide(const Graph& g, VertexId x, VertexId goal, std::size_t, StrategyState& state,
                  Rng& rng) const override {
    if (state.path_index < state.path.size()) {
      const VertexId target = state.path[state.path_index];
      if (g.adjacent(x, target))
        return {target, target == goal ? MetaAction::goal_attempt : MetaAction::directed};
    }
    return random_step(g, x, rng);
  }

  void observe(const Graph& g, VertexId next, VertexId goal, bool intentional_hit,
               StrategyState& state) const override {
    Strategy::observe(g, next, goal, intentional_hit, state);
    if (state.path_index < state.path.size() && next == state.path[state.path_index])
      ++state.path_index;
  }

 private:
  double w_target_;
  double epsilon_;
  double p_density_;
  std::size_t path_length_;
};

class Greedy final : public Strategy {
 public:
  explicit Greedy(double epsilon) : epsilon_(epsilon) {}

  std::string name() const override { return "greedy"; }
  std::string describe() const override { return format_params("greedy", {{"eps", epsilon_}}); }

  Decision decide(const Graph& g, VertexId x, VertexId goal, std::size_t, StrategyState&,
                  Rng& rng) const override {
    if (g.adjacent(x, goal)) return {goal, MetaAction::goal_attempt};
    return random_step(g, x, rng);
  }

  bool has_kernel() const override { return true; }

  void kernel(const Graph& g, VertexId x, VertexId goal, std::size_t, bool,
              std::vector<WeightedDecision>& out) const override {
    if (g.adjacent(x, goal)) out.push_back({goal, MetaAction::goal_attempt, 1.0});
    else uniform_kernel(g, x, 1.0, out);
  }

 private:
  double epsilon_;
};

}  // namespace

std::string_view to_string(MetaAction meta) {
  switch (meta) {
    case MetaAction::random_step: return "random_step";
    case MetaAction::goal_attempt: return "goal_attempt";
    case MetaAction::directed: return "directed";
    case MetaAction::forced_send: return "forced_send";
  }
  return "random_step";
}

WaterFillingSchedule::WaterFillingSchedule(double q_bar, double epsilon)
    : q_bar_(q_bar), epsilon_(epsilon) {
  if (!(q_bar > 0.0 && q_bar <= 1.0)) throw Error(Errc::domain, "target risk level must lie in (0, 1]");
  check_epsilon(epsilon);
  // Round-off guard: parameters chosen so the threshold is an integer must not
  // be pushed to the next integer by the subtraction below.
  const double x = 1.0 / q_bar - epsilon / (1.0 - epsilon);
  const double t = std::ceil(x - 1e-12 * std::max(1.0, std::abs(x)));
  t_star_ = t < 1.0 ? 1 : static_cast<std::size_t>(t);
}

double WaterFillingSchedule::attempt_prob(std::size_t visits) const {
  if (visits + 1 >= t_star_) return 1.0;
  return q_bar_ / ((1.0 - epsilon_) * (1.0 - static_cast<double>(visits) * q_bar_));
}

StrategyState Strategy::begin_episode(const Graph&, VertexId, Rng&) const { return {}; }

void Strategy::observe(const Graph& g, VertexId next, VertexId goal, bool intentional_hit,
                       StrategyState& state) const {
  if (counts_visit(g, next, goal)) ++state.counter;
  if (intentional_hit) state.post_hit = true;
}

bool Strategy::counts_visit(const Graph&, VertexId, VertexId) const { return false; }

void Strategy::kernel(const Graph&, VertexId, VertexId, std::size_t, bool,
                      std::vector<WeightedDecision>&) const {
  throw Error(Errc::unsupported_strategy, describe() + " has no Markov action kernel");
}

std::unique_ptr<Strategy> water_filling(double q_bar, double epsilon) {
  return std::make_unique<WaterFilling>(q_bar, epsilon);
}

std::unique_ptr<Strategy> clique_water_filling(double q_bar, double epsilon, const Graph& g) {
  auto s = std::make_unique<CliqueWaterFilling>(q_bar, epsilon);
  s->validate(g);
  return s;
}

std::size_t asb_path_length(double w_target, double epsilon, double p_density) {
  check_epsilon(epsilon);
  if (!(p_density > 0.0 && p_density <= 1.0))
    throw Error(Errc::domain, "ASB density must lie in (0, 1]");
  if (!(w_target > 0.0)) throw Error(Errc::domain, "ASB delay target must be positive");
  const double raw = std::round(w_target * p_density * (1.0 - epsilon));
  return raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
}

std::unique_ptr<Strategy> adapted_segment_based(double w_target, double epsilon, double p_density) {
  return std::make_unique<AdaptedSegmentBased>(w_target, epsilon, p_density);
}

std::unique_ptr<Strategy> greedy(double epsilon) {
  check_epsilon(epsilon);
  return std::make_unique<Greedy>(epsilon);
}

}  // namespace anonroute
