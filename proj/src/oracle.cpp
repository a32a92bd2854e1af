#include "anonroute/oracle.hpp"

#include <algorithm>
#include <string>

#include "anonroute/error.hpp"

namespace anonroute {

namespace {

struct Fnv {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* p, std::size_t len) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= c[i];
      h *= 0x100000001b3ULL;
    }
  }
  template <class T>
  void value(const T& v) {
    bytes(&v, sizeof(T));
  }
};

void check_supported(const Graph& g, const Strategy& strategy, const EnvConfig& env) {
  env.validate(g);
  strategy.validate(g);
  if (g.size() > kOracleMaxVertices || env.horizon > kOracleMaxHorizon) {
    throw Error(Errc::size_bound_exceeded,
                "enumeration needs n <= " + std::to_string(kOracleMaxVertices) + " and K <= " +
                    std::to_string(kOracleMaxHorizon) + "; got n=" + std::to_string(g.size()) +
                    ", K=" + std::to_string(env.horizon));
  }
  if (!strategy.has_kernel())
    throw Error(Errc::unsupported_strategy,
                strategy.name() + " depends on more than (state, counter, post_hit)");
}

// Depth-first enumeration of X_1..X_K. For each tracked goal the frame holds
// weights over the T_IH slot s (0 = unresolved, s >= 1 = resolved at s), the
// visit counter L and the first hitting time.
template <class Leaf>
class Enumerator {
 public:
  Enumerator(const Graph& g, const Strategy& strategy, const EnvConfig& env,
             std::vector<VertexId> goals, double prior, Leaf& leaf)
      : g_(g), strategy_(strategy), env_(env), goals_(std::move(goals)), leaf_(leaf),
        K_(env.horizon), S_(env.horizon + 1) {
    const std::size_t G = goals_.size();
    std::vector<double> w(G * S_, 0.0);
    for (std::size_t gi = 0; gi < G; ++gi) w[gi * S_] = prior;
    std::vector<std::size_t> L(G, 0);
    std::vector<std::size_t> T(G, K_ + 1);
    path_.reserve(K_);
    descend(0, env.start_vertex, w, L, T);
  }

  std::size_t slots() const { return S_; }

 private:
  void descend(std::size_t t, VertexId x, const std::vector<double>& w,
               const std::vector<std::size_t>& L, const std::vector<std::size_t>& T) {
    if (t == K_) {
      leaf_(path_, w, T);
      return;
    }
    const std::size_t G = goals_.size();
    auto nbrs = g_.neighbors(x);
    const std::size_t deg = nbrs.size();
    std::vector<double> child(deg * G * S_, 0.0);
    const double eps = env_.epsilon;
    for (std::size_t gi = 0; gi < G; ++gi) {
      const VertexId goal = goals_[gi];
      for (std::size_t s = 0; s <= t; ++s) {
        const double ws = w[gi * S_ + s];
        if (ws == 0.0) continue;
        decisions_.clear();
        strategy_.kernel(g_, x, goal, L[gi], s != 0, decisions_);
        for (const WeightedDecision& d : decisions_) {
          const double pw = ws * d.probability;
          if (pw == 0.0) continue;
          const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), d.action);
          const std::size_t j = static_cast<std::size_t>(it - nbrs.begin());
          const bool hit = s == 0 && d.meta == MetaAction::goal_attempt && d.action == goal;
          child[(j * G + gi) * S_ + (hit ? t + 1 : s)] += pw * (1.0 - eps);
          if (eps > 0.0) {
            const double each = pw * eps / static_cast<double>(deg);
            for (std::size_t k = 0; k < deg; ++k) child[(k * G + gi) * S_ + s] += each;
          }
        }
      }
    }
    std::vector<double> next_w(G * S_);
    std::vector<std::size_t> next_L(G);
    std::vector<std::size_t> next_T(G);
    for (std::size_t j = 0; j < deg; ++j) {
      const VertexId v = nbrs[j];
      const double* slice = child.data() + j * G * S_;
      double mass = 0.0;
      for (std::size_t i = 0; i < G * S_; ++i) mass += slice[i];
      if (mass == 0.0) continue;
      std::copy(slice, slice + G * S_, next_w.begin());
      for (std::size_t gi = 0; gi < G; ++gi) {
        const VertexId goal = goals_[gi];
        next_L[gi] = L[gi] + (strategy_.counts_visit(g_, v, goal) ? 1 : 0);
        next_T[gi] = (T[gi] > K_ && v == goal) ? t + 1 : T[gi];
      }
      path_.push_back(v);
      descend(t + 1, v, next_w, next_L, next_T);
      path_.pop_back();
    }
  }

  const Graph& g_;
  const Strategy& strategy_;
  const EnvConfig& env_;
  std::vector<VertexId> goals_;
  Leaf& leaf_;
  std::size_t K_;
  std::size_t S_;
  std::vector<VertexId> path_;
  std::vector<WeightedDecision> decisions_;
};

std::uint64_t encode_states(std::span<const VertexId> states, std::size_t n) {
  std::uint64_t code = 0;
  for (VertexId v : states) code = code * n + v;
  return code;
}

double mean_of(const std::vector<double>& pmf) {
  double m = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) m += static_cast<double>(i + 1) * pmf[i];
  return m;
}

}  // namespace

std::uint64_t config_digest(const Graph& g, const Strategy& strategy, const EnvConfig& env) {
  Fnv f;
  const std::uint64_t n = g.size();
  f.value(n);
  for (VertexId v = 0; v < g.size(); ++v) {
    const std::uint64_t deg = g.degree(v);
    f.value(deg);
    for (VertexId u : g.neighbors(v)) f.value(u);
  }
  const std::string d = strategy.describe();
  f.bytes(d.data(), d.size());
  f.value(env.epsilon);
  const std::uint64_t K = env.horizon;
  f.value(K);
  f.value(env.start_vertex);
  return f.h;
}

std::uint64_t ExactDistribution::encode(std::span<const VertexId> states) const {
  if (states.size() != horizon) throw Error(Errc::invalid_argument, "trajectory length differs from K");
  for (VertexId v : states)
    if (v >= n) throw Error(Errc::invalid_argument, "trajectory vertex out of range");
  return encode_states(states, n);
}

std::vector<VertexId> ExactDistribution::decode(std::uint64_t code) const {
  std::vector<VertexId> states(horizon);
  for (std::size_t i = horizon; i-- > 0;) {
    states[i] = static_cast<VertexId>(code % n);
    code /= n;
  }
  return states;
}

const std::vector<double>& ExactDistribution::joint_row(std::span<const VertexId> states) const {
  const auto it = joint.find(encode(states));
  if (it == joint.end())
    throw Error(Errc::invalid_argument, "trajectory has probability zero under this configuration");
  return it->second;
}

VertexId ExactDistribution::map_prediction(std::span<const VertexId> states) const {
  const std::vector<double>& row = joint_row(states);
  std::size_t best = 0;
  for (std::size_t v = 1; v < row.size(); ++v)
    if (row[v] > row[best]) best = v;
  return static_cast<VertexId>(best);
}

std::vector<double> ExactDistribution::posterior(std::span<const VertexId> states) const {
  std::vector<double> row = joint_row(states);
  double total = 0.0;
  for (double p : row) total += p;
  for (double& p : row) p /= total;
  return row;
}

GoalDistribution exact_trajectory_distribution(const Graph& g, const Strategy& strategy,
                                               const EnvConfig& env, VertexId goal) {
  check_supported(g, strategy, env);
  if (goal >= g.size()) throw Error(Errc::invalid_argument, "goal out of range");
  const std::size_t n = g.size();
  const std::size_t K = env.horizon;
  GoalDistribution out;
  out.goal = goal;
  out.t_pmf.assign(K + 1, 0.0);
  out.tih_pmf.assign(K + 1, 0.0);
  auto leaf = [&](const std::vector<VertexId>& path, const std::vector<double>& w,
                  const std::vector<std::size_t>& T) {
    double mass = 0.0;
    for (std::size_t s = 0; s <= K; ++s) {
      mass += w[s];
      out.tih_pmf[(s == 0 ? K + 1 : s) - 1] += w[s];
    }
    out.t_pmf[T[0] - 1] += mass;
    out.trajectory_probs[encode_states(path, n)] += mass;
    out.total_mass += mass;
  };
  Enumerator<decltype(leaf)> run(g, strategy, env, {goal}, 1.0, leaf);
  return out;
}

ExactDistribution exact_posterior(const Graph& g, const Strategy& strategy, const EnvConfig& env) {
  check_supported(g, strategy, env);
  const std::size_t n = g.size();
  const std::size_t K = env.horizon;
  ExactDistribution out;
  out.config_digest = config_digest(g, strategy, env);
  out.n = n;
  out.horizon = K;
  out.t_pmf.assign(K + 1, 0.0);
  out.tih_pmf.assign(K + 1, 0.0);
  std::vector<VertexId> goals(n);
  for (std::size_t v = 0; v < n; ++v) goals[v] = static_cast<VertexId>(v);
  std::vector<double> by_time(K + 1);
  double best_sum = 0.0;
  auto leaf = [&](const std::vector<VertexId>& path, const std::vector<double>& w,
                  const std::vector<std::size_t>& T) {
    std::vector<double> row(n, 0.0);
    std::fill(by_time.begin(), by_time.end(), 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      const double* wv = w.data() + v * (K + 1);
      for (std::size_t s = 0; s <= K; ++s) {
        const std::size_t tih = s == 0 ? K + 1 : s;
        row[v] += wv[s];
        out.tih_pmf[tih - 1] += wv[s];
        by_time[tih - 1] += wv[s];
        if (tih != T[v]) out.prob_tih_ne_t += wv[s];
      }
      out.t_pmf[T[v] - 1] += row[v];
      if (T[v] > K) out.timeout_prob += row[v];
      out.total_mass += row[v];
    }
    best_sum += *std::max_element(row.begin(), row.end());
    out.tih_bayes_success += *std::max_element(by_time.begin(), by_time.end());
    out.joint.emplace(encode_states(path, n), std::move(row));
  };
  Enumerator<decltype(leaf)> run(g, strategy, env, goals, 1.0 / static_cast<double>(n), leaf);
  out.optimal_risk = best_sum + out.timeout_prob;
  out.mean_T = mean_of(out.t_pmf);
  out.mean_TIH = mean_of(out.tih_pmf);
  return out;
}

double exact_estimator_risk(const ExactDistribution& exact, const Estimator& estimator) {
  double risk = exact.timeout_prob;
  for (const auto& [code, row] : exact.joint) {
    const std::vector<VertexId> states = exact.decode(code);
    const TrajectoryView view(states, exact.horizon);
    const VertexId pred = estimator.predict(view);
    if (pred < row.size()) risk += row[pred];
  }
  return risk;
}

}  // namespace anonroute
