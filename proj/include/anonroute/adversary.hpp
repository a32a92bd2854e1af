#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "anonroute/dynamics.hpp"

namespace anonroute {

struct ExactDistribution;

/// Offline adversary: a pure function of the observed trajectory.
class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual std::string name() const = 0;
  virtual VertexId predict(const TrajectoryView& view) const = 0;
  /// Largest t such that X_t may influence the prediction under horizon K.
  virtual std::size_t observation_horizon(std::size_t K) const = 0;
};

VertexId first_step_prediction(const TrajectoryView& view);
VertexId time_argmax_prediction(const TrajectoryView& view, std::size_t t_hat);

std::unique_ptr<Estimator> first_step_estimator();
/// Throws Errc::invalid_argument when t_hat == 0; t_hat > K fails at predict.
std::unique_ptr<Estimator> time_argmax_estimator(std::size_t t_hat);
/// MAP over the exact joint; lowest vertex index wins ties.
std::unique_ptr<Estimator> bayes_map_estimator(std::shared_ptr<const ExactDistribution> exact);
std::unique_ptr<Estimator> constant_estimator(VertexId v);

struct RiskEstimate {
  double risk = 0.0;
  std::uint64_t correct_count = 0;  // predicted the goal
  std::uint64_t timeout_count = 0;  // T > K; adds to correct_count, never replaces it
  std::uint64_t trials = 0;
  double std_err = 0.0;
};

/// Integer counters; merging is associative so sharded scoring is exact.
/// risk = (correct + timeout) / trials, so a correct guess on a timed-out
/// episode counts twice.
struct RiskTally {
  std::uint64_t correct = 0;
  std::uint64_t timeout = 0;
  std::uint64_t trials = 0;

  void add(const EpisodeRecord& rec, VertexId prediction) {
    ++trials;
    if (rec.timed_out()) ++timeout;
    if (prediction == rec.goal) ++correct;
  }
  void merge(const RiskTally& o) {
    correct += o.correct;
    timeout += o.timeout;
    trials += o.trials;
  }
  RiskEstimate estimate() const;
};

/// Throws Errc::empty_input on an empty list.
RiskEstimate score_risk(std::span<const EpisodeRecord> episodes, const Estimator& estimator);

}  // namespace anonroute
