#include "anonroute/adversary.hpp"

#include <algorithm>

#include "anonroute/error.hpp"
#include "anonroute/oracle.hpp"

namespace anonroute {

VertexId first_step_prediction(const TrajectoryView& view) {
  if (view.horizon() < 1 || view.available() < 1)
    throw Error(Errc::empty_input, "first-step prediction needs X_1");
  return view.at(1);
}

VertexId time_argmax_prediction(const TrajectoryView& view, std::size_t t_hat) {
  if (t_hat < 1 || t_hat > view.horizon())
    throw Error(Errc::invalid_argument, "t_hat must lie in 1..K");
  return view.at(t_hat);
}

namespace {

class FirstStep final : public Estimator {
 public:
  std::string name() const override { return "first-step"; }
  VertexId predict(const TrajectoryView& view) const override { return first_step_prediction(view); }
  std::size_t observation_horizon(std::size_t) const override { return 1; }
};

class TimeArgmax final : public Estimator {
 public:
  explicit TimeArgmax(std::size_t t_hat) : t_hat_(t_hat) {}
  std::string name() const override { return "time-argmax"; }
  VertexId predict(const TrajectoryView& view) const override {
    return time_argmax_prediction(view, t_hat_);
  }
  std::size_t observation_horizon(std::size_t) const override { return t_hat_; }

 private:
  std::size_t t_hat_;
};

class BayesMap final : public Estimator {
 public:
  explicit BayesMap(std::shared_ptr<const ExactDistribution> exact) : exact_(std::move(exact)) {}
  std::string name() const override { return "bayes"; }
  VertexId predict(const TrajectoryView& view) const override {
    if (view.available() < exact_->horizon || view.horizon() != exact_->horizon)
      throw Error(Errc::invalid_argument, "trajectory does not match the exact table horizon");
    std::vector<VertexId> states(exact_->horizon);
    for (std::size_t t = 1; t <= exact_->horizon; ++t) states[t - 1] = view.at(t);
    return exact_->map_prediction(states);
  }
  std::size_t observation_horizon(std::size_t K) const override { return K; }

 private:
  std::shared_ptr<const ExactDistribution> exact_;
};

class Constant final : public Estimator {
 public:
  explicit Constant(VertexId v) : v_(v) {}
  std::string name() const override { return "constant"; }
  VertexId predict(const TrajectoryView&) const override { return v_; }
  std::size_t observation_horizon(std::size_t) const override { return 0; }

 private:
  VertexId v_;
};

}  // namespace

std::unique_ptr<Estimator> first_step_estimator() { return std::make_unique<FirstStep>(); }

std::unique_ptr<Estimator> time_argmax_estimator(std::size_t t_hat) {
  if (t_hat < 1) throw Error(Errc::invalid_argument, "t_hat must be at least 1");
  return std::make_unique<TimeArgmax>(t_hat);
}

std::unique_ptr<Estimator> bayes_map_estimator(std::shared_ptr<const ExactDistribution> exact) {
  if (!exact) throw Error(Errc::invalid_argument, "missing exact distribution");
  return std::make_unique<BayesMap>(std::move(exact));
}

std::unique_ptr<Estimator> constant_estimator(VertexId v) { return std::make_unique<Constant>(v); }

RiskEstimate RiskTally::estimate() const {
  RiskEstimate r;
  r.correct_count = correct;
  r.timeout_count = timeout;
  r.trials = trials;
  if (trials == 0) return r;
  r.risk = static_cast<double>(correct + timeout) / static_cast<double>(trials);
  const double v = std::clamp(r.risk, 0.0, 1.0);
  r.std_err = std::sqrt(v * (1.0 - v) / static_cast<double>(trials));
  return r;
}

RiskEstimate score_risk(std::span<const EpisodeRecord> episodes, const Estimator& estimator) {
  if (episodes.empty()) throw Error(Errc::empty_input, "no episodes to score");
  RiskTally tally;
  for (const EpisodeRecord& rec : episodes) {
    tally.add(rec, estimator.predict(rec.observed()));
  }
  return tally.estimate();
}

}  // namespace anonroute
