#include "anonroute/analysis.hpp"

#include <cmath>
#include <limits>

#include "anonroute/error.hpp"
#include "anonroute/strategy.hpp"

namespace anonroute {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(Errc::domain, "noise level must lie in [0, 1)");
}

double positive_reciprocal(double denom) {
  return denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
}

// 1 - (1 - x)^K without cancellation for tiny x.
double one_minus_pow(double x, std::size_t K) {
  return -std::expm1(static_cast<double>(K) * std::log1p(-x));
}

}  // namespace

double c_eps(double epsilon) {
  check_epsilon(epsilon);
  return epsilon / ((1.0 - epsilon) * (1.0 - epsilon));
}

TihPmf tih_pmf(double q_bar, double epsilon, std::size_t t_max) {
  const WaterFillingSchedule schedule(q_bar, epsilon);
  TihPmf out;
  out.probs.reserve(t_max);
  double survival = 1.0;
  for (std::size_t t = 1; t <= t_max; ++t) {
    const double q = schedule.attempt_prob(t - 1) * (1.0 - epsilon) * survival;
    out.probs.push_back(q);
    survival -= q;
    if (survival < 0.0) survival = 0.0;
  }
  out.tail = survival;
  return out;
}

double tih_mean_exact(double q_bar, double epsilon) {
  const WaterFillingSchedule schedule(q_bar, epsilon);
  const std::size_t t_star = schedule.t_star();
  double survival = 1.0;
  double mean = 0.0;
  for (std::size_t t = 1; t < t_star; ++t) {
    const double q = schedule.attempt_prob(t - 1) * (1.0 - epsilon) * survival;
    mean += static_cast<double>(t) * q;
    survival -= q;
  }
  // From t* on every attempt is certain: geometric(1 - eps) starting at t*.
  return mean + survival * (static_cast<double>(t_star) + epsilon / (1.0 - epsilon));
}

double expected_tih(double q_bar, double epsilon) {
  if (!(q_bar > 0.0)) throw Error(Errc::domain, "target risk level must be positive");
  check_epsilon(epsilon);
  return 1.0 / (2.0 * q_bar) + 0.5 + q_bar * epsilon / (2.0 * (1.0 - epsilon) * (1.0 - epsilon));
}

double risk_target_for_delay(double w, double p_overlap, double epsilon) {
  if (!(p_overlap > 0.0 && p_overlap <= 1.0))
    throw Error(Errc::domain, "overlap parameter must lie in (0, 1]");
  const double c = c_eps(epsilon);
  const double floor = (c / 2.0 + 1.0) / p_overlap;
  if (!(w > floor))
    throw Error(Errc::infeasible_delay, "delay budget " + std::to_string(w) +
                                            " is not above the floor " + std::to_string(floor));
  return 1.0 / (2.0 * w * p_overlap - 1.0 - c);
}

double qbar_of_w_exact(double w, double epsilon) {
  check_epsilon(epsilon);
  const double e1 = (1.0 - epsilon) * (1.0 - epsilon);
  const double floor = epsilon / (2.0 * e1) + 1.0;
  if (!(w > floor))
    throw Error(Errc::infeasible_delay, "delay budget " + std::to_string(w) +
                                            " is not above the floor " + std::to_string(floor));
  const double h = w - 0.5;
  const double disc = 1.0 - epsilon / (h * h * e1);
  if (disc < 0.0) throw Error(Errc::infeasible_delay, "no risk level attains this delay");
  return 1.0 / (h * (1.0 + std::sqrt(disc)));
}

double clique_rho(double epsilon, std::size_t n, std::size_t k) {
  check_epsilon(epsilon);
  const double N = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return ((1.0 - epsilon) * (N + kk * kk - kk) + epsilon * kk) /
         (N + 2.0 * kk * kk - kk - epsilon * (N + kk * kk - 2.0 * kk));
}

double BoundCurve::alpha(double w, double epsilon) {
  const double e1 = (1.0 - epsilon) * (1.0 - epsilon);
  return epsilon / ((2.0 * w - 1.0) * e1);
}

double BoundCurve::beta(double w, double epsilon) {
  const double e1 = (1.0 - epsilon) * (1.0 - epsilon);
  const double h = w - 0.5;
  return epsilon * epsilon / (2.0 * h * h * h * e1 * e1);
}

double BoundCurve::lower(double w) const {
  if (kind_ == Kind::complete) return positive_reciprocal(2.0 * w - 1.0 - alpha(w, epsilon_));
  return 1.0 / (2.0 * w + 1.0);
}

double BoundCurve::upper(double w) const {
  const double c = c_eps(epsilon_);
  switch (kind_) {
    case Kind::complete:
      return positive_reciprocal(2.0 * w - 1.0 - alpha(w, epsilon_) - beta(w, epsilon_));
    case Kind::overlap:
      return positive_reciprocal(2.0 * w - (1.0 + c) / scale_);
    case Kind::clique:
      return positive_reciprocal(2.0 * w * scale_ - 1.0 - c);
  }
  return std::numeric_limits<double>::infinity();
}

BoundCurve theorem1_curve(double epsilon) {
  check_epsilon(epsilon);
  const double floor = epsilon / (2.0 * (1.0 - epsilon) * (1.0 - epsilon)) + 1.0;
  return BoundCurve(BoundCurve::Kind::complete, epsilon, 1.0, floor);
}

BoundCurve theorem2_curve(double epsilon, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(Errc::domain, "overlap parameter must lie in (0, 1]");
  const double floor = (c_eps(epsilon) / 2.0 + 1.0) / p;
  return BoundCurve(BoundCurve::Kind::overlap, epsilon, p, floor);
}

BoundCurve theorem3_curve(double epsilon, std::size_t n, std::size_t k) {
  if (k == 0 || n == 0) throw Error(Errc::invalid_argument, "clique counts must be positive");
  const double rho = clique_rho(epsilon, n, k);
  const double floor = (c_eps(epsilon) / 2.0 + 1.0) / rho;
  return BoundCurve(BoundCurve::Kind::clique, epsilon, rho, floor);
}

double delay_upper_general(double q_bar, double epsilon, double p_overlap) {
  if (!(p_overlap > 0.0)) throw Error(Errc::domain, "overlap parameter must be positive");
  return expected_tih(q_bar, epsilon) / p_overlap;
}

double risk_upper_general(double q_bar, std::size_t n, std::size_t deg_max, std::size_t deg_min,
                          std::size_t K, double w) {
  if (n == 0 || deg_min == 0 || K == 0) throw Error(Errc::invalid_argument, "sizes must be positive");
  return q_bar * static_cast<double>(deg_max) / static_cast<double>(n) + w / static_cast<double>(K) +
         one_minus_pow(1.0 / static_cast<double>(deg_min), K);
}

double clique_delay_upper(double q_bar, double epsilon, std::size_t n, std::size_t k) {
  const double N = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  const double x = kk * kk / ((1.0 - epsilon) * (N + (kk - 1.0) * kk) + epsilon * kk);
  return expected_tih(q_bar, epsilon) * (1.0 + x);
}

double clique_risk_upper(double q_bar, std::size_t n, std::size_t k, std::size_t K, double w) {
  if (n == 0 || K == 0) throw Error(Errc::invalid_argument, "sizes must be positive");
  return q_bar + w / static_cast<double>(K) +
         one_minus_pow(static_cast<double>(k) / static_cast<double>(n), K);
}

FiniteNTerms finite_n_terms(std::size_t n, std::size_t K) {
  if (n == 0) throw Error(Errc::invalid_argument, "n must be positive");
  FiniteNTerms out;
  out.delta_bar = K == 0 ? 0.0 : one_minus_pow(1.0 / static_cast<double>(n), K);
  out.sigma = out.delta_bar * static_cast<double>(K) * static_cast<double>(K + 1) / 2.0;
  return out;
}

double asb_risk(double w, double epsilon, double p_density) {
  const std::size_t L = asb_path_length(w, epsilon, p_density);
  return 1.0 / (2.0 * static_cast<double>(L) - 1.0);
}

}  // namespace anonroute
