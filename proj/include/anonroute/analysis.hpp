#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace anonroute {

/// eps / (1 - eps)^2.
double c_eps(double epsilon);

struct TihPmf {
  std::vector<double> probs;  // probs[t - 1] = P(T_IH = t), t = 1..t_max
  double tail = 0.0;          // P(T_IH > t_max)
};

/// Intentional hitting-time PMF of Water-Filling from the attempt recursion
/// q_t = p_{t-1} (1 - eps) (1 - sum_{i<t} q_i).
TihPmf tih_pmf(double q_bar, double epsilon, std::size_t t_max);

/// Mean of the recursion PMF, with the geometric tail summed in closed form.
double tih_mean_exact(double q_bar, double epsilon);

/// 1/(2q) + 1/2 + q eps / (2 (1-eps)^2). Equals tih_mean_exact when
/// 1/q - eps/(1-eps) is an integer, and is below it otherwise (for t* >= 2).
double expected_tih(double q_bar, double epsilon);

/// q = 1 / (2 w p - 1 - c_eps). Throws Errc::infeasible_delay below the floor
/// w > (c_eps/2 + 1) / p.
double risk_target_for_delay(double w, double p_overlap, double epsilon);

/// Inverse of expected_tih in q. Throws Errc::infeasible_delay when
/// w <= eps/(2(1-eps)^2) + 1.
double qbar_of_w_exact(double w, double epsilon);

/// rho_n^eps(k) of the k-clique delay analysis.
double clique_rho(double epsilon, std::size_t n, std::size_t k);

/// Asymptotic risk bounds as functions of the delay budget w.
class BoundCurve {
 public:
  enum class Kind { complete, overlap, clique };

  Kind kind() const noexcept { return kind_; }
  double epsilon() const noexcept { return epsilon_; }
  /// Overlap parameter p for `overlap`, rho for `clique`, 1 for `complete`.
  double scale() const noexcept { return scale_; }

  double lower(double w) const;
  /// Formula value; +infinity once the denominator is not positive.
  double upper(double w) const;
  double validity_floor() const noexcept { return floor_; }
  bool valid(double w) const noexcept { return w > floor_; }

  /// alpha^eps(w) and beta^eps(w) of the complete-graph curve.
  static double alpha(double w, double epsilon);
  static double beta(double w, double epsilon);

 private:
  friend BoundCurve theorem1_curve(double);
  friend BoundCurve theorem2_curve(double, double);
  friend BoundCurve theorem3_curve(double, std::size_t, std::size_t);

  BoundCurve(Kind kind, double epsilon, double scale, double floor)
      : kind_(kind), epsilon_(epsilon), scale_(scale), floor_(floor) {}

  Kind kind_;
  double epsilon_;
  double scale_;
  double floor_;
};

/// Complete graphs: 1/(2w-1-alpha) and 1/(2w-1-alpha-beta).
BoundCurve theorem1_curve(double epsilon);
/// Overlap-p graphs: 1/(2w+1) and 1/(2w - (1+c_eps)/p).
BoundCurve theorem2_curve(double epsilon, double p);
/// k-clique graphs: 1/(2w+1) and 1/(2 w rho - 1 - c_eps).
BoundCurve theorem3_curve(double epsilon, std::size_t n, std::size_t k);

/// expected_tih / p.
double delay_upper_general(double q_bar, double epsilon, double p_overlap);

/// q deg_max / n + w/K + 1 - (1 - 1/deg_min)^K.
double risk_upper_general(double q_bar, std::size_t n, std::size_t deg_max, std::size_t deg_min,
                          std::size_t K, double w);

/// expected_tih (1 + k^2 / ((1-eps)(n + (k-1)k) + eps k)).
double clique_delay_upper(double q_bar, double epsilon, std::size_t n, std::size_t k);

/// q + w/K + 1 - (1 - k/n)^K.
double clique_risk_upper(double q_bar, std::size_t n, std::size_t k, std::size_t K, double w);

struct FiniteNTerms {
  double sigma = 0.0;      // (1 - (1-1/n)^K) K (K+1) / 2
  double delta_bar = 0.0;  // 1 - (1-1/n)^K
};
FiniteNTerms finite_n_terms(std::size_t n, std::size_t K);

/// Baseline calibration: 1/(2L - 1) with L = max(1, round(w p (1 - eps))).
double asb_risk(double w, double epsilon, double p_density);

}  // namespace anonroute
