#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "anonroute/analysis.hpp"
#include "anonroute/error.hpp"
#include "anonroute/strategy.hpp"

using namespace anonroute;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an anonroute::Error");
  return Errc::invalid_argument;
}

// Piecewise form of the intentional hitting-time law: flat at q before t*,
// then (1-eps)(1-(t*-1)q) eps^(t-t*).
double piecewise_pmf(double q, double eps, std::size_t t_star, std::size_t t) {
  if (t < t_star) return q;
  return (1.0 - eps) * (1.0 - static_cast<double>(t_star - 1) * q) *
         std::pow(eps, static_cast<double>(t - t_star));
}

double mean_of(const std::vector<double>& pmf) {
  double m = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) m += static_cast<double>(i + 1) * pmf[i];
  return m;
}

}  // namespace

TEST_CASE("c_eps") {
  CHECK(c_eps(0.0) == 0.0);
  CHECK(c_eps(0.5) == doctest::Approx(2.0));
  CHECK(c_eps(0.3) == doctest::Approx(0.6122449));
  CHECK(code_of([] { c_eps(1.0); }) == Errc::domain);
}

TEST_CASE("T_IH recursion") {
  SUBCASE("noiseless quarter is uniform on 1..4") {
    const TihPmf pmf = tih_pmf(0.25, 0.0, 8);
    for (std::size_t t = 1; t <= 4; ++t) CHECK(pmf.probs[t - 1] == doctest::Approx(0.25));
    for (std::size_t t = 5; t <= 8; ++t) CHECK(pmf.probs[t - 1] == doctest::Approx(0.0));
    CHECK(pmf.tail == doctest::Approx(0.0));
  }
  SUBCASE("flat then geometric with ratio eps") {
    const TihPmf pmf = tih_pmf(0.21, 0.5, 12);
    for (std::size_t t = 1; t <= 3; ++t) CHECK(pmf.probs[t - 1] == doctest::Approx(0.21));
    CHECK(pmf.probs[3] == doctest::Approx(0.5 * (1 - 3 * 0.21)));
    for (std::size_t t = 5; t <= 12; ++t)
      CHECK(pmf.probs[t - 1] == doctest::Approx(0.5 * pmf.probs[t - 2]));
  }
  SUBCASE("matches the piecewise form on a grid") {
    for (double q = 0.02; q <= 1.0; q += 0.07)
      for (double eps = 0.0; eps <= 0.9; eps += 0.15) {
        const std::size_t ts = WaterFillingSchedule(q, eps).t_star();
        const TihPmf pmf = tih_pmf(q, eps, ts + 30);
        for (std::size_t t = 1; t <= ts + 30; ++t)
          CHECK(pmf.probs[t - 1] == doctest::Approx(piecewise_pmf(q, eps, ts, t)).epsilon(1e-10));
      }
  }
  SUBCASE("validity: mass, max <= q, floor") {
    for (double q = 0.02; q <= 1.0; q += 0.04)
      for (double eps = 0.0; eps <= 0.9 + 1e-9; eps += 0.1) {
        const std::size_t ts = WaterFillingSchedule(q, eps).t_star();
        const TihPmf pmf = tih_pmf(q, eps, ts + 200);
        // P(T_IH > t* + j) = (1 - (t*-1) q) eps^(j+1). Below 1e-12 at j = 200
        // only for eps <= 0.8; at 0.9 it is about 6e-10.
        const double survival = 1.0 - static_cast<double>(ts - 1) * q;
        CHECK(pmf.tail == doctest::Approx(survival * std::pow(eps, 201.0)).epsilon(1e-9));
        if (eps <= 0.8 + 1e-9) CHECK(pmf.tail < 1e-12);
        double total = pmf.tail;
        for (double p : pmf.probs) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        const double mx = *std::max_element(pmf.probs.begin(), pmf.probs.end());
        CHECK(mx <= q + 1e-12);
        CHECK(mx >= 1.0 / (2.0 * mean_of(pmf.probs) + 1.0));
        const TihPmf longer = tih_pmf(q, eps, ts + 600);
        CHECK(tih_mean_exact(q, eps) == doctest::Approx(mean_of(longer.probs)).epsilon(1e-10));
      }
  }
}

TEST_CASE("expected_tih") {
  CHECK(expected_tih(0.25, 0.5) == doctest::Approx(2.75));
  CHECK(expected_tih(0.25, 0.0) == doctest::Approx(2.5));
  CHECK(expected_tih(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(code_of([] { expected_tih(0.0, 0.2); }) == Errc::domain);

  // Exact where 1/q - eps/(1-eps) is an integer.
  for (double eps : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9})
    for (int m = 1; m <= 40; ++m) {
      const double q = 1.0 / (m + eps / (1.0 - eps));
      if (q > 1.0) continue;
      const TihPmf pmf = tih_pmf(q, eps, WaterFillingSchedule(q, eps).t_star() + 400);
      CHECK(mean_of(pmf.probs) == doctest::Approx(expected_tih(q, eps)).epsilon(1e-9));
    }
  // Otherwise it undershoots the true mean.
  CHECK(tih_mean_exact(0.21, 0.5) > expected_tih(0.21, 0.5) + 0.01);
  for (double q = 0.03; q < 0.5; q += 0.0137)
    for (double eps : {0.0, 0.2, 0.5})
      CHECK(tih_mean_exact(q, eps) >= expected_tih(q, eps) - 1e-12);
}

TEST_CASE("risk target and its inverse") {
  CHECK(risk_target_for_delay(5, 1, 0) == doctest::Approx(1.0 / 9.0));
  CHECK(risk_target_for_delay(5, 1, 0.5) == doctest::Approx(1.0 / 7.0));
  CHECK(code_of([] { risk_target_for_delay(1, 1, 0.5); }) == Errc::infeasible_delay);
  CHECK(risk_target_for_delay(10, 0.8, 0.3) == doctest::Approx(1.0 / (16.0 - 1.0 - c_eps(0.3))));

  for (double w : {1.5, 2.0, 5.0, 17.25}) CHECK(qbar_of_w_exact(w, 0.0) == doctest::Approx(1.0 / (2 * w - 1)));
  CHECK(expected_tih(qbar_of_w_exact(5, 0.5), 0.5) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(code_of([] { qbar_of_w_exact(1.1, 0.9); }) == Errc::infeasible_delay);
  CHECK(code_of([] { qbar_of_w_exact(45.9, 0.9); }) == Errc::infeasible_delay);
  CHECK_NOTHROW(qbar_of_w_exact(46.5, 0.9));
}

TEST_CASE("complete-graph curve") {
  const BoundCurve c = theorem1_curve(0.5);
  CHECK(BoundCurve::alpha(5, 0.5) == doctest::Approx(2.0 / 9.0));
  CHECK(c.lower(5) == doctest::Approx(1.0 / (9.0 - 2.0 / 9.0)));
  CHECK(c.lower(5) == doctest::Approx(0.11392).epsilon(1e-4));
  CHECK(c.validity_floor() == doctest::Approx(2.0));
  CHECK_FALSE(c.valid(2.0));
  CHECK(c.valid(2.01));

  const BoundCurve noiseless = theorem1_curve(0.0);
  for (double w : {1.5, 3.0, 10.0}) {
    CHECK(noiseless.lower(w) == doctest::Approx(1.0 / (2 * w - 1)));
    CHECK(noiseless.upper(w) == doctest::Approx(1.0 / (2 * w - 1)));
  }
  CHECK(BoundCurve::beta(1000, 0.5) / BoundCurve::alpha(1000, 0.5) < 1e-4);
  CHECK(BoundCurve::beta(100, 0.5) / BoundCurve::alpha(100, 0.5) <
        BoundCurve::beta(10, 0.5) / BoundCurve::alpha(10, 0.5));

  for (double eps = 0.0; eps <= 0.9 + 1e-9; eps += 0.05) {
    const BoundCurve curve = theorem1_curve(eps);
    for (double w = curve.validity_floor() + 0.05; w < curve.validity_floor() + 60; w += 0.37) {
      CHECK(curve.lower(w) <= curve.upper(w));
      CHECK(1.0 / (2 * w + 1) <= curve.lower(w));
    }
  }
}

TEST_CASE("overlap curve") {
  const BoundCurve c = theorem2_curve(0.3, 0.8);
  CHECK(c.upper(10) == doctest::Approx(1.0 / (20.0 - (1.0 + c_eps(0.3)) / 0.8)));
  CHECK(c.upper(10) == doctest::Approx(0.0556).epsilon(1e-3));
  CHECK(c.lower(10) == doctest::Approx(1.0 / 21.0));
  CHECK(c.validity_floor() == doctest::Approx((c_eps(0.3) / 2 + 1) / 0.8));
  for (double eps : {0.0, 0.4, 0.8}) {
    const BoundCurve full = theorem2_curve(eps, 1.0);
    CHECK(full.upper(30) == doctest::Approx(1.0 / (60.0 - 1.0 - c_eps(eps))));
  }
  // Past the pole the formula is meaningless; reported as +infinity.
  CHECK(std::isinf(c.upper(0.5)));
}

TEST_CASE("k-clique quantities") {
  const double eps = 0.3;
  for (std::size_t n : {10, 100, 1000}) {
    const double expect = ((1 - eps) * n + eps) / (n + 1 - eps * (n - 1.0));
    CHECK(clique_rho(eps, n, 1) == doctest::Approx(expect));
  }
  CHECK(std::abs(clique_rho(eps, 10000000, 1) - 1.0) < 1e-6);
  const double rho = clique_rho(0.3, 100, 5);
  CHECK(rho > 0.0);
  CHECK(rho <= 1.0);

  const BoundCurve c = theorem3_curve(0.0, 10000000, 1);
  CHECK(c.upper(6) == doctest::Approx(1.0 / 11.0).epsilon(1e-6));
  CHECK(theorem3_curve(0.3, 100, 5).scale() == doctest::Approx(rho));

  const double base = expected_tih(0.25, 0.3);
  CHECK(clique_delay_upper(0.25, 0.3, 100, 1) == doctest::Approx(base * (1 + 1 / (0.7 * 100 + 0.3))));
  CHECK(clique_delay_upper(0.25, 0.3, 100, 5) ==
        doctest::Approx(base * (1 + 25 / (0.7 * (100 + 20) + 0.3 * 5))));
  CHECK(clique_risk_upper(0.1, 100, 5, 1000, 5) ==
        doctest::Approx(0.1 + 0.005 + 1 - std::pow(0.95, 1000)));
}

TEST_CASE("general delay and risk corrections") {
  CHECK(delay_upper_general(0.25, 0.5, 1.0) == doctest::Approx(2.75));
  CHECK(delay_upper_general(0.25, 0.5, 0.5) == doctest::Approx(5.5));
  CHECK(risk_upper_general(0.1, 100, 100, 100, 1000, 5) ==
        doctest::Approx(0.1 + 0.005 + 1 - std::pow(0.99, 1000)));
  CHECK(risk_upper_general(0.1, 100, 100, 100, 1000, 5) > 1.0);

  const FiniteNTerms zero = finite_n_terms(100, 0);
  CHECK(zero.sigma == 0.0);
  CHECK(zero.delta_bar == 0.0);
  const FiniteNTerms big = finite_n_terms(1000000, 100);
  CHECK(big.delta_bar == doctest::Approx(-std::expm1(100 * std::log1p(-1e-6))));
  CHECK(big.delta_bar == doctest::Approx(1e-4).epsilon(1e-3));
  CHECK(big.sigma == doctest::Approx(big.delta_bar * 100 * 101 / 2));
  CHECK(finite_n_terms(100000000, 100).sigma < big.sigma);
}

TEST_CASE("ASB calibration") {
  for (int w = 1; w <= 20; ++w) CHECK(asb_risk(w, 0.0, 1.0) == doctest::Approx(1.0 / (2 * w - 1)));
  CHECK(asb_risk(10, 0.5, 1.0) == doctest::Approx(1.0 / 9.0));
  CHECK(asb_risk(10, 0.5, 1.0) > theorem1_curve(0.5).upper(10));
  CHECK(asb_risk(0.7, 0.3, 1.0) == 1.0);
}

TEST_CASE("water-filling mean is minimal among noiseless feasible laws") {
  // Random laws with every mass <= q: fill slots with random amounts capped
  // at q until the mass is exhausted, then permute slot contents.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double q : {0.07, 0.21, 0.5}) {
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> pmf;
      double left = 1.0;
      while (left > 1e-15) {
        const double take = std::min(left, q * u(rng));
        pmf.push_back(take);
        left -= take;
      }
      std::shuffle(pmf.begin(), pmf.end(), rng);
      CHECK(mean_of(pmf) >= expected_tih(q, 0.0) - 1e-9);
    }
  }
}
