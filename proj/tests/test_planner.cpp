#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "langevin/oracle.hpp"
#include "langevin/planner.hpp"
#include "langevin/rng.hpp"

using namespace langevin;

namespace {

PlannerInputs unit_gaussian_inputs(int d, double sigma2, double epsilon) {
  const Potential p = gaussian_potential(d);
  return planner_inputs_from(p, *p.known, sigma2, epsilon);
}

const PlanCondition& condition(const LmcPlan& plan, const std::string& name) {
  for (const auto& c : plan.conditions) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("missing condition " + name);
}

}  // namespace

TEST_CASE("beta formula") {
  CHECK(compute_beta(0.0, 0.0, 0.0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(compute_beta(0.25, 0.0, 0.0, 1) ==
        doctest::Approx(std::sqrt(1.4375)).epsilon(1e-15));
  CHECK(compute_beta(0.25, 0.0, 0.0, 1) ==
        doctest::Approx(1.198958).epsilon(1e-6));
  // Nondecreasing in sigma2 and |x*|^2.
  rng::NoiseStream s(1, 0);
  for (int i = 0; i < 100; ++i) {
    const double s2 = s.uniform(rng::NoiseStream::kAux, i, 0);
    const double x2 = 4.0 * s.uniform(rng::NoiseStream::kAux, i, 1);
    const double b = 3.0 * s.uniform(rng::NoiseStream::kAux, i, 2);
    const int d = 1 + static_cast<int>(8 * s.uniform(rng::NoiseStream::kAux, i, 3));
    CHECK(compute_beta(s2 + 0.1, x2, b, d) >= compute_beta(s2, x2, b, d));
    CHECK(compute_beta(s2, x2 + 0.5, b, d) >= compute_beta(s2, x2, b, d));
  }
}

TEST_CASE("C_sigma formula") {
  // log term vanishes at sigma2 = 1/(1+L) when L <= 2pi - 1.
  CHECK(compute_c_sigma(0.0, 0.0, 1, 1.0 / 2.0 - 1e-15, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(compute_c_sigma(0.5 * std::log(2.0 * M_PI), 0.0, 1, 0.25, 1.0) ==
        doctest::Approx(2.612085713764618).epsilon(1e-12));
  // Doubling sigma2 subtracts exactly log 2.
  const double a = compute_c_sigma(1.0, 0.5, 2, 0.1, 1.0);
  const double b = compute_c_sigma(1.0, 0.5, 2, 0.2, 1.0);
  CHECK(a - b == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(compute_c_sigma(0.0, 0.0, 1, 0.6, 1.0), std::domain_error);
}

TEST_CASE("chi2 plan reproduces the unit-gaussian reference point") {
  const LmcPlan plan = plan_chi2(unit_gaussian_inputs(1, 0.25, 0.01));
  CHECK(plan.eta == doctest::Approx(7.5147765e-05).epsilon(1e-6));
  CHECK(plan.N == 140193);
  CHECK(plan.total_iterations == 2 * plan.N);
  CHECK(plan.eta * static_cast<double>(plan.N) ==
        doctest::Approx(10.5352).epsilon(1e-4));
  CHECK(plan.beta == doctest::Approx(1.19895788).epsilon(1e-8));
  CHECK(plan.c_sigma == doctest::Approx(2.612085713764618).epsilon(1e-12));
  CHECK(plan.feasible);
  REQUIRE(plan.conditions.size() == 6);
  for (const auto& c : plan.conditions) {
    CAPTURE(c.name);
    CHECK(c.ok);
  }
  // burn_in: N eta >= c2 lambda log(144 d C_sigma / eps).
  const auto& burn = condition(plan, "burn_in");
  CHECK(burn.rhs == doctest::Approx(10.53513251).epsilon(1e-8));
  CHECK(burn.lhs >= burn.rhs);
  // warmness lhs ~ 0.0102 <= c1 = 1.
  const auto& warm = condition(plan, "warmness");
  CHECK(warm.lhs == doctest::Approx(0.0102).epsilon(2e-2));
  CHECK(warm.rhs == 1.0);
}

TEST_CASE("plan conditions re-check from (eta, N) alone") {
  for (double eps : {0.1, 0.01}) {
    for (int d : {1, 4}) {
      const LmcPlan plan = plan_chi2(unit_gaussian_inputs(d, 0.25, eps));
      REQUIRE(plan.feasible);
      const double eta = plan.eta;
      const double N = static_cast<double>(plan.N);
      CHECK(eta <= 0.25);
      CHECK(eta <= 0.5);
      CHECK(N * eta >= condition(plan, "burn_in").rhs);
      CHECK((d + std::log(N)) * N * eta * eta <= 1.0);
    }
  }
}

TEST_CASE("halving epsilon slightly more than doubles N") {
  const LmcPlan full = plan_chi2(unit_gaussian_inputs(1, 0.25, 0.01));
  const LmcPlan half = plan_chi2(unit_gaussian_inputs(1, 0.25, 0.005));
  CHECK(half.N > 2 * full.N);
  CHECK(half.N < 3 * full.N);
}

TEST_CASE("N is monotone in epsilon, d, lambda and L") {
  rng::NoiseStream s(9, 0);
  for (int i = 0; i < 100; ++i) {
    Certificate cert;
    cert.L = 1.0 + 2.0 * s.uniform(rng::NoiseStream::kAux, i, 0);
    cert.m = 0.2 + 0.5 * s.uniform(rng::NoiseStream::kAux, i, 1);
    cert.b = 2.0 * s.uniform(rng::NoiseStream::kAux, i, 2);
    cert.lambda = 1.0 / cert.m;
    cert.minimizer = Vec::Zero(1);
    PlannerInputs inp;
    inp.cert = cert;
    inp.d = 1 + static_cast<int>(6 * s.uniform(rng::NoiseStream::kAux, i, 3));
    inp.sigma2 = 0.5 / (1.0 + cert.L) *
                 (0.2 + 0.7 * s.uniform(rng::NoiseStream::kAux, i, 4));
    inp.epsilon = 0.01 + 0.2 * s.uniform(rng::NoiseStream::kAux, i, 5);
    inp.f0 = 1.0;
    inp.grad0_norm2 = 0.0;
    const auto n_of = [&](PlannerInputs q) { return plan_chi2(q).N; };

    PlannerInputs bigger_eps = inp;
    bigger_eps.epsilon = inp.epsilon * 1.5;
    CHECK(n_of(bigger_eps) <= n_of(inp));

    PlannerInputs bigger_d = inp;
    bigger_d.d = inp.d + 2;
    CHECK(n_of(bigger_d) >= n_of(inp));

    PlannerInputs bigger_lambda = inp;
    bigger_lambda.cert.lambda = cert.lambda * 1.5;
    CHECK(n_of(bigger_lambda) >= n_of(inp));

    PlannerInputs bigger_L = inp;
    bigger_L.cert.L = cert.L * 1.3;
    bigger_L.sigma2 = std::min(inp.sigma2, 0.5 / (1.0 + bigger_L.cert.L));
    CHECK(n_of(bigger_L) >= n_of(inp));
  }
}

TEST_CASE("gaussian end-to-end guarantee via the exact variance recursion") {
  for (double eps : {0.1, 0.01, 0.001}) {
    for (int d : {1, 4, 16}) {
      const LmcPlan plan = plan_chi2(unit_gaussian_inputs(d, 0.25, eps));
      REQUIRE(plan.feasible);
      const double s_final =
          oracle::lmc_variance(0.25, plan.eta, plan.total_iterations);
      CHECK(oracle::chi2_isotropic(s_final, d) <= eps);
    }
  }
}

TEST_CASE("forced step-size override flags the step conditions") {
  LmcPlan plan = plan_chi2(unit_gaussian_inputs(1, 0.25, 0.01));
  // Re-evaluate the recorded conditions at eta = 1.0.
  bool any_step_violated = false;
  for (const auto& c : plan.conditions) {
    if (c.name.rfind("step_", 0) == 0 && 1.0 > c.rhs) any_step_violated = true;
  }
  CHECK(any_step_violated);
}

TEST_CASE("renyi plan: alpha scalings and guarantee") {
  PlannerInputs inp = unit_gaussian_inputs(1, 0.25, 0.01);
  inp.alpha = 2.0;
  const LmcPlan plan = plan_renyi(inp);
  CHECK(plan.feasible);
  REQUIRE(plan.conditions.size() == 6);
  for (const auto& c : plan.conditions) {
    CAPTURE(c.name);
    CHECK(c.ok);
  }
  // Same-log skeleton comparison: eta scales by 1/alpha^3, N by alpha^4.
  const double lg = std::log(6.0 * 4.0 * plan.c_sigma / 0.01);
  const double eta_skeleton = (1.0 / plan.beta) * 0.01 / (lg * lg);
  CHECK(plan.eta == doctest::Approx(eta_skeleton / 8.0).epsilon(1e-12));
  const double n_skeleton = plan.beta * 100.0 * lg * lg * lg;
  CHECK(static_cast<double>(plan.N) ==
        doctest::Approx(16.0 * n_skeleton).epsilon(1e-5));

  // R2 accuracy at 2N on the oracle, and the chi2 translation R2 = log(1+chi2).
  const double s_final =
      oracle::lmc_variance(0.25, plan.eta, plan.total_iterations);
  const double chi = oracle::chi2_isotropic(s_final, 1);
  CHECK(std::log1p(chi) <= 0.01);
  CHECK(chi <= std::exp(0.01) - 1.0);

  // N diverges as alpha -> 1.
  PlannerInputs near_one = inp;
  near_one.alpha = 1.01;
  PlannerInputs further = inp;
  further.alpha = 1.1;
  CHECK(plan_renyi(near_one).N > plan_renyi(further).N);

  PlannerInputs bad = inp;
  bad.alpha = 1.0;
  CHECK_THROWS_AS(plan_renyi(bad), std::invalid_argument);
}

TEST_CASE("metric translation table") {
  CHECK(translate_metric(TargetMetric::kl, 0.01, 1.0) == doctest::Approx(0.01));
  CHECK(translate_metric(TargetMetric::tv, 0.1, 1.0) == doctest::Approx(0.02));
  CHECK(translate_metric(TargetMetric::w2, 0.1, 2.0) ==
        doctest::Approx(0.0025));
  CHECK_THROWS_AS(translate_metric(TargetMetric::kl, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("affine recursion bound") {
  CHECK(iterate_affine_recursion(1.0, 0.5, 0.0, 0) == doctest::Approx(1.0));
  // Burn-in projection 12 e^{-3 eta N / (4 lambda)} at the reference plan.
  const double a = 3.0 * 7.52e-5 / 4.0;
  CHECK(iterate_affine_recursion(12.0, a, 0.0, 140000) ==
        doctest::Approx(12.0 * std::exp(-a * 140000)).epsilon(1e-12));
  CHECK(iterate_affine_recursion(12.0, a, 0.0, 140000) ==
        doctest::Approx(0.00445).epsilon(2e-2));
  CHECK_THROWS_AS(iterate_affine_recursion(1.0, 1.5, 0.0, 1),
                  std::invalid_argument);

  // Dominates the exact recursion on random tuples.
  rng::NoiseStream s(15, 0);
  for (int i = 0; i < 1000; ++i) {
    const double theta0 = 10.0 * s.uniform(rng::NoiseStream::kAux, i, 0);
    const double a_i =
        std::min(0.999, std::max(1e-4, s.uniform(rng::NoiseStream::kAux, i, 1)));
    const double h = 2.0 * s.uniform(rng::NoiseStream::kAux, i, 2);
    const long k =
        static_cast<long>(s.uniform(rng::NoiseStream::kAux, i, 3) * 300);
    double theta = theta0;
    for (long j = 0; j < k; ++j) theta = (1.0 - a_i) * theta + h;
    const double bound = iterate_affine_recursion(theta0, a_i, h, k);
    CHECK(theta <= bound + 1e-12 * (1.0 + bound));
  }
}

TEST_CASE("planner validates its preconditions") {
  CHECK_THROWS_AS(plan_chi2(unit_gaussian_inputs(1, 0.6, 0.01)),
                  std::invalid_argument);
  PlannerInputs inp = unit_gaussian_inputs(1, 0.25, 0.01);
  inp.cert.lambda = Certificate::kUnset;
  CHECK_THROWS_AS(plan_chi2(inp), std::invalid_argument);
}

TEST_CASE("plan json carries the schema fields") {
  const LmcPlan plan = plan_chi2(unit_gaussian_inputs(1, 0.25, 0.1));
  const std::string js = plan_json(plan);
  for (const char* key : {"\"eta\"", "\"N\"", "\"beta\"", "\"C_sigma\"",
                          "\"metric\"", "\"feasible\"", "\"conditions\"",
                          "\"name\"", "\"lhs\"", "\"rhs\"", "\"ok\"",
                          "\"note\""}) {
    CAPTURE(key);
    CHECK(js.find(key) != std::string::npos);
  }
}
