#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "langevin/oracle.hpp"
#include "langevin/potential.hpp"

using namespace langevin;
using namespace langevin::oracle;

namespace {

// Test-local Simpson quadrature over [-20, 20]; the independent route for all
// closed-form cross-checks in this file.
double integrate(const std::function<double(double)>& f, int n = 400001) {
  const double lo = -20.0, hi = 20.0;
  const double h = (hi - lo) / (n - 1);
  double acc = f(lo) + f(hi);
  for (int i = 1; i < n - 1; ++i) {
    acc += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

double normal_pdf(double x, double mu, double s2) {
  return std::exp(-0.5 * (x - mu) * (x - mu) / s2) / std::sqrt(2.0 * M_PI * s2);
}

}  // namespace

TEST_CASE("ou law: endpoints and the fixed point") {
  CHECK(ou_law(0.25, 0.0).sigma2 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(ou_law(0.25, 50.0).sigma2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ou_law(0.25, 0.5).sigma2 ==
        doctest::Approx(1.0 - 0.75 * std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("ou law semigroup property") {
  for (double s0 : {0.1, 0.5, 1.3}) {
    for (double s : {0.2, 0.7}) {
      for (double t : {0.3, 1.1}) {
        CHECK(ou_law(ou_law(s0, s).sigma2, t).sigma2 ==
              doctest::Approx(ou_law(s0, s + t).sigma2).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("lmc variance closed form matches the iterated recursion") {
  const double s0 = 0.5 / 0.95;
  CHECK(lmc_variance(s0, 0.1, 0) == doctest::Approx(s0).epsilon(1e-15));
  CHECK(lmc_variance(s0, 0.1, 1) ==
        doctest::Approx(0.81 * s0 + 0.2).epsilon(1e-14));
  CHECK(lmc_variance(0.25, 0.1, 10000) ==
        doctest::Approx(1.0 / 0.95).epsilon(1e-10));
  double s = 0.3;
  for (int k = 0; k <= 57; ++k) {
    CHECK(lmc_variance(0.3, 0.05, k) == doctest::Approx(s).epsilon(1e-12));
    s = 0.95 * 0.95 * s + 0.1;
  }
  CHECK_THROWS_AS(lmc_variance(1.0, 1.0, 1), std::domain_error);
}

TEST_CASE("interpolation variance splits T = k eta + t") {
  const double eta = 0.1;
  const double s0 = 0.5 / 0.95;
  CHECK(interpolation_variance(s0, eta, 3 * eta) ==
        doctest::Approx(lmc_variance(s0, eta, 3)).epsilon(1e-14));
  CHECK(interpolation_variance(s0, eta, 0.05) ==
        doctest::Approx(0.575).epsilon(1e-9));
  // Continuity at the right end of an interval: (1-eta)^2 s + 2 eta.
  const double s3 = lmc_variance(s0, eta, 3);
  const double just_before = interpolation_variance(s0, eta, 4 * eta - 1e-12);
  CHECK(just_before ==
        doctest::Approx((1 - eta) * (1 - eta) * s3 + 2 * eta).epsilon(1e-9));
  CHECK(interpolation_variance(s0, eta, 4 * eta) ==
        doctest::Approx(lmc_variance(s0, eta, 4)).epsilon(1e-14));
}

TEST_CASE("squared ratio moment formula") {
  CHECK(squared_ratio_moment(1.0, 7) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(squared_ratio_moment(1.2, 2) ==
        doctest::Approx(1.0 / (0.5 * 1.728)).epsilon(1e-12));
  CHECK_THROWS_AS(squared_ratio_moment(1.5, 1), std::domain_error);

  // d-dimensional moment is the d-th power of the 1-d integral of rho^3/nu^2.
  const double s = 0.5263157894736842;
  const double one_dim = integrate([s](double x) {
    const double r = normal_pdf(x, 0.0, s);
    const double q = normal_pdf(x, 0.0, 1.0);
    return r * r * r / (q * q);
  });
  CHECK(squared_ratio_moment(s, 10) ==
        doctest::Approx(std::pow(one_dim, 10)).epsilon(1e-8));
}

TEST_CASE("chi2 closed form vs quadrature") {
  CHECK(chi2_isotropic(1.0, 3) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(chi2_isotropic(1.2, 2) == doctest::Approx(1.0 / 0.96 - 1.0).epsilon(1e-12));
  const double quad = integrate([](double x) {
                        const double r = normal_pdf(x, 0.0, 0.9);
                        const double q = normal_pdf(x, 0.0, 1.0);
                        return r * r / q;
                      }) - 1.0;
  CHECK(chi2_isotropic(0.9, 1) == doctest::Approx(quad).epsilon(1e-10));
  CHECK(chi2_isotropic(0.9, 1) ==
        doctest::Approx(0.005037815259212097).epsilon(1e-12));
  // Mean shift against quadrature.
  const double quad_shift = integrate([](double x) {
                              const double r = normal_pdf(x, 0.7, 0.9);
                              const double q = normal_pdf(x, 0.0, 1.0);
                              return r * r / q;
                            }) - 1.0;
  CHECK(chi2_isotropic(0.9, 1, 0.49) == doctest::Approx(quad_shift).epsilon(1e-10));
  CHECK_THROWS_AS(chi2_isotropic(2.0, 1), std::domain_error);
}

TEST_CASE("renyi mean shift closed form") {
  CHECK(renyi_mean_shift(2.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(renyi_mean_shift(2.0, 0.0, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(renyi_mean_shift(3.0, 2.0, 0.5) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK_THROWS_AS(renyi_mean_shift(1.0, 1.0, 1.0), std::invalid_argument);

  // Against quadrature of the defining integral for alpha = 2.
  const double f2 = integrate([](double x) {
    const double r = normal_pdf(x, 0.0, 0.6);
    const double q = normal_pdf(x, 0.8, 0.6);
    return r * r / q;
  });
  CHECK(renyi_mean_shift(2.0, 0.64, 0.6) ==
        doctest::Approx(std::log(f2)).epsilon(1e-9));
}

TEST_CASE("renyi isotropic scale form vs quadrature and chi2") {
  // R2 = log(1 + chi2).
  for (double s : {0.5, 0.9, 1.3}) {
    CHECK(renyi_isotropic(2.0, s, 1) ==
          doctest::Approx(std::log1p(chi2_isotropic(s, 1))).epsilon(1e-12));
  }
  const double f3 = integrate([](double x) {
    const double r = normal_pdf(x, 0.0, 0.8);
    const double q = normal_pdf(x, 0.0, 1.0);
    return r * r * r / (q * q);
  });
  CHECK(renyi_isotropic(3.0, 0.8, 1) ==
        doctest::Approx(0.5 * std::log(f3)).epsilon(1e-9));
  CHECK_THROWS_AS(renyi_isotropic(3.0, 1.6, 1), std::domain_error);
}

TEST_CASE("kl and w2 closed forms") {
  CHECK(kl_gaussian(1.0, 4) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(w2_squared_gaussian(1.0, 1.0, 4) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kl_gaussian(0.9, 1) ==
        doctest::Approx(0.002680257828913152).epsilon(1e-12));
  const double quad_kl = integrate([](double x) {
    const double r = normal_pdf(x, 0.0, 0.9);
    const double q = normal_pdf(x, 0.0, 1.0);
    return r * std::log(r / q);
  });
  CHECK(kl_gaussian(0.9, 1) == doctest::Approx(quad_kl).epsilon(1e-9));
  CHECK(w2_squared_gaussian(1.0, 4.0, 3) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("init moment bound: C_sigma values and domination") {
  const Potential g1 = gaussian_potential(1);
  const auto [cs, bound] = init_moment_bound(g1, 0.25, 1, 2.0);
  CHECK(cs == doctest::Approx(2.612085713764618).epsilon(1e-12));
  CHECK(bound == doctest::Approx(std::exp(2.0 * cs)).epsilon(1e-12));
  CHECK_THROWS_AS(init_moment_bound(g1, 0.6, 1, 2.0), std::domain_error);

  // Exact Gaussian-vs-Gaussian moments stay below the crude bound.
  for (double alpha : {2.0, 3.0}) {
    for (double s2 : {0.1, 0.25, 0.4}) {
      const double exact = integrate([s2, alpha](double x) {
        const double r = normal_pdf(x, 0.0, s2);
        const double q = normal_pdf(x, 0.0, 1.0);
        return std::pow(r / q, alpha) * q;
      });
      const auto [c, bnd] = init_moment_bound(g1, s2, 1, alpha);
      CHECK(exact <= bnd);
      CHECK(c > 0.0);
    }
  }
}

TEST_CASE("continuous contraction in all three divergences (lambda = 1)") {
  const double slack = 1e-10;
  for (double s0 : {0.25, 1.7}) {
    const double kl0 = kl_gaussian(s0, 1);
    const double chi0 = chi2_isotropic(s0, 1);
    const double r20 = renyi_isotropic(2.0, s0, 1);
    for (int i = 1; i <= 30; ++i) {
      const double t = 0.1 * i;
      const double st = ou_law(s0, t).sigma2;
      CHECK(kl_gaussian(st, 1) <= std::exp(-2.0 * t) * kl0 + slack);
      CHECK(chi2_isotropic(st, 1) <= std::exp(-2.0 * t) * chi0 + slack);
      CHECK(renyi_isotropic(2.0, st, 1) <= std::exp(-t) * r20 + slack);
    }
  }
  for (double s0 : {0.25, 1.4}) {
    const double r30 = renyi_isotropic(3.0, s0, 1);
    for (int i = 1; i <= 30; ++i) {
      const double t = 0.1 * i;
      const double st = ou_law(s0, t).sigma2;
      CHECK(renyi_isotropic(3.0, st, 1) <=
            std::exp(-2.0 * t / 3.0) * r30 + slack);
    }
  }
}

TEST_CASE("monotone warmness along the motivating example") {
  const double eta = 1e-3;
  const int d = 10;
  double s = 0.5 / (1.0 - eta / 2.0);
  double prev = squared_ratio_moment(s, d);
  bool below = prev < 1.0 + 1e-6;
  for (int k = 0; k < 20000; ++k) {
    const double s_next = (1.0 - eta) * (1.0 - eta) * s + 2.0 * eta;
    CHECK(s_next >= s - 1e-15);  // variance is nondecreasing
    s = s_next;
    const double e = squared_ratio_moment(s, d);
    if (!below) {
      CHECK(e <= prev + 1e-15);  // moment nonincreasing until below 1 + 1e-6
      if (e < 1.0 + 1e-6) below = true;
    }
    prev = e;
  }
  CHECK(below);
  CHECK(std::abs(s - 1.0 / (1.0 - eta / 2.0)) < 1e-9);
}

TEST_CASE("divergences vanish iff the laws coincide") {
  for (double s : {0.8, 1.0, 1.3}) {
    for (double shift2 : {0.0, 0.25, 1.0}) {
      const bool same = s == 1.0 && shift2 == 0.0;
      CHECK((chi2_isotropic(s, 2, shift2) == 0.0) == same);
      CHECK((kl_gaussian(s, 2, shift2) == 0.0) == same);
      CHECK((std::abs(renyi_isotropic(2.0, s, 2, shift2)) < 1e-15) == same);
    }
  }
}
