#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "langevin/divergence.hpp"
#include "langevin/oracle.hpp"
#include "langevin/rng.hpp"

using namespace langevin;

namespace {

double normal_pdf(double x, double mu, double s2) {
  return std::exp(-0.5 * (x - mu) * (x - mu) / s2) / std::sqrt(2.0 * M_PI * s2);
}

DensityGrid gauss_grid(double mu, double s2, double lo = -8.0, double hi = 8.0,
                       int n = 4097) {
  return normalize(grid_from_function_1d(
      [mu, s2](double x) { return normal_pdf(x, mu, s2); }, lo, hi, n));
}

}  // namespace

TEST_CASE("normalize: constants, gaussians, idempotence") {
  const DensityGrid flat =
      normalize(grid_from_function_1d([](double) { return 3.7; }, 0.0, 1.0, 101));
  for (int i = 0; i < flat.res[0]; ++i) {
    CHECK(flat.values[i] == doctest::Approx(1.0).epsilon(1e-12));
  }

  const DensityGrid g = normalize(grid_from_function_1d(
      [](double x) { return std::exp(-0.5 * x * x); }, -8.0, 8.0, 4097));
  double sup = 0.0;
  for (int i = 0; i < g.res[0]; ++i) {
    sup = std::max(sup,
                   std::abs(g.values[i] - normal_pdf(g.coord(0, i), 0.0, 1.0)));
  }
  CHECK(sup < 1e-6);
  CHECK(grid_mass(g) == doctest::Approx(1.0).epsilon(1e-12));

  const DensityGrid again = normalize(g);
  CHECK((again.values - g.values).abs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(
      normalize(grid_from_function_1d([](double) { return 0.0; }, 0, 1, 33)),
      std::runtime_error);
}

TEST_CASE("quadrature matches the closed-form oracle on gaussians") {
  const DensityGrid rho = gauss_grid(0.0, 0.9);
  const DensityGrid nu = gauss_grid(0.0, 1.0);

  const DivergenceReport chi = quadrature_divergence(rho, nu, Metric::chi2);
  CHECK(chi.value == doctest::Approx(oracle::chi2_isotropic(0.9, 1)).epsilon(1e-6));
  CHECK(chi.value == doctest::Approx(0.005037815259212).epsilon(1e-4));

  const DivergenceReport kl = quadrature_divergence(rho, nu, Metric::kl);
  CHECK(kl.value == doctest::Approx(oracle::kl_gaussian(0.9, 1)).epsilon(1e-6));

  // Identical grids give zero for every metric.
  for (Metric m : {Metric::chi2, Metric::kl, Metric::tv}) {
    CHECK(quadrature_divergence(nu, nu, m).value ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(quadrature_divergence(nu, nu, Metric::renyi, 2.0).value ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("renyi identities hold on random gaussian pairs") {
  rng::NoiseStream s(3, 0);
  for (int i = 0; i < 20; ++i) {
    const double s2 = 0.6 + 0.9 * s.uniform(rng::NoiseStream::kAux, i, 0);
    const double mu = -0.8 + 1.6 * s.uniform(rng::NoiseStream::kAux, i, 1);
    const DensityGrid rho = gauss_grid(mu, s2);
    const DensityGrid nu = gauss_grid(0.0, 1.0);
    const double chi = quadrature_divergence(rho, nu, Metric::chi2).value;
    const double r2 = quadrature_divergence(rho, nu, Metric::renyi, 2.0).value;
    CHECK(r2 == doctest::Approx(std::log1p(chi)).epsilon(1e-8));
    // chi2 = F2 - 1 and (alpha-1) R_alpha = log F_alpha.
    const double f2 = f_alpha_moment(rho, nu, 2.0);
    CHECK(std::abs(chi - (f2 - 1.0)) < 1e-10);
    const double f3 = f_alpha_moment(rho, nu, 3.0);
    const double r3 = quadrature_divergence(rho, nu, Metric::renyi, 3.0).value;
    CHECK(std::abs(2.0 * r3 - std::log(f3)) < 1e-10);
  }
}

TEST_CASE("renyi order monotonicity") {
  const DensityGrid rho = gauss_grid(0.3, 0.8);
  const DensityGrid nu = gauss_grid(0.0, 1.0);
  rng::NoiseStream s(5, 0);
  for (int i = 0; i < 30; ++i) {
    const double a = 1.1 + 1.5 * s.uniform(rng::NoiseStream::kAux, i, 0);
    const double b = a + 1.2 * s.uniform(rng::NoiseStream::kAux, i, 1);
    const double ra = quadrature_divergence(rho, nu, Metric::renyi, a).value;
    const double rb = quadrature_divergence(rho, nu, Metric::renyi, b).value;
    CHECK(ra <= rb + 1e-9);
  }
}

TEST_CASE("f_alpha_moment basics") {
  const DensityGrid nu = gauss_grid(0.0, 1.0);
  CHECK(f_alpha_moment(nu, nu, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f_alpha_moment(gauss_grid(0.0, 0.9), nu, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f_alpha_moment(gauss_grid(0.0, 0.9), nu, 2.0) ==
        doctest::Approx(1.005037815259).epsilon(1e-6));
}

TEST_CASE("support violations raise instead of clamping") {
  DensityGrid nu = gauss_grid(0.0, 1.0);
  DensityGrid rho = nu;
  // Kill the reference density on one side where rho stays positive.
  for (int i = 0; i < nu.res[0] / 4; ++i) nu.values[i] = 0.0;
  nu = normalize(nu);
  CHECK_THROWS_AS(quadrature_divergence(rho, nu, Metric::chi2),
                  std::domain_error);
  CHECK_THROWS_AS(f_alpha_moment(rho, nu, 2.0), std::domain_error);
  CHECK_THROWS_AS(quadrature_divergence(rho, nu, Metric::renyi, 1.0),
                  std::invalid_argument);
}

TEST_CASE("grid refinement shrinks within the reported error estimate") {
  const DensityGrid rho_c = gauss_grid(0.0, 0.9, -8.0, 8.0, 1025);
  const DensityGrid nu_c = gauss_grid(0.0, 1.0, -8.0, 8.0, 1025);
  const DensityGrid rho_f = gauss_grid(0.0, 0.9, -8.0, 8.0, 2049);
  const DensityGrid nu_f = gauss_grid(0.0, 1.0, -8.0, 8.0, 2049);
  for (Metric m : {Metric::chi2, Metric::kl, Metric::tv}) {
    const DivergenceReport coarse = quadrature_divergence(rho_c, nu_c, m);
    const DivergenceReport fine = quadrature_divergence(rho_f, nu_f, m);
    CHECK(std::abs(fine.value - coarse.value) <=
          coarse.error_estimate + 1e-12);
  }
}

TEST_CASE("histogram density: registration, mass, negative controls") {
  rng::NoiseStream s(11, 0);
  const long n = 200000;
  Eigen::MatrixXd samples(n, 1);
  for (long i = 0; i < n; ++i) {
    samples(i, 0) = s.normal(rng::NoiseStream::kStep, i, 0);
  }
  const DensityGrid hist = histogram_density(samples, {-6.0, 0.0}, {6.0, 1.0},
                                             {256, 1});
  CHECK(hist.sample_count > 0);
  CHECK(hist.clipped_fraction < 1e-4);
  CHECK(grid_mass(hist) == doctest::Approx(1.0).epsilon(1e-9));
  // Bin centers: first node at lo + w/2.
  CHECK(hist.lo[0] == doctest::Approx(-6.0 + 12.0 / 256 / 2).epsilon(1e-12));

  const DensityGrid target = normalize(grid_from_function_1d(
      [](double x) { return normal_pdf(x, 0.0, 1.0); }, hist.lo[0], hist.hi[0],
      hist.res[0]));
  CHECK(quadrature_divergence(hist, target, Metric::kl).value < 5e-3);

  // Single repeated sample: all mass in one bin.
  Eigen::MatrixXd rep(100, 1);
  rep.setConstant(0.42);
  const DensityGrid one = histogram_density(rep, {-6.0, 0.0}, {6.0, 1.0}, {64, 1});
  CHECK((one.values > 0.0).count() == 1);

  Eigen::MatrixXd outside(10, 1);
  outside.setConstant(99.0);
  CHECK_THROWS_AS(histogram_density(outside, {-6.0, 0.0}, {6.0, 1.0}, {64, 1}),
                  std::runtime_error);
  CHECK_THROWS_AS(histogram_density(samples, {-6.0, 0.0}, {6.0, 1.0}, {8, 1}),
                  std::invalid_argument);
}

TEST_CASE("uniform samples give a flat histogram within 3 SE per bin") {
  rng::NoiseStream s(13, 0);
  const long n = 100000;
  Eigen::MatrixXd samples(n, 1);
  for (long i = 0; i < n; ++i) {
    samples(i, 0) = s.uniform(rng::NoiseStream::kAux, i, 0);
  }
  const int bins = 32;
  const DensityGrid hist =
      histogram_density(samples, {0.0, 0.0}, {1.0, 1.0}, {bins, 1});
  const double p = 1.0 / bins;
  const double se = std::sqrt(p * (1.0 - p) / n) * bins;  // density units
  for (int i = 0; i < bins; ++i) {
    CHECK(std::abs(hist.values[i] - 1.0) <= 3.0 * se + 0.02);
  }
}

TEST_CASE("two-dimensional quadrature against the closed form") {
  const auto iso = [](double s2) {
    return normalize(grid_from_function_2d(
        [s2](double x, double y) {
          return std::exp(-0.5 * (x * x + y * y) / s2) / (2.0 * M_PI * s2);
        },
        -8.0, 8.0, -8.0, 8.0, 257, 257));
  };
  const DensityGrid rho = iso(0.9);
  const DensityGrid nu = iso(1.0);
  CHECK(quadrature_divergence(rho, nu, Metric::chi2).value ==
        doctest::Approx(oracle::chi2_isotropic(0.9, 2)).epsilon(1e-5));
  CHECK(quadrature_divergence(rho, nu, Metric::kl).value ==
        doctest::Approx(oracle::kl_gaussian(0.9, 2)).epsilon(1e-5));
}

TEST_CASE("w2 quantile quadrature on gaussians") {
  const DensityGrid nu = gauss_grid(0.0, 1.0, -16.0, 16.0, 8193);
  CHECK(w2_1d(nu, nu, 10000).value == doctest::Approx(0.0).epsilon(1e-9));
  const DensityGrid wide = gauss_grid(0.0, 4.0, -16.0, 16.0, 8193);
  CHECK(w2_1d(wide, nu, 100000).value == doctest::Approx(1.0).epsilon(1e-3));
  const DensityGrid shifted = gauss_grid(2.0, 1.0, -16.0, 16.0, 8193);
  CHECK(w2_1d(shifted, nu, 100000).value == doctest::Approx(2.0).epsilon(1e-3));
  CHECK_THROWS_AS(
      w2_1d(grid_from_function_2d([](double, double) { return 1.0; }, 0, 1, 0,
                                  1, 16, 16),
            nu, 100),
      std::invalid_argument);
}

TEST_CASE("metric chain holds on gaussian pairs") {
  const DensityGrid nu = gauss_grid(0.0, 1.0);
  const MetricChainReport base = check_metric_chain(gauss_grid(0.0, 0.9), nu, 1.0);
  CHECK(base.all_ok());

  const MetricChainReport same = check_metric_chain(nu, nu, 1.0);
  CHECK(same.all_ok());
  CHECK(same.tv == doctest::Approx(0.0).epsilon(1e-10));

  rng::NoiseStream s(17, 0);
  for (int i = 0; i < 50; ++i) {
    const double s2 = 0.6 + 0.9 * s.uniform(rng::NoiseStream::kAux, i, 0);
    const double mu = -1.0 + 2.0 * s.uniform(rng::NoiseStream::kAux, i, 1);
    CAPTURE(s2);
    CAPTURE(mu);
    CHECK(check_metric_chain(gauss_grid(mu, s2), nu, 1.0).all_ok());
  }
}

TEST_CASE("divergence report csv row format") {
  DivergenceReport r;
  r.metric = Metric::renyi;
  r.alpha = 2.0;
  r.value = 0.25;
  r.method = EstimateMethod::quadrature;
  r.error_estimate = 1e-9;
  CHECK(divergence_report_csv_row(r) ==
        "renyi,2,0.25,quadrature,1.0000000000000001e-09");
}

TEST_CASE("empirical chi2 bias correction against the oracle") {
  // Stationary unit-gaussian samples; plug-in chi2 carries a (K-1)/n
  // multinomial bias that the corrected estimator removes.
  rng::NoiseStream s(19, 0);
  const long n = 200000;
  Eigen::MatrixXd samples(n, 1);
  for (long i = 0; i < n; ++i) {
    samples(i, 0) = s.normal(rng::NoiseStream::kStep, i, 0);
  }
  const DensityGrid hist =
      histogram_density(samples, {-6.0, 0.0}, {6.0, 1.0}, {256, 1});
  const DensityGrid target = normalize(grid_from_function_1d(
      [](double x) { return normal_pdf(x, 0.0, 1.0); }, hist.lo[0], hist.hi[0],
      hist.res[0]));
  const double raw = quadrature_divergence(hist, target, Metric::chi2).value;
  const DivergenceReport corrected = empirical_chi2(hist, target);
  CHECK(raw > 1e-3);  // bias term (K-1)/n ~ 1.3e-3 dominates
  const double se = bootstrap_chi2_se(samples, hist, target, 50, 23);
  CHECK(corrected.value <= 3.0 * se + 1e-5);  // truth is 0 here
  CHECK(se > 0.0);
  CHECK(se < 1e-3);
}
