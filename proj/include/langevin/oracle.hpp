#pragma once

#include <cstdint>

#include "langevin/potential.hpp"

namespace langevin::oracle {

// Isotropic Gaussian law N(mean, sigma2 I); the exact laws of the diffusion,
// the LMC chain and the interpolation process for f = |x|^2/2 all live here.
struct GaussianLaw {
  Vec mean;
  double sigma2 = 1.0;
  int d = 1;
};

// Law of the Ornstein-Uhlenbeck diffusion started at N(0, sigma2_0 I):
// variance 1 + e^{-2t}(sigma2_0 - 1).
GaussianLaw ou_law(double sigma2_0, double t);

// Per-coordinate LMC variance after k steps of step size eta:
// (1-eta)^{2k} sigma2_0 + (1 - (1-eta)^{2k}) / (1 - eta/2).
double lmc_variance(double sigma2_0, double eta, std::int64_t k);

// Variance of the interpolation process at time T = k eta + t, t in [0, eta):
// (1-t)^2 sigma2_{k eta} + 2t.
double interpolation_variance(double sigma2_0, double eta, double T);

// E[(rho_T / nu)^2] for rho_T = N(0, sigma2_T I) against the unit Gaussian:
// 1 / ((3/sigma2_T - 2)^{d/2} sigma_T^{3d}), finite iff sigma2_T < 3/2.
double squared_ratio_moment(double sigma2_T, int d);

// chi^2(N(mu, sigma2 I) || N(0, I)); finite iff sigma2 < 2.
double chi2_isotropic(double sigma2, int d, double mean_shift2 = 0.0);

// R_alpha(N(0, s I) || N(x, s I)) = alpha |x|^2 / (2 s).
double renyi_mean_shift(double alpha, double shift2, double sigma2);

// R_alpha(N(mu, sigma2 I) || N(0, I)); finite iff alpha + (1-alpha) sigma2 > 0.
double renyi_isotropic(double alpha, double sigma2, int d,
                       double mean_shift2 = 0.0);

// KL(N(mu, sigma2 I) || N(0, I)) = (d/2)(sigma2 - 1 - log sigma2) + |mu|^2/2.
double kl_gaussian(double sigma2, int d, double mean_shift2 = 0.0);

// W2^2 between isotropic Gaussians: |mu1-mu2|^2 + d (sigma_1 - sigma_2)^2.
double w2_squared_gaussian(double sigma2_1, double sigma2_2, int d,
                           double mean_shift2 = 0.0);

struct InitMomentBound {
  double c_sigma = 0.0;
  double bound = 0.0;  // e^{alpha d C_sigma}
};

// Crude bound on E_{nu}[(rho_0/nu)^alpha] for rho_0 = N(0, sigma2 I):
// C_sigma = 1 + (f(0) + |grad f(0)|^2)/d - log(sigma2 [(1+L) ^ 2pi]).
InitMomentBound init_moment_bound(const Potential& p, double sigma2, int d,
                                  double alpha);

}  // namespace langevin::oracle
