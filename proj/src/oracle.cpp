#include "langevin/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace langevin::oracle {

GaussianLaw ou_law(double sigma2_0, double t) {
  if (!(sigma2_0 > 0.0)) throw std::invalid_argument("ou_law: sigma2_0 <= 0");
  if (!(t >= 0.0)) throw std::invalid_argument("ou_law: t < 0");
  GaussianLaw law;
  law.mean = Vec::Zero(1);
  law.d = 1;
  law.sigma2 = 1.0 + std::exp(-2.0 * t) * (sigma2_0 - 1.0);
  return law;
}

double lmc_variance(double sigma2_0, double eta, std::int64_t k) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::domain_error("lmc_variance: eta must be in (0,1)");
  }
  if (k < 0) throw std::invalid_argument("lmc_variance: k < 0");
  if (!(sigma2_0 >= 0.0)) throw std::invalid_argument("lmc_variance: sigma2_0");
  // (1-eta)^{2k} via expm1/log1p so k ~ 1e10 stays accurate.
  const double decay = std::exp(2.0 * static_cast<double>(k) * std::log1p(-eta));
  return decay * sigma2_0 + (1.0 - decay) / (1.0 - eta / 2.0);
}

double interpolation_variance(double sigma2_0, double eta, double T) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::domain_error("interpolation_variance: eta must be in (0,1)");
  }
  if (!(T >= 0.0)) throw std::invalid_argument("interpolation_variance: T < 0");
  const auto k = static_cast<std::int64_t>(std::floor(T / eta));
  const double t = T - static_cast<double>(k) * eta;
  const double s = lmc_variance(sigma2_0, eta, k);
  return (1.0 - t) * (1.0 - t) * s + 2.0 * t;
}

double squared_ratio_moment(double sigma2_T, int d) {
  if (!(sigma2_T > 0.0 && sigma2_T < 1.5)) {
    throw std::domain_error(
        "squared_ratio_moment: requires 0 < sigma2 < 3/2 (moment infinite)");
  }
  if (d < 1) throw std::invalid_argument("squared_ratio_moment: d < 1");
  return 1.0 / (std::pow(3.0 / sigma2_T - 2.0, 0.5 * d) *
                std::pow(sigma2_T, 1.5 * d));
}

double chi2_isotropic(double sigma2, int d, double mean_shift2) {
  if (!(sigma2 > 0.0 && sigma2 < 2.0)) {
    throw std::domain_error("chi2_isotropic: requires 0 < sigma2 < 2");
  }
  if (!(mean_shift2 >= 0.0)) throw std::invalid_argument("chi2_isotropic: shift2");
  if (d < 1) throw std::invalid_argument("chi2_isotropic: d < 1");
  const double log_factor = -0.5 * d * std::log(sigma2 * (2.0 - sigma2)) +
                            mean_shift2 / (2.0 - sigma2);
  return std::expm1(log_factor);
}

double renyi_mean_shift(double alpha, double shift2, double sigma2) {
  if (!(alpha > 1.0)) throw std::invalid_argument("renyi_mean_shift: alpha <= 1");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("renyi_mean_shift: sigma2");
  return alpha * shift2 / (2.0 * sigma2);
}

double renyi_isotropic(double alpha, double sigma2, int d, double mean_shift2) {
  if (!(alpha > 1.0)) throw std::invalid_argument("renyi_isotropic: alpha <= 1");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("renyi_isotropic: sigma2");
  const double sa2 = alpha + (1.0 - alpha) * sigma2;
  if (!(sa2 > 0.0)) {
    throw std::domain_error("renyi_isotropic: divergence infinite (sigma2 too large)");
  }
  return alpha * mean_shift2 / (2.0 * sa2) -
         0.5 * d / (alpha - 1.0) * std::log(sa2) -
         0.5 * d * std::log(sigma2);
}

double kl_gaussian(double sigma2, int d, double mean_shift2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("kl_gaussian: sigma2 <= 0");
  return 0.5 * d * (sigma2 - 1.0 - std::log(sigma2)) + 0.5 * mean_shift2;
}

double w2_squared_gaussian(double sigma2_1, double sigma2_2, int d,
                           double mean_shift2) {
  if (!(sigma2_1 > 0.0 && sigma2_2 > 0.0)) {
    throw std::invalid_argument("w2_squared_gaussian: variances must be > 0");
  }
  const double ds = std::sqrt(sigma2_1) - std::sqrt(sigma2_2);
  return mean_shift2 + d * ds * ds;
}

InitMomentBound init_moment_bound(const Potential& p, double sigma2, int d,
                                  double alpha) {
  if (!p.known || !p.known->has_L()) {
    throw std::invalid_argument("init_moment_bound: potential needs L");
  }
  if (!(alpha >= 2.0)) throw std::invalid_argument("init_moment_bound: alpha < 2");
  const double L = p.known->L;
  if (!(sigma2 > 0.0 && sigma2 < 1.0 / (1.0 + L))) {
    throw std::domain_error("init_moment_bound: sigma2 outside (0, 1/(1+L))");
  }
  const Vec zero = Vec::Zero(p.dim);
  const auto [f0, g0] = eval(p, zero);
  InitMomentBound out;
  out.c_sigma = 1.0 + (f0 + g0.squaredNorm()) / d -
                std::log(sigma2 * std::min(1.0 + L, 2.0 * M_PI));
  out.bound = std::exp(alpha * d * out.c_sigma);
  return out;
}

}  // namespace langevin::oracle
