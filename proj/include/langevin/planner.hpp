#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "langevin/potential.hpp"

namespace langevin {

struct PlannerInputs {
  Certificate cert;      // needs L, m, b, lambda; minimizer norm feeds beta
  int d = 1;
  double sigma2 = 0.0;   // init variance, must be < 1/(1+L)
  double epsilon = 0.0;  // target accuracy in (0,1)
  double alpha = 0.0;    // Renyi order (> 1) for plan_renyi
  double c1 = 1.0, c2 = 1.0, c3 = 1.0;
  double grad0_norm2 = 0.0;  // |grad f(0)|^2
  double f0 = 0.0;           // f(0)
};

PlannerInputs planner_inputs_from(const Potential& p, const Certificate& cert,
                                  double sigma2, double epsilon);

struct PlanCondition {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

enum class PlanMetric { chi2, renyi };

struct LmcPlan {
  double eta = 0.0;
  std::int64_t N = 0;
  std::int64_t total_iterations = 0;  // 2N
  double beta = 0.0;
  double c_sigma = 0.0;
  PlanMetric metric = PlanMetric::chi2;
  double alpha = 0.0;
  std::vector<PlanCondition> conditions;
  bool feasible = false;
  // The guarantee is stated at iteration 2N exactly; nothing is claimed for
  // later iterates.
  std::string note = "guarantee holds at iteration 2N only";
};

std::string plan_json(const LmcPlan& plan);

// Dimension-free constant of the single-step error term:
// beta^2 = 1 + (sigma^4 (1 + 2/d) + 6 sigma^2 |x*|^2 / d + |x*|^4 / d^2)
//              / (1 + b/d)^2  +  (sigma^2 + |x*|^2/d) / (1 + b/d).
double compute_beta(double sigma2, double x_star_norm2, double b, int d);

// C_sigma = 1 + (f(0) + |grad f(0)|^2)/d - log(sigma^2 [(1+L) ^ 2pi]).
double compute_c_sigma(double f0, double grad0_norm2, int d, double sigma2,
                       double L);

// Step-size / iteration-count choice for a chi^2 target accuracy, with all
// sufficiency conditions recorded.  An infeasible plan is still returned,
// flagged, with full diagnostics.
LmcPlan plan_chi2(const PlannerInputs& inp);

// Renyi-order variant with the alpha^3 / alpha^4 scalings.
LmcPlan plan_renyi(const PlannerInputs& inp);

enum class TargetMetric { kl, tv, w2 };

// chi^2 accuracy to request so that the target metric reaches epsilon:
// KL -> eps, TV -> 2 eps^2, W2 -> eps^2 / (2 lambda).
double translate_metric(TargetMetric metric, double epsilon, double lambda);

// theta_k <= e^{-a k} theta_0 + h/a for theta_{k+1} <= (1-a) theta_k + h.
double iterate_affine_recursion(double theta0, double a, double h,
                                std::int64_t k);

}  // namespace langevin
