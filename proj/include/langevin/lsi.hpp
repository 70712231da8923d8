#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "langevin/potential.hpp"

namespace langevin {

enum class LsiMethod {
  bakry_emery,
  holley_stroock,
  outside_ball,
  nonuniform,
  lyapunov,
};

std::string to_string(LsiMethod m);

struct LsiBound {
  double lambda_bound = 0.0;
  LsiMethod method = LsiMethod::bakry_emery;
  std::vector<std::pair<std::string, double>> inputs;
};

std::string lsi_bound_json(const LsiBound& b);

// Radial lower-curvature profile m0(r) = inf_{|x| = r} eigenvalues of the
// Hessian, used by the non-uniform recipe.
struct CurvatureProfile {
  std::function<double(double)> m0_of_r;
};

// m-strongly convex target: lambda = 1/m.
LsiBound bakry_emery(double m);

// Bounded perturbation of an m0-strongly convex potential: lambda = e^{2B}/m0.
LsiBound holley_stroock(double m0, double B);

// Strong convexity outside a ball of radius r with curvature deficit k
// inside: lambda = exp((k + m0) r^2) / m0.
LsiBound outside_ball(double m0, double k, double r);

// Non-uniform curvature: lambda = (a0^2/2) exp(int_0^{a0} r m0(r) dr - 1)
// where a0 solves int_0^{a} m0(r) dr = 2/a.
LsiBound nonuniform_bound(const CurvatureProfile& profile, double quad_tol);

// Lyapunov route; this is a Poincare-constant bound:
// lambda <= (2/m)(1 + c (m/2)(d + b) e^{Osc_R(f)}) with R^2 = (2/m)(d+b+1),
// oscillation taken over the ball of radius R around the minimizer.
LsiBound lyapunov_poincare(const Potential& p, const Certificate& cert,
                           double c, long osc_samples, std::uint64_t seed = 0);

// Curvature profile of the heavy-tailed corrupted-noise regression family.
CurvatureProfile corrupted_regression_profile(double alpha, double beta);

}  // namespace langevin
