#pragma once

#include <cstdint>
#include <string>

#include "langevin/potential.hpp"

namespace langevin {

struct CheckReport {
  long samples = 0;
  long violations = 0;
  double worst_margin = 0.0;
  bool passed = false;
};

std::string check_report_json(const CheckReport& r);

// Central-difference gradient check with step h = 1e-5 (1 + |x|);
// worst_margin is the largest relative error seen.
CheckReport check_gradient_fd(const Potential& p, long n_samples, double tol,
                              double box_radius = 5.0, std::uint64_t seed = 0);

// Samples point pairs and tests <x-y, grad f(x) - grad f(y)> >= m|x-y|^2 - b;
// worst_margin is the minimum slack over all pairs.
CheckReport check_dissipativity(const Potential& p, double m, double b,
                                long n_pairs, double box_radius,
                                std::uint64_t seed = 0);

// Sampled supremum of |grad f(x) - grad f(y)| / |x-y|; a lower estimate of L.
double estimate_lipschitz(const Potential& p, long n_pairs, double box_radius,
                          std::uint64_t seed = 0);

// Gradient descent with Armijo backtracking until |grad f| <= tol.
Vec find_minimizer(const Potential& p, const Vec& x0, double tol = 1e-8,
                   long max_iters = 100000);

struct CertifyOptions {
  long n_fd_samples = 1000;
  double fd_tol = 1e-5;
  long n_pairs = 10000;
  double box_radius = 20.0;
  std::uint64_t seed = 0;
};

// Assembles a Certificate: analytic constants are kept where the potential
// provides them, everything else is estimated numerically and tagged as such.
Certificate certify(const Potential& p, const CertifyOptions& opts = {});

}  // namespace langevin
