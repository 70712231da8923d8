#pragma once

#include <functional>

namespace langevin::numeric {

// Adaptive Simpson quadrature on [lo, hi] with absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double lo,
                        double hi, double tol, int max_depth = 40);

// Bisection for a root of g on [lo, hi]; requires g(lo)*g(hi) <= 0.
double bisect(const std::function<double(double)>& g, double lo, double hi,
              double xtol, int max_iters = 200);

}  // namespace langevin::numeric
