#include "langevin/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace langevin {

namespace {

void validate_common(const PlannerInputs& inp) {
  const auto& c = inp.cert;
  if (!c.has_L() || !c.has_m() || !c.has_b() || !c.has_lambda()) {
    throw std::invalid_argument("planner: certificate needs L, m, b, lambda");
  }
  if (!(inp.epsilon > 0.0 && inp.epsilon < 1.0)) {
    throw std::invalid_argument("planner: epsilon must be in (0,1)");
  }
  if (!(inp.sigma2 > 0.0 && inp.sigma2 < 1.0 / (1.0 + c.L))) {
    throw std::invalid_argument("planner: sigma2 must be < 1/(1+L)");
  }
  if (inp.d < 1) throw std::invalid_argument("planner: d must be >= 1");
}

// The closed-form displays divide by log(lambda^2 L^4 / m^2), which vanishes
// for the unit Gaussian; clamping below 1 keeps every sufficiency inequality
// intact.
double clog(double L, double m, double lambda) {
  return std::max(std::log(lambda * lambda * std::pow(L, 4) / (m * m)), 1.0);
}

double cond_number(const Certificate& c) { return c.L / c.m; }

PlanCondition upper(const std::string& name, double lhs, double rhs) {
  return {name, lhs, rhs, lhs <= rhs};
}

PlanCondition lower(const std::string& name, double lhs, double rhs) {
  return {name, lhs, rhs, lhs >= rhs};
}

}  // namespace

PlannerInputs planner_inputs_from(const Potential& p, const Certificate& cert,
                                  double sigma2, double epsilon) {
  PlannerInputs inp;
  inp.cert = cert;
  inp.d = p.dim;
  inp.sigma2 = sigma2;
  inp.epsilon = epsilon;
  const Vec zero = Vec::Zero(p.dim);
  const auto [f0, g0] = eval(p, zero);
  inp.f0 = f0;
  inp.grad0_norm2 = g0.squaredNorm();
  return inp;
}

double compute_beta(double sigma2, double x_star_norm2, double b, int d) {
  if (d < 1) throw std::invalid_argument("compute_beta: d < 1");
  if (!(sigma2 >= 0.0) || !(x_star_norm2 >= 0.0) || !(b >= 0.0)) {
    throw std::invalid_argument("compute_beta: negative inputs");
  }
  const double dd = static_cast<double>(d);
  const double q = 1.0 + b / dd;
  const double s2 = sigma2;
  const double x2 = x_star_norm2;
  const double t1 =
      (s2 * s2 * (1.0 + 2.0 / dd) + 6.0 * s2 * x2 / dd + x2 * x2 / (dd * dd)) /
      (q * q);
  const double t2 = (s2 + x2 / dd) / q;
  return std::sqrt(1.0 + t1 + t2);
}

double compute_c_sigma(double f0, double grad0_norm2, int d, double sigma2,
                       double L) {
  if (!(sigma2 > 0.0 && sigma2 < 1.0 / (1.0 + L))) {
    throw std::domain_error("compute_c_sigma: sigma2 outside (0, 1/(1+L))");
  }
  return 1.0 + (f0 + grad0_norm2) / d -
         std::log(sigma2 * std::min(1.0 + L, 2.0 * M_PI));
}

LmcPlan plan_chi2(const PlannerInputs& inp) {
  validate_common(inp);
  const auto& c = inp.cert;
  const double L = c.L, m = c.m, b = c.b, lam = c.lambda;
  const double eps = inp.epsilon;
  const double dd = static_cast<double>(inp.d);
  const double kappa = cond_number(c);

  LmcPlan plan;
  plan.metric = PlanMetric::chi2;
  plan.beta = compute_beta(inp.sigma2, c.minimizer_norm2(), b, inp.d);
  plan.c_sigma = compute_c_sigma(inp.f0, inp.grad0_norm2, inp.d, inp.sigma2, L);

  const double cl = clog(L, m, lam);
  const double lg = std::log(144.0 * dd * plan.c_sigma / eps);
  const double L4 = std::pow(L, 4);

  plan.eta = (inp.c3 / plan.beta) * (m * m / (lam * L4 * cl)) *
             (eps / (b + dd)) / (lg * lg);
  const double n_real = (inp.c2 * plan.beta / inp.c3) *
                        (lam * lam * L4 * cl / (m * m)) * ((b + dd) / eps) *
                        lg * lg * lg;
  plan.N = static_cast<std::int64_t>(std::ceil(n_real));
  plan.total_iterations = 2 * plan.N;

  const double eta = plan.eta;
  const double neta = eta * static_cast<double>(plan.N);
  const double grad0_cap = inp.grad0_norm2 > 0.0
                               ? 2.0 / inp.grad0_norm2
                               : std::numeric_limits<double>::infinity();
  plan.conditions = {
      upper("step_grad0", eta, grad0_cap),
      upper("step_smooth", eta,
            std::min(1.0, m) / (4.0 * std::max(1.0, L * L))),
      upper("step_lsi", eta, lam / 2.0),
      upper("step_accuracy", eta,
            (inp.c3 / (plan.beta * lam * L * L)) * eps / (b + dd)),
      lower("burn_in", neta, inp.c2 * lam * lg),
      upper("warmness",
            kappa * kappa * L * L *
                (b + dd + std::log(static_cast<double>(plan.N))) *
                static_cast<double>(plan.N) * eta * eta,
            inp.c1),
  };
  plan.feasible = plan.N >= 2;
  for (const auto& cond : plan.conditions) plan.feasible &= cond.ok;
  return plan;
}

LmcPlan plan_renyi(const PlannerInputs& inp) {
  validate_common(inp);
  if (!(inp.alpha > 1.0)) {
    throw std::invalid_argument("plan_renyi: alpha must be > 1");
  }
  const auto& c = inp.cert;
  const double L = c.L, m = c.m, b = c.b, lam = c.lambda;
  const double eps = inp.epsilon;
  const double al = inp.alpha;
  const double dd = static_cast<double>(inp.d);
  const double kappa = cond_number(c);

  LmcPlan plan;
  plan.metric = PlanMetric::renyi;
  plan.alpha = al;
  plan.beta = compute_beta(inp.sigma2, c.minimizer_norm2(), b, inp.d);
  plan.c_sigma = compute_c_sigma(inp.f0, inp.grad0_norm2, inp.d, inp.sigma2, L);

  const double cl = clog(L, m, lam);
  const double lg = std::log(6.0 * al * al * dd * plan.c_sigma /
                             ((al - 1.0) * eps));
  const double L4 = std::pow(L, 4);

  plan.eta = (inp.c3 / plan.beta) * (m * m / (L4 * lam * cl)) *
             (1.0 / (al * al * al)) * (eps / (b + dd)) / (lg * lg);
  const double n_real = (inp.c2 * plan.beta / inp.c3) *
                        (L4 * lam * lam * cl / (m * m)) * std::pow(al, 4) *
                        ((b + dd) / eps) * lg * lg * lg;
  plan.N = static_cast<std::int64_t>(std::ceil(n_real));
  plan.total_iterations = 2 * plan.N;

  const double eta = plan.eta;
  const double neta = eta * static_cast<double>(plan.N);
  const double grad0_cap = inp.grad0_norm2 > 0.0
                               ? 2.0 / inp.grad0_norm2
                               : std::numeric_limits<double>::infinity();
  plan.conditions = {
      upper("step_grad0", eta, grad0_cap),
      upper("step_smooth", eta,
            std::min(1.0, m) / (4.0 * std::max(1.0, L * L))),
      upper("step_renyi_lsi", eta, 2.0 * al * lam / 3.0),
      upper("step_accuracy", eta,
            (inp.c3 / (plan.beta * lam * L * L * std::pow(al, 17.0 / 8.0))) *
                eps / (b + dd)),
      lower("burn_in", neta, inp.c2 * al * lam * lg),
      upper("warmness",
            al * al * kappa * kappa * L * L *
                (b + dd + std::log(static_cast<double>(plan.N))) *
                static_cast<double>(plan.N) * eta * eta,
            inp.c1),
  };
  plan.feasible = plan.N >= 2;
  for (const auto& cond : plan.conditions) plan.feasible &= cond.ok;
  return plan;
}

double translate_metric(TargetMetric metric, double epsilon, double lambda) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("translate_metric: epsilon");
  if (!(lambda > 0.0)) throw std::invalid_argument("translate_metric: lambda");
  switch (metric) {
    case TargetMetric::kl: return epsilon;
    case TargetMetric::tv: return 2.0 * epsilon * epsilon;
    case TargetMetric::w2: return epsilon * epsilon / (2.0 * lambda);
  }
  throw std::invalid_argument("translate_metric: unknown metric");
}

double iterate_affine_recursion(double theta0, double a, double h,
                                std::int64_t k) {
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument("iterate_affine_recursion: a must be in (0,1)");
  }
  if (!(h >= 0.0)) throw std::invalid_argument("iterate_affine_recursion: h < 0");
  if (k < 0) throw std::invalid_argument("iterate_affine_recursion: k < 0");
  return std::exp(-a * static_cast<double>(k)) * theta0 + h / a;
}

std::string plan_json(const LmcPlan& plan) {
  const auto num = [](double v) {
    char buf[48];
    if (std::isinf(v)) {
      std::snprintf(buf, sizeof(buf), v > 0 ? "1e308" : "-1e308");
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
    }
    return std::string(buf);
  };
  std::string out = "{\n";
  out += "  \"eta\": " + num(plan.eta) + ",\n";
  out += "  \"N\": " + std::to_string(plan.N) + ",\n";
  out += "  \"total_iterations\": " + std::to_string(plan.total_iterations) + ",\n";
  out += "  \"beta\": " + num(plan.beta) + ",\n";
  out += "  \"C_sigma\": " + num(plan.c_sigma) + ",\n";
  out += std::string("  \"metric\": \"") +
         (plan.metric == PlanMetric::chi2 ? "chi2" : "renyi") + "\",\n";
  if (plan.metric == PlanMetric::renyi) {
    out += "  \"alpha\": " + num(plan.alpha) + ",\n";
  }
  out += std::string("  \"feasible\": ") + (plan.feasible ? "true" : "false") +
         ",\n";
  out += "  \"conditions\": [\n";
  for (std::size_t i = 0; i < plan.conditions.size(); ++i) {
    const auto& c = plan.conditions[i];
    out += "    {\"name\": \"" + c.name + "\", \"lhs\": " + num(c.lhs) +
           ", \"rhs\": " + num(c.rhs) + ", \"ok\": " +
           (c.ok ? "true" : "false") + "}";
    out += (i + 1 < plan.conditions.size()) ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"note\": \"" + plan.note + "\"\n";
  out += "}\n";
  return out;
}

}  // namespace langevin
