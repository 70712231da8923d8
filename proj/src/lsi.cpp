#include "langevin/lsi.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "langevin/numeric.hpp"
#include "langevin/rng.hpp"

namespace langevin {

std::string to_string(LsiMethod m) {
  switch (m) {
    case LsiMethod::bakry_emery: return "bakry_emery";
    case LsiMethod::holley_stroock: return "holley_stroock";
    case LsiMethod::outside_ball: return "outside_ball";
    case LsiMethod::nonuniform: return "nonuniform";
    case LsiMethod::lyapunov: return "lyapunov";
  }
  return "?";
}

std::string lsi_bound_json(const LsiBound& b) {
  std::string inputs = "{";
  char buf[96];
  for (std::size_t i = 0; i < b.inputs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s\"%s\": %.17g", i == 0 ? "" : ", ",
                  b.inputs[i].first.c_str(), b.inputs[i].second);
    inputs += buf;
  }
  inputs += "}";
  std::snprintf(buf, sizeof(buf), "{\"lambda\": %.17g, \"method\": \"%s\", ",
                b.lambda_bound, to_string(b.method).c_str());
  return std::string(buf) + "\"inputs\": " + inputs + "}";
}

LsiBound bakry_emery(double m) {
  if (!(m > 0.0)) throw std::invalid_argument("bakry_emery: m must be > 0");
  return {1.0 / m, LsiMethod::bakry_emery, {{"m", m}}};
}

LsiBound holley_stroock(double m0, double B) {
  if (!(m0 > 0.0)) throw std::invalid_argument("holley_stroock: m0 must be > 0");
  if (!(B >= 0.0)) throw std::invalid_argument("holley_stroock: B must be >= 0");
  return {std::exp(2.0 * B) / m0,
          LsiMethod::holley_stroock,
          {{"m0", m0}, {"B", B}}};
}

LsiBound outside_ball(double m0, double k, double r) {
  if (!(m0 > 0.0)) throw std::invalid_argument("outside_ball: m0 must be > 0");
  if (!(k >= 0.0)) throw std::invalid_argument("outside_ball: k must be >= 0");
  if (!(r >= 0.0)) throw std::invalid_argument("outside_ball: r must be >= 0");
  return {std::exp((k + m0) * r * r) / m0,
          LsiMethod::outside_ball,
          {{"m0", m0}, {"k", k}, {"r", r}}};
}

LsiBound nonuniform_bound(const CurvatureProfile& profile, double quad_tol) {
  if (!(quad_tol > 0.0)) throw std::invalid_argument("nonuniform_bound: quad_tol");
  const auto& m0 = profile.m0_of_r;
  const auto mass = [&](double a) {
    return numeric::adaptive_simpson(m0, 0.0, a, quad_tol * 1e-2);
  };
  // g(a) = int_0^a m0 - 2/a is negative near 0 and both terms grow with a,
  // so the crossing is unique; double a_max until the sign flips, then
  // bisect.
  const auto g = [&](double a) { return mass(a) - 2.0 / a; };
  double a_max = 1.0;
  int doublings = 0;
  while (g(a_max) < 0.0) {
    a_max *= 2.0;
    if (++doublings > 40) {
      throw std::runtime_error(
          "nonuniform_bound: no bracket for a0 below 2^40");
    }
  }
  double a0 = numeric::bisect(g, 1e-6, a_max, 1e-13 * a_max);
  if (std::abs(mass(a0) - 2.0 / a0) > quad_tol) {
    throw std::runtime_error("nonuniform_bound: quadrature non-convergence");
  }
  const double rm0_int = numeric::adaptive_simpson(
      [&](double r) { return r * m0(r); }, 0.0, a0, quad_tol * 1e-2);
  return {0.5 * a0 * a0 * std::exp(rm0_int - 1.0),
          LsiMethod::nonuniform,
          {{"a0", a0}}};
}

LsiBound lyapunov_poincare(const Potential& p, const Certificate& cert,
                           double c, long osc_samples, std::uint64_t seed) {
  if (!cert.has_m() || !cert.has_b() || !cert.minimizer) {
    throw std::invalid_argument("lyapunov_poincare: certificate needs m, b, x*");
  }
  if (!(c > 0.0) && c != 0.0) {
    throw std::invalid_argument("lyapunov_poincare: c must be >= 0");
  }
  const double m = cert.m;
  const double b = cert.b;
  const int d = p.dim;
  const double R = std::sqrt((2.0 / m) * (d + b + 1.0));
  const Vec center = *cert.minimizer;

  double fmin = p.value(center);
  double fmax = fmin;
  const auto probe = [&](const Vec& x) {
    const double v = p.value(x);
    if (!std::isfinite(v)) {
      throw std::runtime_error("lyapunov_poincare: non-finite f inside ball");
    }
    fmin = std::min(fmin, v);
    fmax = std::max(fmax, v);
  };

  if (d == 1) {
    const long n = std::max<long>(osc_samples, 2);
    for (long i = 0; i < n; ++i) {
      Vec x(1);
      x[0] = center[0] - R + 2.0 * R * static_cast<double>(i) / (n - 1);
      probe(x);
    }
  } else if (d == 2) {
    const long side = std::max<long>(static_cast<long>(std::sqrt(
                                        static_cast<double>(osc_samples))), 2);
    for (long i = 0; i < side; ++i) {
      for (long j = 0; j < side; ++j) {
        Vec x(2);
        x[0] = center[0] - R + 2.0 * R * static_cast<double>(i) / (side - 1);
        x[1] = center[1] - R + 2.0 * R * static_cast<double>(j) / (side - 1);
        if ((x - center).norm() <= R) probe(x);
      }
    }
  } else {
    // Random directions probed at an interior point and on the sphere; exact
    // oscillation is a global optimization problem, so this stays a numeric
    // estimate.
    rng::NoiseStream stream(seed, 5);
    for (long i = 0; i < osc_samples; ++i) {
      Vec dir(d);
      for (int k = 0; k < d; ++k) {
        dir[k] = stream.normal(rng::NoiseStream::kAux, i, k);
      }
      dir /= dir.norm();
      const double t =
          R * std::cbrt(stream.uniform(rng::NoiseStream::kAux, i, 1u << 20));
      probe(center + t * dir);
      probe(center + R * dir);
    }
  }
  const double osc = fmax - fmin;
  const double bound =
      (2.0 / m) * (1.0 + c * (m / 2.0) * (d + b) * std::exp(osc));
  if (!std::isfinite(bound)) {
    throw std::runtime_error(
        "lyapunov_poincare: bound overflows (oscillation " +
        std::to_string(osc) + "); recipe yields no finite bound here");
  }
  return {bound,
          LsiMethod::lyapunov,
          {{"R", R}, {"osc", osc}, {"c", c}, {"m", m}, {"b", b}}};
}

CurvatureProfile corrupted_regression_profile(double alpha, double beta) {
  if (!(alpha > 0.0 && beta > 0.0)) {
    throw std::invalid_argument("corrupted_regression_profile: alpha, beta > 0");
  }
  return {[alpha, beta](double r) {
    const double e = std::exp(r * r);
    const double denom = beta * e + 1.0;
    if (!std::isfinite(e) || !std::isfinite(denom)) return alpha;
    return alpha - (beta * e * (2.0 * r * r - 1.0) - 1.0) / (denom * denom);
  }};
}

}  // namespace langevin
