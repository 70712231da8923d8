#include "langevin/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "langevin/rng.hpp"

namespace langevin {

namespace {

using rng::NoiseStream;

Vec sample_point(const NoiseStream& stream, std::uint64_t counter, int d,
                 double box_radius) {
  // Mixture of uniform-in-box and Gaussian-around-origin draws, so both tail
  // behavior and local curvature near the mode get probed.
  Vec x(d);
  const bool use_gaussian =
      stream.uniform(NoiseStream::kAux, counter, 1u << 20) < 0.5;
  for (int c = 0; c < d; ++c) {
    if (use_gaussian) {
      x[c] = stream.normal(NoiseStream::kAux, counter, c) *
             (box_radius / 4.0);
    } else {
      x[c] = box_radius *
             (2.0 * stream.uniform(NoiseStream::kAux, counter, c) - 1.0);
    }
  }
  return x;
}

// Pair sampler: every third pair is antithetic near-coincident (distance
// 1e-4), the rest are independent draws.
std::pair<Vec, Vec> sample_pair(const NoiseStream& stream,
                                std::uint64_t counter, int d,
                                double box_radius) {
  const Vec x = sample_point(stream, 2 * counter, d, box_radius);
  if (counter % 3 == 2) {
    Vec dir(d);
    for (int c = 0; c < d; ++c) {
      dir[c] = stream.normal(NoiseStream::kAux, 2 * counter + 1, c);
    }
    const double n = dir.norm();
    if (n > 0.0) dir /= n;
    return {x, x + 1e-4 * dir};
  }
  return {x, sample_point(stream, 2 * counter + 1, d, box_radius)};
}

}  // namespace

std::string check_report_json(const CheckReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "{\"samples\": %ld, \"violations\": %ld, \"worst_margin\": "
                "%.17g, \"passed\": %s}",
                r.samples, r.violations, r.worst_margin,
                r.passed ? "true" : "false");
  return buf;
}

CheckReport check_gradient_fd(const Potential& p, long n_samples, double tol,
                              double box_radius, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("check_gradient_fd: n_samples");
  if (!(tol > 0.0)) throw std::invalid_argument("check_gradient_fd: tol");
  NoiseStream stream(seed, 1);
  CheckReport rep;
  rep.samples = n_samples;
  double worst = 0.0;
  for (long i = 0; i < n_samples; ++i) {
    Vec x(p.dim);
    for (int c = 0; c < p.dim; ++c) {
      x[c] = box_radius *
             (2.0 * stream.uniform(NoiseStream::kAux, i, c) - 1.0);
    }
    const Vec g = p.gradient(x);
    const double h = 1e-5 * (1.0 + x.norm());
    Vec fd(p.dim);
    for (int c = 0; c < p.dim; ++c) {
      Vec xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      fd[c] = (p.value(xp) - p.value(xm)) / (2.0 * h);
    }
    if (!fd.allFinite() || !g.allFinite()) {
      throw std::runtime_error("check_gradient_fd: non-finite evaluation");
    }
    const double rel = (fd - g).norm() / std::max(1.0, g.norm());
    worst = std::max(worst, rel);
    if (rel >= tol) ++rep.violations;
  }
  rep.worst_margin = worst;
  rep.passed = rep.violations == 0;
  return rep;
}

CheckReport check_dissipativity(const Potential& p, double m, double b,
                                long n_pairs, double box_radius,
                                std::uint64_t seed) {
  if (!(m > 0.0)) throw std::invalid_argument("check_dissipativity: m <= 0");
  if (!(b >= 0.0)) throw std::invalid_argument("check_dissipativity: b < 0");
  if (n_pairs < 1) throw std::invalid_argument("check_dissipativity: n_pairs");
  NoiseStream stream(seed, 2);
  CheckReport rep;
  rep.samples = n_pairs;
  double worst = std::numeric_limits<double>::infinity();
  for (long i = 0; i < n_pairs; ++i) {
    const auto [x, y] = sample_pair(stream, i, p.dim, box_radius);
    const Vec dx = x - y;
    const Vec dg = p.gradient(x) - p.gradient(y);
    const double lhs = dx.dot(dg);
    const double rhs = m * dx.squaredNorm() - b;
    const double slack = lhs - rhs;
    worst = std::min(worst, slack);
    if (slack < -1e-12) ++rep.violations;
  }
  rep.worst_margin = worst;
  rep.passed = rep.violations == 0;
  return rep;
}

double estimate_lipschitz(const Potential& p, long n_pairs, double box_radius,
                          std::uint64_t seed) {
  if (n_pairs < 1) throw std::invalid_argument("estimate_lipschitz: n_pairs");
  NoiseStream stream(seed, 3);
  double sup = 0.0;
  for (long i = 0; i < n_pairs; ++i) {
    const auto [x, y] = sample_pair(stream, i, p.dim, box_radius);
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    const double ratio = (p.gradient(x) - p.gradient(y)).norm() / dist;
    sup = std::max(sup, ratio);
  }
  return sup;
}

Vec find_minimizer(const Potential& p, const Vec& x0, double tol,
                   long max_iters) {
  if (!(tol > 0.0)) throw std::invalid_argument("find_minimizer: tol");
  const double init_step =
      (p.known && p.known->has_L()) ? 1.0 / p.known->L : 1.0;
  Vec x = x0;
  double fx = p.value(x);
  for (long it = 0; it < max_iters; ++it) {
    Vec g = p.gradient(x);
    double gn = g.norm();
    if (gn <= tol) {
      // A vanishing gradient can also be a local max / saddle (the cosine
      // potential has one at the origin); probe nearby points and keep
      // descending only on a decrease well above rounding noise.
      const double drop = 1e-10 * (1.0 + std::abs(fx));
      bool escaped = false;
      for (double radius : {1e-3, 1e-1}) {
        for (int c = 0; c < p.dim && !escaped; ++c) {
          for (double sign : {1.0, -1.0}) {
            Vec probe = x;
            probe[c] += sign * radius * (1.0 + x.norm());
            if (p.value(probe) < fx - drop) {
              x = probe;
              fx = p.value(x);
              escaped = true;
              break;
            }
          }
        }
        if (escaped) break;
      }
      if (!escaped) return x;
      g = p.gradient(x);
      gn = g.norm();
    }
    // Armijo backtracking line search.  Once the sufficient-decrease target
    // drops below the rounding noise of f, the comparison is meaningless;
    // the plain gradient step is accepted (it still contracts the gradient).
    double step = init_step;
    const double g2 = gn * gn;
    const double noise =
        8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
    Vec cand = x - step * g;
    double fc = p.value(cand);
    int halvings = 0;
    while ((!std::isfinite(fc) ||
            (fc > fx - 1e-4 * step * g2 && 1e-4 * step * g2 > noise)) &&
           halvings < 60) {
      step *= 0.5;
      cand = x - step * g;
      fc = p.value(cand);
      ++halvings;
    }
    if (halvings >= 60) {
      throw std::runtime_error("find_minimizer: line search failed at " +
                               p.label);
    }
    x = cand;
    fx = fc;
  }
  if (p.gradient(x).norm() <= tol) return x;
  throw std::runtime_error("find_minimizer: no convergence after " +
                           std::to_string(max_iters) + " iterations");
}

Certificate certify(const Potential& p, const CertifyOptions& opts) {
  Certificate cert = p.known.value_or(Certificate{});
  // Analytic constants always win; only fill the gaps numerically.
  if (!cert.has_L()) {
    cert.L = estimate_lipschitz(p, opts.n_pairs, opts.box_radius, opts.seed);
    cert.src_L = Provenance::numeric_estimate;
  }
  if (!cert.minimizer) {
    cert.minimizer = find_minimizer(p, Vec::Constant(p.dim, 1.0));
    cert.src_minimizer = Provenance::numeric_estimate;
  }
  if (!cert.has_m() || !cert.has_b()) {
    // Slope of <dx,dg> against |dx|^2 for well-separated pairs gives a
    // curvature guess; the offset is then the smallest b making every
    // sampled pair satisfy the inequality, padded by 10%.
    NoiseStream stream(opts.seed, 4);
    std::vector<std::pair<double, double>> obs;  // (|dx|^2, <dx,dg>)
    obs.reserve(opts.n_pairs);
    for (long i = 0; i < opts.n_pairs; ++i) {
      const auto [x, y] = sample_pair(stream, i, p.dim, opts.box_radius);
      const Vec dx = x - y;
      obs.emplace_back(dx.squaredNorm(), dx.dot(p.gradient(x) - p.gradient(y)));
    }
    std::sort(obs.begin(), obs.end());
    double slope = std::numeric_limits<double>::infinity();
    const std::size_t tail_start = obs.size() - obs.size() / 10 - 1;
    for (std::size_t i = tail_start; i < obs.size(); ++i) {
      if (obs[i].first > 0.0) slope = std::min(slope, obs[i].second / obs[i].first);
    }
    if (!std::isfinite(slope) || slope <= 0.0) {
      throw std::runtime_error("certify: could not estimate dissipativity for " +
                               p.label);
    }
    const double m = 0.9 * slope;
    double b = 0.0;
    for (const auto& [d2, ip] : obs) b = std::max(b, m * d2 - ip);
    cert.m = m;
    cert.b = 1.1 * b;
    cert.src_m = Provenance::numeric_estimate;
    cert.src_b = Provenance::numeric_estimate;
  }
  return cert;
}

}  // namespace langevin
