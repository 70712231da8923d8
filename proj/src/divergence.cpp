#include "langevin/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "langevin/rng.hpp"

namespace langevin {

namespace {

constexpr double kSupportFloor = 1e-300;

void require_compatible(const DensityGrid& a, const DensityGrid& b) {
  const auto close = [](double x, double y) {
    return std::abs(x - y) <= 1e-12 * (1.0 + std::abs(x) + std::abs(y));
  };
  if (a.dim != b.dim || a.res != b.res || !close(a.lo[0], b.lo[0]) ||
      !close(a.hi[0], b.hi[0]) || !close(a.lo[1], b.lo[1]) ||
      !close(a.hi[1], b.hi[1])) {
    throw std::invalid_argument("density grids do not match");
  }
}

// Trapezoid weight of grid node (i0, i1), including the spacing factor.
double node_weight(const DensityGrid& g, int i0, int i1) {
  double w = g.spacing(0) * ((i0 == 0 || i0 == g.res[0] - 1) ? 0.5 : 1.0);
  if (g.dim == 2) {
    w *= g.spacing(1) * ((i1 == 0 || i1 == g.res[1] - 1) ? 0.5 : 1.0);
  }
  return w;
}

// Trapezoid sum of fn(rho_i, nu_i) over all nodes, optionally striding by 2
// to form the half-resolution Richardson companion.
template <typename F>
double integrate_pair(const DensityGrid& rho, const DensityGrid& nu, F fn,
                      int stride = 1) {
  double acc = 0.0;
  const int n0 = rho.res[0];
  const int n1 = rho.res[1];
  for (int i0 = 0; i0 < n0; i0 += stride) {
    const bool edge0 = (i0 == 0 || i0 + stride >= n0);
    for (int i1 = 0; i1 < n1; i1 += (rho.dim == 2 ? stride : 1)) {
      double w = rho.spacing(0) * stride * (edge0 ? 0.5 : 1.0);
      if (rho.dim == 2) {
        const int s1 = rho.dim == 2 ? stride : 1;
        const bool edge1 = (i1 == 0 || i1 + s1 >= n1);
        w *= rho.spacing(1) * s1 * (edge1 ? 0.5 : 1.0);
      }
      const long idx = static_cast<long>(i0) * n1 + i1;
      acc += w * fn(rho.values[idx], nu.values[idx]);
    }
  }
  return acc;
}

double metric_integral(const DensityGrid& rho, const DensityGrid& nu,
                       Metric metric, double alpha, int stride) {
  switch (metric) {
    case Metric::chi2:
      return integrate_pair(rho, nu,
                            [](double r, double q) {
                              if (q < kSupportFloor) {
                                if (r > 0.0) {
                                  throw std::domain_error(
                                      "support violation: rho > 0 where nu = 0");
                                }
                                return 0.0;
                              }
                              const double d = r - q;
                              return d * d / q;
                            },
                            stride);
    case Metric::kl:
      return integrate_pair(rho, nu,
                            [](double r, double q) {
                              if (r <= 0.0) return 0.0;
                              if (q < kSupportFloor) {
                                throw std::domain_error(
                                    "support violation: rho > 0 where nu = 0");
                              }
                              return r * std::log(r / q);
                            },
                            stride);
    case Metric::renyi: {
      const double f = integrate_pair(
          rho, nu,
          [alpha](double r, double q) {
            if (r <= 0.0) return 0.0;
            if (q < kSupportFloor) {
              throw std::domain_error(
                  "support violation: rho > 0 where nu = 0");
            }
            return std::pow(r / q, alpha) * q;
          },
          stride);
      return std::log(f) / (alpha - 1.0);
    }
    case Metric::tv:
      return integrate_pair(
          rho, nu, [](double r, double q) { return 0.5 * std::abs(r - q); },
          stride);
    case Metric::w2:
      throw std::invalid_argument("use w2_1d for the Wasserstein metric");
  }
  throw std::invalid_argument("unknown metric");
}

std::vector<double> cumulative_cdf(const DensityGrid& g) {
  const int n = g.res[0];
  std::vector<double> cdf(n, 0.0);
  const double h = g.spacing(0);
  for (int i = 1; i < n; ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * h * (g.values[i - 1] + g.values[i]);
  }
  const double total = cdf[n - 1];
  if (!(total > 0.0)) throw std::runtime_error("w2_1d: zero-mass grid");
  for (auto& v : cdf) v /= total;
  return cdf;
}

double quantile_from_cdf(const DensityGrid& g, const std::vector<double>& cdf,
                         double u) {
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.begin()) return g.coord(0, 0);
  if (it == cdf.end()) return g.coord(0, g.res[0] - 1);
  const long j = it - cdf.begin();
  const double c0 = cdf[j - 1];
  const double c1 = cdf[j];
  const double frac = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
  return g.coord(0, static_cast<int>(j - 1)) + frac * g.spacing(0);
}

// Bins samples over the edge box [lo, hi] and returns a normalized density
// registered at the bin centers.
DensityGrid histogram_from_column(const Eigen::MatrixXd& samples,
                                  const std::function<long(long)>& pick,
                                  long n_use, std::array<double, 2> lo,
                                  std::array<double, 2> hi,
                                  std::array<int, 2> res, int dim) {
  DensityGrid g;
  g.dim = dim;
  g.res = res;
  if (dim == 1) g.res[1] = 1;
  g.values = Eigen::ArrayXd::Zero(static_cast<long>(g.res[0]) * g.res[1]);
  const double w0 = (hi[0] - lo[0]) / res[0];
  const double w1 = dim == 2 ? (hi[1] - lo[1]) / res[1] : 1.0;
  g.lo = {lo[0] + 0.5 * w0, dim == 2 ? lo[1] + 0.5 * w1 : 0.0};
  g.hi = {hi[0] - 0.5 * w0, dim == 2 ? hi[1] - 0.5 * w1 : 1.0};
  long inside = 0;
  for (long s = 0; s < n_use; ++s) {
    const long row = pick(s);
    const double x0 = samples(row, 0);
    int i0 = static_cast<int>(std::floor((x0 - lo[0]) / w0));
    if (i0 < 0 || i0 >= res[0]) continue;
    long idx = i0;
    if (dim == 2) {
      const double x1 = samples(row, 1);
      int i1 = static_cast<int>(std::floor((x1 - lo[1]) / w1));
      if (i1 < 0 || i1 >= res[1]) continue;
      idx = static_cast<long>(i0) * res[1] + i1;
    }
    g.values[idx] += 1.0;
    ++inside;
  }
  if (inside == 0) {
    throw std::runtime_error("histogram_density: all samples outside range box");
  }
  g.values /= static_cast<double>(inside) * w0 * (dim == 2 ? w1 : 1.0);
  const long count = inside;
  const double clipped =
      1.0 - static_cast<double>(inside) / static_cast<double>(n_use);
  g = normalize(std::move(g));
  g.sample_count = count;
  g.clipped_fraction = clipped;
  return g;
}

}  // namespace

DensityGrid grid_from_function_1d(const std::function<double(double)>& density,
                                  double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) throw std::invalid_argument("grid_from_function_1d");
  DensityGrid g;
  g.dim = 1;
  g.lo = {lo, 0.0};
  g.hi = {hi, 1.0};
  g.res = {n, 1};
  g.values.resize(n);
  for (int i = 0; i < n; ++i) g.values[i] = density(g.coord(0, i));
  return g;
}

DensityGrid grid_from_function_2d(
    const std::function<double(double, double)>& density, double lo0,
    double hi0, double lo1, double hi1, int n0, int n1) {
  if (n0 < 2 || n1 < 2 || !(hi0 > lo0) || !(hi1 > lo1)) {
    throw std::invalid_argument("grid_from_function_2d");
  }
  DensityGrid g;
  g.dim = 2;
  g.lo = {lo0, lo1};
  g.hi = {hi0, hi1};
  g.res = {n0, n1};
  g.values.resize(static_cast<long>(n0) * n1);
  for (int i0 = 0; i0 < n0; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      g.values[static_cast<long>(i0) * n1 + i1] =
          density(g.coord(0, i0), g.coord(1, i1));
    }
  }
  return g;
}

double grid_mass(const DensityGrid& g) {
  double mass = 0.0;
  for (int i0 = 0; i0 < g.res[0]; ++i0) {
    for (int i1 = 0; i1 < g.res[1]; ++i1) {
      mass += node_weight(g, i0, i1) * g.values[static_cast<long>(i0) * g.res[1] + i1];
    }
  }
  return mass;
}

DensityGrid normalize(DensityGrid g) {
  if (!g.values.isFinite().all() || (g.values < 0.0).any()) {
    throw std::invalid_argument("normalize: values must be finite and >= 0");
  }
  const double mass = grid_mass(g);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::runtime_error("normalize: zero or non-finite mass");
  }
  g.values /= mass;
  g.normalized = true;
  return g;
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::chi2: return "chi2";
    case Metric::kl: return "kl";
    case Metric::renyi: return "renyi";
    case Metric::tv: return "tv";
    case Metric::w2: return "w2";
  }
  return "?";
}

std::string to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::closed_form: return "closed_form";
    case EstimateMethod::quadrature: return "quadrature";
    case EstimateMethod::empirical: return "empirical";
  }
  return "?";
}

std::string divergence_report_csv_row(const DivergenceReport& r) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%s,%.17g",
                to_string(r.metric).c_str(), r.alpha, r.value,
                to_string(r.method).c_str(), r.error_estimate);
  return buf;
}

DivergenceReport quadrature_divergence(const DensityGrid& rho,
                                       const DensityGrid& nu, Metric metric,
                                       double alpha) {
  require_compatible(rho, nu);
  if (metric == Metric::renyi && !(alpha > 1.0)) {
    throw std::invalid_argument("quadrature_divergence: Renyi needs alpha > 1");
  }
  DivergenceReport rep;
  rep.metric = metric;
  rep.alpha = metric == Metric::renyi ? alpha : 0.0;
  rep.method = EstimateMethod::quadrature;
  const double fine = metric_integral(rho, nu, metric, alpha, 1);
  const double coarse = metric_integral(rho, nu, metric, alpha, 2);
  rep.value = fine;
  if (rep.value < 0.0 && rep.value > -1e-12) rep.value = 0.0;
  rep.error_estimate = std::abs(fine - coarse);
  return rep;
}

double f_alpha_moment(const DensityGrid& rho, const DensityGrid& nu,
                      double alpha) {
  require_compatible(rho, nu);
  if (!(alpha >= 1.0)) throw std::invalid_argument("f_alpha_moment: alpha < 1");
  return integrate_pair(rho, nu, [alpha](double r, double q) {
    if (r <= 0.0) return 0.0;
    if (q < kSupportFloor) {
      throw std::domain_error("support violation: rho > 0 where nu = 0");
    }
    return std::pow(r / q, alpha) * q;
  });
}

DensityGrid histogram_density(const Eigen::MatrixXd& samples,
                              std::array<double, 2> lo, std::array<double, 2> hi,
                              std::array<int, 2> resolution) {
  const int dim = static_cast<int>(samples.cols());
  if (dim < 1 || dim > 2) {
    throw std::invalid_argument("histogram_density: sample dimension must be 1 or 2");
  }
  if (resolution[0] < 16 || (dim == 2 && resolution[1] < 16)) {
    throw std::invalid_argument("histogram_density: resolution >= 16 per axis");
  }
  return histogram_from_column(
      samples, [](long s) { return s; }, samples.rows(), lo, hi, resolution,
      dim);
}

DivergenceReport w2_1d(const DensityGrid& rho, const DensityGrid& nu,
                       long quantile_points) {
  if (rho.dim != 1 || nu.dim != 1) {
    throw std::invalid_argument("w2_1d: grids must be one-dimensional");
  }
  if (quantile_points < 2) throw std::invalid_argument("w2_1d: quantile_points");
  const auto cdf_rho = cumulative_cdf(rho);
  const auto cdf_nu = cumulative_cdf(nu);
  double acc = 0.0;
  for (long i = 0; i < quantile_points; ++i) {
    const double u = (i + 0.5) / static_cast<double>(quantile_points);
    const double d = quantile_from_cdf(rho, cdf_rho, u) -
                     quantile_from_cdf(nu, cdf_nu, u);
    acc += d * d;
  }
  DivergenceReport rep;
  rep.metric = Metric::w2;
  rep.method = EstimateMethod::quadrature;
  rep.value = std::sqrt(acc / static_cast<double>(quantile_points));
  rep.error_estimate = 0.0;
  // Midpoint-rule refinement gap as the error proxy.
  double acc_half = 0.0;
  for (long i = 0; i < quantile_points / 2; ++i) {
    const double u = (i + 0.5) / static_cast<double>(quantile_points / 2);
    const double d = quantile_from_cdf(rho, cdf_rho, u) -
                     quantile_from_cdf(nu, cdf_nu, u);
    acc_half += d * d;
  }
  rep.error_estimate = std::abs(
      rep.value - std::sqrt(acc_half / static_cast<double>(quantile_points / 2)));
  return rep;
}

MetricChainReport check_metric_chain(const DensityGrid& rho,
                                     const DensityGrid& nu, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("check_metric_chain: lambda");
  MetricChainReport rep;
  rep.tv = quadrature_divergence(rho, nu, Metric::tv).value;
  rep.kl = quadrature_divergence(rho, nu, Metric::kl).value;
  rep.chi2 = quadrature_divergence(rho, nu, Metric::chi2).value;
  const double w2 = w2_1d(rho, nu, 100000).value;
  rep.w2sq = w2 * w2;
  constexpr double slack = 1e-9;
  rep.tv_le_sqrt_half_kl = rep.tv <= std::sqrt(0.5 * rep.kl) + slack;
  rep.sqrt_kl_le_sqrt_chi2 =
      std::sqrt(0.5 * rep.kl) <= std::sqrt(0.5 * rep.chi2) + slack;
  rep.w2sq_le_2lambda_chi2 = rep.w2sq / (2.0 * lambda) <= rep.chi2 + slack;
  return rep;
}

DivergenceReport empirical_chi2(const DensityGrid& hist,
                                const DensityGrid& nu) {
  require_compatible(hist, nu);
  if (hist.sample_count <= 0) {
    throw std::invalid_argument("empirical_chi2: grid was not built from samples");
  }
  const double raw = metric_integral(hist, nu, Metric::chi2, 0.0, 1);
  // Multinomial plug-in bias: each bin contributes Var(p_hat)/q ~ p(1-p)/(nq).
  double correction = 0.0;
  const double n = static_cast<double>(hist.sample_count);
  for (int i0 = 0; i0 < hist.res[0]; ++i0) {
    for (int i1 = 0; i1 < hist.res[1]; ++i1) {
      const long idx = static_cast<long>(i0) * hist.res[1] + i1;
      const double w = node_weight(hist, i0, i1);
      const double p = hist.values[idx] * w;
      const double q = nu.values[idx] * w;
      if (q < kSupportFloor) continue;
      correction += p * (1.0 - p) / q;
    }
  }
  DivergenceReport rep;
  rep.metric = Metric::chi2;
  rep.method = EstimateMethod::empirical;
  rep.value = raw - correction / n;
  if (rep.value < 0.0) rep.value = 0.0;
  rep.error_estimate = 0.0;
  return rep;
}

double bootstrap_chi2_se(const Eigen::MatrixXd& samples,
                         const DensityGrid& hist_template,
                         const DensityGrid& nu, int n_resamples,
                         std::uint64_t seed) {
  if (n_resamples < 2) throw std::invalid_argument("bootstrap_chi2_se");
  const long n = samples.rows();
  // Recover the bin-edge box from the center-registered template.
  const double w0 = hist_template.spacing(0);
  std::array<double, 2> lo = {hist_template.lo[0] - 0.5 * w0, 0.0};
  std::array<double, 2> hi = {hist_template.hi[0] + 0.5 * w0, 1.0};
  std::vector<double> values;
  values.reserve(n_resamples);
  for (int r = 0; r < n_resamples; ++r) {
    rng::NoiseStream stream(seed, 1000 + static_cast<std::uint64_t>(r));
    const auto pick = [&](long s) {
      return static_cast<long>(
          stream.uniform(rng::NoiseStream::kAux, static_cast<std::uint64_t>(s),
                         0) *
          static_cast<double>(n));
    };
    DensityGrid g = histogram_from_column(samples, pick, n, lo, hi,
                                          hist_template.res, 1);
    const double raw = metric_integral(g, nu, Metric::chi2, 0.0, 1);
    double correction = 0.0;
    for (int i0 = 0; i0 < g.res[0]; ++i0) {
      const double w = node_weight(g, i0, 0);
      const double p = g.values[i0] * w;
      const double q = nu.values[i0] * w;
      if (q < kSupportFloor) continue;
      correction += p * (1.0 - p) / q;
    }
    values.push_back(raw - correction / static_cast<double>(g.sample_count));
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= (values.size() - 1);
  return std::sqrt(var);
}

}  // namespace langevin
