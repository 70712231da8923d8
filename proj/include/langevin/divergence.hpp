#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <string>

namespace langevin {

// Uniform-grid density carrier for 1-d / 2-d numerical divergence work.
struct DensityGrid {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> res{2, 1};  // grid points per axis; res[1] == 1 in 1-d
  Eigen::ArrayXd values;         // row-major: index i0 * res[1] + i1
  bool normalized = false;
  long sample_count = 0;         // > 0 when built from samples
  double clipped_fraction = 0.0;

  double spacing(int axis) const {
    return (hi[axis] - lo[axis]) / (res[axis] - 1);
  }
  double coord(int axis, int i) const { return lo[axis] + i * spacing(axis); }
};

DensityGrid grid_from_function_1d(const std::function<double(double)>& density,
                                  double lo, double hi, int n);
DensityGrid grid_from_function_2d(
    const std::function<double(double, double)>& density, double lo0,
    double hi0, double lo1, double hi1, int n0, int n1);

// Trapezoid-rule mass.
double grid_mass(const DensityGrid& g);

// Rescales to unit trapezoid mass.
DensityGrid normalize(DensityGrid g);

enum class Metric { chi2, kl, renyi, tv, w2 };
std::string to_string(Metric m);

enum class EstimateMethod { closed_form, quadrature, empirical };
std::string to_string(EstimateMethod m);

struct DivergenceReport {
  Metric metric = Metric::chi2;
  double alpha = 0.0;  // Renyi order when metric == renyi
  double value = 0.0;
  EstimateMethod method = EstimateMethod::quadrature;
  double error_estimate = 0.0;
};

// CSV row: metric, alpha, value, method, error_estimate.
std::string divergence_report_csv_row(const DivergenceReport& r);

// Trapezoid-rule evaluation of the defining integral; the error estimate is a
// Richardson comparison against the half-resolution grid.
DivergenceReport quadrature_divergence(const DensityGrid& rho,
                                       const DensityGrid& nu, Metric metric,
                                       double alpha = 0.0);

// F_alpha(rho || nu) = E_nu[(rho/nu)^alpha]; satisfies
// (alpha - 1) R_alpha = log F_alpha.
double f_alpha_moment(const DensityGrid& rho, const DensityGrid& nu,
                      double alpha);

// Normalized histogram with bin-center registration (d <= 2).
DensityGrid histogram_density(const Eigen::MatrixXd& samples,
                              std::array<double, 2> lo, std::array<double, 2> hi,
                              std::array<int, 2> resolution);

// W2 via the 1-d quantile formula: int_0^1 (F_rho^-1 - F_nu^-1)^2 du.
DivergenceReport w2_1d(const DensityGrid& rho, const DensityGrid& nu,
                       long quantile_points);

struct MetricChainReport {
  double tv = 0.0, kl = 0.0, chi2 = 0.0, w2sq = 0.0;
  bool tv_le_sqrt_half_kl = false;
  bool sqrt_kl_le_sqrt_chi2 = false;
  bool w2sq_le_2lambda_chi2 = false;
  bool all_ok() const {
    return tv_le_sqrt_half_kl && sqrt_kl_le_sqrt_chi2 && w2sq_le_2lambda_chi2;
  }
};

// Verifies TV <= sqrt(KL/2) <= sqrt(chi2/2) and W2^2/(2 lambda) <= chi2,
// all by quadrature, with 1e-9 slack.
MetricChainReport check_metric_chain(const DensityGrid& rho,
                                     const DensityGrid& nu, double lambda);

// Plug-in chi^2 of a histogram against a reference grid with the multinomial
// bias removed: raw quadrature value minus (1/n) sum_b p_b (1 - p_b) / q_b.
// Values in [-1e-12, 0) are clamped to zero.
DivergenceReport empirical_chi2(const DensityGrid& hist, const DensityGrid& nu);

// Bootstrap standard error (over n_resamples histogram rebuilds) of the
// bias-corrected empirical chi^2. samples must be the 1-d sample column.
double bootstrap_chi2_se(const Eigen::MatrixXd& samples,
                         const DensityGrid& hist_template,
                         const DensityGrid& nu, int n_resamples,
                         std::uint64_t seed);

}  // namespace langevin
