#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

namespace langevin {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Provenance { analytic, numeric_estimate };

// Constants certifying smoothness / strong dissipativity of a potential,
// plus an LSI constant bound and a minimizer.  Fields may be unset (NaN /
// empty) when nothing is known yet; each carries its own provenance.
struct Certificate {
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  double L = kUnset;       // gradient Lipschitz constant
  double m = kUnset;       // dissipativity curvature
  double b = kUnset;       // dissipativity offset
  double lambda = kUnset;  // LSI constant upper bound
  std::optional<Vec> minimizer;

  Provenance src_L = Provenance::analytic;
  Provenance src_m = Provenance::analytic;
  Provenance src_b = Provenance::analytic;
  Provenance src_lambda = Provenance::analytic;
  Provenance src_minimizer = Provenance::analytic;

  bool has_L() const { return std::isfinite(L); }
  bool has_m() const { return std::isfinite(m); }
  bool has_b() const { return std::isfinite(b); }
  bool has_lambda() const { return std::isfinite(lambda); }
  double kappa() const { return L / m; }
  double minimizer_norm2() const {
    return minimizer ? minimizer->squaredNorm() : 0.0;
  }
};

// A d-dimensional potential f with hand-coded gradient.  Immutable after
// construction; evaluation is pure, so instances are freely shared across
// threads.
struct Potential {
  int dim = 0;
  std::string label;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::optional<Certificate> known;
};

// Evaluates (f(x), grad f(x)), validating dimension and finiteness of x.
std::pair<double, Vec> eval(const Potential& p, const Vec& x);

enum class PotentialKind {
  gaussian,
  cosine_canonical,
  gaussian_mixture,
  bayes_logistic,
  student_t_ridge,
  corrupted_regression,
};

struct Dataset {
  Mat features;  // n x d
  Vec labels;    // n
};

// CSV with a header row "feature_1,...,feature_d,label".
Dataset load_dataset_csv(const std::string& path);

struct PotentialParams {
  int d = 1;
  double alpha = 0.0;
  double beta = 0.0;
  Vec a;                      // gaussian_mixture mode separation
  std::optional<Dataset> data;  // bayes_logistic / corrupted_regression
};

Potential build_library_potential(PotentialKind kind,
                                  const PotentialParams& params);

Potential gaussian_potential(int d);
Potential cosine_canonical_potential(int d);
Potential gaussian_mixture_potential(const Vec& a);
Potential bayes_logistic_potential(const Dataset& data, double alpha);
Potential student_t_ridge_potential(double alpha, int d);
Potential corrupted_regression_potential(double alpha, double beta, int d);
Potential corrupted_regression_potential(const Dataset& data, double alpha,
                                         double beta);

PotentialKind potential_kind_from_string(const std::string& s);
std::string to_string(PotentialKind kind);

// f = f_sc + f_p with f_sc strongly convex and the bump f_p bounded (value,
// gradient and Hessian) by bound_B.
struct PerturbationSpec {
  Potential base;   // needs analytic m and L
  Potential bump;
  double bound_B = 0.0;
};

// Bounded-perturbation constants: m = m0/2, b = 2B^2/m, L = L0 + B, and the
// Holley-Stroock LSI factor lambda = exp(2B)/m0.
Certificate derive_perturbation_constants(const PerturbationSpec& spec);

// Spot-checks bound_B >= sup(|f_p|, |grad f_p|) sampled over a probe box.
bool check_perturbation_bound(const PerturbationSpec& spec,
                              double box_radius = 10.0, long n_samples = 1000,
                              std::uint64_t seed = 0);

}  // namespace langevin
