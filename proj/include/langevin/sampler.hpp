#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "langevin/potential.hpp"

namespace langevin {

struct GaussianInit {
  double sigma2 = 1.0;
};
struct PointInit {
  Vec x0;
};
using InitDist = std::variant<GaussianInit, PointInit>;

struct ChainConfig {
  Potential potential;
  double eta = 0.0;
  long n_steps = 0;
  std::uint64_t seed = 0;
  InitDist init = GaussianInit{1.0};
};

struct Trajectory {
  std::vector<Vec> states;               // x_0 .. x_N (interval ends)
  std::vector<double> interval_max_jump; // per-interval max displacement,
                                         // filled by run_interpolation
  std::uint64_t seed = 0;
};

// Thrown when a chain leaves the divergence guard (|x| > 1e8 or non-finite).
struct ChainDivergence : std::runtime_error {
  long step;
  explicit ChainDivergence(long step_)
      : std::runtime_error("chain diverged at step " + std::to_string(step_)),
        step(step_) {}
};

// One LMC update: x - eta grad f(x) + sqrt(2 eta) noise.
Vec lmc_step(const Potential& p, const Vec& x, double eta, const Vec& noise);

Trajectory run_chain(const ChainConfig& cfg, std::uint64_t chain_index = 0);

// Interpolation process: within each interval the drift is frozen at the
// last iterate and advanced in `substeps` Euler sub-steps with independent
// Brownian increments.  Interval ends coincide with the LMC chain driven by
// the aggregated increments.
Trajectory run_interpolation(const ChainConfig& cfg, int substeps,
                             std::uint64_t chain_index = 0);

// Two synchronously coupled fine-Euler diffusions; returns (t, |z_t - z'_t|).
std::vector<std::pair<double, double>> couple_diffusions(
    const Potential& p, const Vec& x0, const Vec& y0, double eta_fine,
    double t_end, std::uint64_t seed);

struct JumpCheckConfig {
  double delta = 0.01;
  double kappa = 1.0;
  double b = 0.0;
  int d = 1;
  long n_steps = 0;  // N
  double eta = 0.0;
  // full:    (2 kappa + 1)(1 + sqrt b + sqrt d + 2 sqrt(log(2(N+1)/delta)))
  //          * sqrt(2 eta)
  // compact: c kappa (sqrt b + sqrt d + sqrt(log(N/delta))) sqrt(eta)
  enum class Form { full, compact } form = Form::full;
  double compact_c = 3.0;
};

double jump_threshold(const JumpCheckConfig& cfg);

struct JumpCheckResult {
  double threshold_r = 0.0;
  double max_observed = 0.0;
  bool violated = false;
};

JumpCheckResult monitor_jumps(const Trajectory& traj,
                              const JumpCheckConfig& cfg);

struct EnsembleDivergence : std::runtime_error {
  std::vector<long> failed_chains;
  explicit EnsembleDivergence(std::vector<long> failed)
      : std::runtime_error("ensemble: " + std::to_string(failed.size()) +
                           " chain(s) diverged"),
        failed_chains(std::move(failed)) {}
};

enum class EnsembleRecord {
  final_states,  // one row per chain
  full,          // n_steps + 1 rows per chain, grouped by chain index
};

// n_chains independent chains; per-chain noise streams are derived from the
// master seed by chain index, so the result matrix is identical for every
// worker count.  n_workers <= 0 uses the hardware concurrency.
Mat run_ensemble(const ChainConfig& cfg, long n_chains, int n_workers = 0,
                 EnsembleRecord record = EnsembleRecord::final_states);

struct TailCheckRow {
  double x = 0.0;
  double empirical = 0.0;
  double bound = 0.0;
  double se = 0.0;
  bool ok = false;
};

struct TailCheckReport {
  std::vector<TailCheckRow> normal_rows;    // P(|W| >= sqrt d + x) <= e^{-x^2/2}
  std::vector<TailCheckRow> brownian_rows;  // P(sup |B_s| >= sqrt t (sqrt d + x))
                                            //   <= 2 e^{-x^2/4}
  bool all_ok() const;
};

// Monte Carlo check of the normal-tail and sup-Brownian bounds at
// x in {0.5, 1, 2}; ok means empirical <= bound + 3 SE.
TailCheckReport empirical_tail_checks(long n_draws, int d, std::uint64_t seed);

}  // namespace langevin
