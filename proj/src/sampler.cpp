#include "langevin/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "langevin/rng.hpp"

namespace langevin {

namespace {

using rng::NoiseStream;

constexpr double kDivergenceGuard = 1e8;

Vec draw_init(const ChainConfig& cfg, const NoiseStream& stream) {
  const int d = cfg.potential.dim;
  if (const auto* g = std::get_if<GaussianInit>(&cfg.init)) {
    Vec x(d);
    const double s = std::sqrt(g->sigma2);
    for (int c = 0; c < d; ++c) {
      x[c] = s * stream.normal(NoiseStream::kInit, 0, c);
    }
    return x;
  }
  const auto& pt = std::get<PointInit>(cfg.init);
  if (pt.x0.size() != d) {
    throw std::invalid_argument("run_chain: init point dimension mismatch");
  }
  return pt.x0;
}

void guard(const Vec& x, long step) {
  if (!x.allFinite() || x.norm() > kDivergenceGuard) {
    throw ChainDivergence(step);
  }
}

}  // namespace

Vec lmc_step(const Potential& p, const Vec& x, double eta, const Vec& noise) {
  if (!(eta > 0.0)) throw std::invalid_argument("lmc_step: eta must be > 0");
  if (noise.size() != p.dim) {
    throw std::invalid_argument("lmc_step: noise dimension mismatch");
  }
  Vec next = x - eta * p.gradient(x) + std::sqrt(2.0 * eta) * noise;
  if (!next.allFinite()) throw ChainDivergence(-1);
  return next;
}

Trajectory run_chain(const ChainConfig& cfg, std::uint64_t chain_index) {
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("run_chain: eta must be > 0");
  if (cfg.n_steps < 0) throw std::invalid_argument("run_chain: n_steps < 0");
  if (const auto* g = std::get_if<GaussianInit>(&cfg.init)) {
    if (!(g->sigma2 > 0.0)) {
      throw std::invalid_argument("run_chain: init sigma2 must be > 0");
    }
  }
  const NoiseStream stream(cfg.seed, chain_index);
  const int d = cfg.potential.dim;
  Trajectory traj;
  traj.seed = cfg.seed;
  traj.states.reserve(cfg.n_steps + 1);

  Vec x = draw_init(cfg, stream);
  guard(x, 0);
  traj.states.push_back(x);
  const double scale = std::sqrt(2.0 * cfg.eta);
  Vec noise(d);
  for (long k = 0; k < cfg.n_steps; ++k) {
    const Vec g = cfg.potential.gradient(x);
    for (int c = 0; c < d; ++c) {
      noise[c] = stream.normal(NoiseStream::kStep, static_cast<std::uint64_t>(k), c);
    }
    x = x - cfg.eta * g + scale * noise;
    guard(x, k + 1);
    traj.states.push_back(x);
  }
  return traj;
}

Trajectory run_interpolation(const ChainConfig& cfg, int substeps,
                             std::uint64_t chain_index) {
  if (substeps < 1) throw std::invalid_argument("run_interpolation: substeps");
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("run_interpolation: eta");
  const NoiseStream stream(cfg.seed, chain_index);
  const int d = cfg.potential.dim;
  const double h = cfg.eta / substeps;
  const double scale = std::sqrt(2.0 * h);

  Trajectory traj;
  traj.seed = cfg.seed;
  traj.states.reserve(cfg.n_steps + 1);
  traj.interval_max_jump.reserve(cfg.n_steps);

  Vec x = draw_init(cfg, stream);
  guard(x, 0);
  traj.states.push_back(x);
  Vec sub(d);
  for (long k = 0; k < cfg.n_steps; ++k) {
    const Vec g = cfg.potential.gradient(x);  // frozen over the interval
    sub = x;
    double max_jump = 0.0;
    for (int j = 0; j < substeps; ++j) {
      const std::uint64_t counter =
          static_cast<std::uint64_t>(k) * substeps + j;
      for (int c = 0; c < d; ++c) {
        // Same association as the chain update x - eta g + scale w, so J = 1
        // reproduces run_chain bit for bit.
        sub[c] = sub[c] - h * g[c] +
                 scale * stream.normal(NoiseStream::kStep, counter, c);
      }
      max_jump = std::max(max_jump, (sub - x).norm());
    }
    x = sub;
    guard(x, k + 1);
    traj.states.push_back(x);
    traj.interval_max_jump.push_back(max_jump);
  }
  return traj;
}

std::vector<std::pair<double, double>> couple_diffusions(
    const Potential& p, const Vec& x0, const Vec& y0, double eta_fine,
    double t_end, std::uint64_t seed) {
  if (!(eta_fine > 0.0) || !(t_end > 0.0)) {
    throw std::invalid_argument("couple_diffusions: eta_fine, t_end must be > 0");
  }
  const NoiseStream stream(seed, 0);
  const int d = p.dim;
  const long n = static_cast<long>(std::ceil(t_end / eta_fine));
  const double scale = std::sqrt(2.0 * eta_fine);
  Vec z = x0, zp = y0, noise(d);
  std::vector<std::pair<double, double>> path;
  path.reserve(n + 1);
  path.emplace_back(0.0, (z - zp).norm());
  for (long k = 0; k < n; ++k) {
    for (int c = 0; c < d; ++c) {
      noise[c] = stream.normal(NoiseStream::kStep, static_cast<std::uint64_t>(k), c);
    }
    z = z - eta_fine * p.gradient(z) + scale * noise;
    zp = zp - eta_fine * p.gradient(zp) + scale * noise;
    guard(z, k + 1);
    guard(zp, k + 1);
    path.emplace_back((k + 1) * eta_fine, (z - zp).norm());
  }
  return path;
}

double jump_threshold(const JumpCheckConfig& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw std::invalid_argument("jump_threshold: delta must be in (0,1)");
  }
  const double logterm =
      std::log(2.0 * static_cast<double>(cfg.n_steps + 1) / cfg.delta);
  if (cfg.form == JumpCheckConfig::Form::full) {
    return (2.0 * cfg.kappa + 1.0) *
           (1.0 + std::sqrt(cfg.b) + std::sqrt(static_cast<double>(cfg.d)) +
            2.0 * std::sqrt(logterm)) *
           std::sqrt(2.0 * cfg.eta);
  }
  return cfg.compact_c * cfg.kappa *
         (std::sqrt(cfg.b) + std::sqrt(static_cast<double>(cfg.d)) +
          std::sqrt(std::log(static_cast<double>(cfg.n_steps) / cfg.delta))) *
         std::sqrt(cfg.eta);
}

JumpCheckResult monitor_jumps(const Trajectory& traj,
                              const JumpCheckConfig& cfg) {
  JumpCheckResult res;
  res.threshold_r = jump_threshold(cfg);
  for (double j : traj.interval_max_jump) {
    res.max_observed = std::max(res.max_observed, j);
  }
  res.violated = res.max_observed > res.threshold_r;
  return res;
}

Mat run_ensemble(const ChainConfig& cfg, long n_chains, int n_workers,
                 EnsembleRecord record) {
  if (n_chains < 1) throw std::invalid_argument("run_ensemble: n_chains < 1");
  if (n_workers <= 0) {
    n_workers = static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
  }
  const long rows_per_chain =
      record == EnsembleRecord::full ? cfg.n_steps + 1 : 1;
  Mat out(n_chains * rows_per_chain, cfg.potential.dim);
  std::atomic<long> next{0};
  std::mutex fail_mutex;
  std::vector<long> failed;

  const auto work = [&]() {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n_chains) return;
      try {
        const Trajectory traj = run_chain(cfg, static_cast<std::uint64_t>(i));
        if (record == EnsembleRecord::full) {
          for (long k = 0; k <= cfg.n_steps; ++k) {
            out.row(i * rows_per_chain + k) = traj.states[k].transpose();
          }
        } else {
          out.row(i) = traj.states.back().transpose();
        }
      } catch (const ChainDivergence&) {
        const std::lock_guard<std::mutex> lock(fail_mutex);
        failed.push_back(i);
      }
    }
  };

  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (!failed.empty()) {
    std::sort(failed.begin(), failed.end());
    throw EnsembleDivergence(std::move(failed));
  }
  return out;
}

bool TailCheckReport::all_ok() const {
  for (const auto& r : normal_rows) {
    if (!r.ok) return false;
  }
  for (const auto& r : brownian_rows) {
    if (!r.ok) return false;
  }
  return true;
}

TailCheckReport empirical_tail_checks(long n_draws, int d,
                                      std::uint64_t seed) {
  if (n_draws < 10000) {
    throw std::invalid_argument("empirical_tail_checks: n_draws >= 1e4 required");
  }
  const std::vector<double> xs = {0.5, 1.0, 2.0};
  TailCheckReport rep;
  const double sqrt_d = std::sqrt(static_cast<double>(d));

  {
    NoiseStream stream(seed, 10);
    std::vector<long> exceed(xs.size(), 0);
    for (long i = 0; i < n_draws; ++i) {
      double norm2 = 0.0;
      for (int c = 0; c < d; ++c) {
        const double w = stream.normal(NoiseStream::kAux, static_cast<std::uint64_t>(i), c);
        norm2 += w * w;
      }
      const double norm = std::sqrt(norm2);
      for (std::size_t j = 0; j < xs.size(); ++j) {
        if (norm >= sqrt_d + xs[j]) ++exceed[j];
      }
    }
    for (std::size_t j = 0; j < xs.size(); ++j) {
      TailCheckRow row;
      row.x = xs[j];
      row.empirical = static_cast<double>(exceed[j]) / n_draws;
      row.bound = std::exp(-0.5 * xs[j] * xs[j]);
      row.se = std::sqrt(row.empirical * (1.0 - row.empirical) / n_draws);
      row.ok = row.empirical <= row.bound + 3.0 * row.se;
      rep.normal_rows.push_back(row);
    }
  }

  {
    // sup_{s <= t} |B_s| on fine paths; the discrete sup under-counts the
    // continuous one, which only makes the upper-bound check conservative.
    const long n_paths = std::min<long>(n_draws, 20000);
    const int n_steps = 128;
    const double t = 1.0;
    const double h = t / n_steps;
    const double sh = std::sqrt(h);
    NoiseStream stream(seed, 11);
    std::vector<long> exceed(xs.size(), 0);
    Vec b(d);
    for (long i = 0; i < n_paths; ++i) {
      b.setZero();
      double sup = 0.0;
      for (int s = 0; s < n_steps; ++s) {
        const std::uint64_t counter =
            static_cast<std::uint64_t>(i) * n_steps + s;
        for (int c = 0; c < d; ++c) {
          b[c] += sh * stream.normal(NoiseStream::kStep, counter, c);
        }
        sup = std::max(sup, b.norm());
      }
      for (std::size_t j = 0; j < xs.size(); ++j) {
        if (sup >= std::sqrt(t) * (sqrt_d + xs[j])) ++exceed[j];
      }
    }
    for (std::size_t j = 0; j < xs.size(); ++j) {
      TailCheckRow row;
      row.x = xs[j];
      row.empirical = static_cast<double>(exceed[j]) / n_paths;
      row.bound = 2.0 * std::exp(-0.25 * xs[j] * xs[j]);
      row.se = std::sqrt(row.empirical * (1.0 - row.empirical) / n_paths);
      row.ok = row.empirical <= row.bound + 3.0 * row.se;
      rep.brownian_rows.push_back(row);
    }
  }
  return rep;
}

}  // namespace langevin
