#include "langevin/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "langevin/certificate.hpp"
#include "langevin/lsi.hpp"
#include "langevin/oracle.hpp"
#include "langevin/planner.hpp"
#include "langevin/rng.hpp"
#include "langevin/sampler.hpp"

namespace langevin {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("fnv1a64_file: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string s = buf.str();
  return fnv1a64(s.data(), s.size());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  std::string out = "{\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "  \"config_hash\": \"%016llx\",\n",
                static_cast<unsigned long long>(manifest.config_hash));
  out += buf;
  out += "  \"version\": \"" + manifest.version + "\",\n";
  out += "  \"timings_seconds\": {";
  for (std::size_t i = 0; i < manifest.timings_seconds.size(); ++i) {
    out += (i ? ", " : "") + std::string("\"") +
           manifest.timings_seconds[i].first +
           "\": " + format_double(manifest.timings_seconds[i].second);
  }
  out += "},\n  \"files\": [\n";
  for (std::size_t i = 0; i < manifest.files.size(); ++i) {
    const auto& f = manifest.files[i];
    std::snprintf(buf, sizeof(buf), "%llu, \"checksum\": \"%016llx\"}",
                  static_cast<unsigned long long>(f.bytes),
                  static_cast<unsigned long long>(f.checksum));
    out += "    {\"name\": \"" + f.name + "\", \"bytes\": " + buf;
    out += (i + 1 < manifest.files.size()) ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  write_text_file(path, out);
}

std::string sample_matrix_csv(const Mat& finals) {
  std::string out = "chain_id";
  for (int c = 0; c < finals.cols(); ++c) {
    out += ",coord_" + std::to_string(c + 1);
  }
  out += "\n";
  for (long i = 0; i < finals.rows(); ++i) {
    out += std::to_string(i);
    for (int c = 0; c < finals.cols(); ++c) {
      out += "," + format_double(finals(i, c));
    }
    out += "\n";
  }
  return out;
}

std::string trajectory_csv(const std::vector<Vec>& states) {
  std::string out = "step";
  const int d = states.empty() ? 0 : static_cast<int>(states[0].size());
  for (int c = 0; c < d; ++c) out += ",coord_" + std::to_string(c + 1);
  out += "\n";
  for (std::size_t k = 0; k < states.size(); ++k) {
    out += std::to_string(k);
    for (int c = 0; c < d; ++c) out += "," + format_double(states[k][c]);
    out += "\n";
  }
  return out;
}

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

struct OutputSink {
  fs::path dir;
  RunManifest manifest;
  std::vector<std::string> produced;

  explicit OutputSink(const ExperimentConfig& cfg) : dir(cfg.out_dir) {
    fs::create_directories(dir);
    std::string canon = "seed=" + std::to_string(cfg.seed);
    manifest.config_hash = fnv1a64(canon.data(), canon.size());
  }

  void set_config_hash(const std::string& canonical_text) {
    manifest.config_hash = fnv1a64(canonical_text.data(), canonical_text.size());
  }

  void emit(const std::string& name, const std::string& content) {
    const fs::path p = dir / name;
    write_text_file(p.string(), content);
    manifest.files.push_back(
        {name, content.size(), fnv1a64(content.data(), content.size())});
    produced.push_back(p.string());
  }

  void finish() {
    write_manifest(manifest, (dir / "manifest.json").string());
    produced.push_back((dir / "manifest.json").string());
  }
};

std::string canonical_config_text(const ExperimentConfig& cfg) {
  std::string s;
  s += "potential.kind=" + to_string(cfg.kind) + "\n";
  s += "potential.d=" + std::to_string(cfg.d) + "\n";
  s += "potential.alpha=" + format_double(cfg.alpha) + "\n";
  s += "potential.beta=" + format_double(cfg.beta) + "\n";
  s += "planner.epsilon=" + format_double(cfg.epsilon) + "\n";
  s += "planner.metric=" + cfg.planner_metric + "\n";
  s += "planner.sigma2=" + format_double(cfg.sigma2) + "\n";
  s += "sampler.n_chains=" + std::to_string(cfg.n_chains) + "\n";
  if (cfg.sampler_eta) s += "sampler.eta=" + format_double(*cfg.sampler_eta) + "\n";
  if (cfg.sampler_steps) s += "sampler.n_steps=" + std::to_string(*cfg.sampler_steps) + "\n";
  s += "seed=" + std::to_string(cfg.seed) + "\n";
  return s;
}

std::string provenance_str(Provenance p) {
  return p == Provenance::analytic ? "analytic" : "numeric-estimate";
}

std::string certificate_json(const Certificate& c) {
  std::string out = "{\n";
  out += "  \"L\": " + format_double(c.L) + ",\n";
  out += "  \"m\": " + format_double(c.m) + ",\n";
  out += "  \"b\": " + format_double(c.b) + ",\n";
  out += "  \"kappa\": " + format_double(c.kappa()) + ",\n";
  out += "  \"lambda\": " + format_double(c.lambda) + ",\n";
  out += "  \"minimizer_norm\": " +
         format_double(c.minimizer ? c.minimizer->norm() : 0.0) + ",\n";
  out += "  \"provenance\": {\"L\": \"" + provenance_str(c.src_L) +
         "\", \"m\": \"" + provenance_str(c.src_m) + "\", \"b\": \"" +
         provenance_str(c.src_b) + "\", \"lambda\": \"" +
         provenance_str(c.src_lambda) + "\", \"minimizer\": \"" +
         provenance_str(c.src_minimizer) + "\"}\n";
  out += "}\n";
  return out;
}

// Fills any missing certificate field; the LSI constant comes from the best
// applicable recipe when the potential does not carry one.
Certificate resolve_certificate(const ExperimentConfig& cfg,
                                const Potential& p) {
  Certificate cert;
  if (cfg.certificate_source == "analytic" && p.known) {
    cert = *p.known;
  }
  CertifyOptions opts;
  opts.n_fd_samples = cfg.cert_n_fd;
  opts.n_pairs = cfg.cert_n_pairs;
  opts.box_radius = cfg.cert_box_radius;
  opts.seed = cfg.seed;
  if (!cert.has_L() || !cert.has_m() || !cert.has_b() || !cert.minimizer) {
    Potential probe = p;
    if (cfg.certificate_source == "numeric") {
      probe.known.reset();  // estimate everything, ignore stored constants
    } else {
      probe.known = cert.has_L() ? std::optional<Certificate>(cert) : p.known;
    }
    Certificate numeric = certify(probe, opts);
    if (!cert.has_L()) { cert.L = numeric.L; cert.src_L = numeric.src_L; }
    if (!cert.has_m()) { cert.m = numeric.m; cert.src_m = numeric.src_m; }
    if (!cert.has_b()) { cert.b = numeric.b; cert.src_b = numeric.src_b; }
    if (!cert.minimizer) {
      cert.minimizer = numeric.minimizer;
      cert.src_minimizer = numeric.src_minimizer;
    }
  }
  if (!cert.has_lambda()) {
    if (cfg.kind == PotentialKind::corrupted_regression &&
        cfg.dataset_path.empty()) {
      cert.lambda =
          nonuniform_bound(corrupted_regression_profile(cfg.alpha, cfg.beta),
                           1e-8)
              .lambda_bound;
    } else {
      cert.lambda =
          lyapunov_poincare(p, cert, cfg.lsi_c, cfg.lsi_osc_samples, cfg.seed)
              .lambda_bound;
    }
    cert.src_lambda = Provenance::numeric_estimate;
  }
  return cert;
}

std::vector<LsiBound> applicable_lsi_bounds(const ExperimentConfig& cfg,
                                            const Potential& p,
                                            const Certificate& cert) {
  std::vector<LsiBound> bounds;
  const auto want = [&](const std::string& name) {
    return cfg.lsi_method == "auto" || cfg.lsi_method == name;
  };
  switch (cfg.kind) {
    case PotentialKind::gaussian:
      if (want("bakry_emery")) bounds.push_back(bakry_emery(1.0));
      break;
    case PotentialKind::gaussian_mixture:
      if (p.known && want("bakry_emery")) {
        bounds.push_back(bakry_emery(p.known->m));
      }
      break;
    case PotentialKind::bayes_logistic:
      if (p.known && want("bakry_emery")) {
        bounds.push_back(bakry_emery(p.known->m));
      }
      break;
    case PotentialKind::cosine_canonical:
      if (want("holley_stroock")) bounds.push_back(holley_stroock(1.0, 1.25));
      break;
    case PotentialKind::student_t_ridge: {
      if (want("outside_ball")) {
        const double a = cfg.alpha;
        const double m0 = a * a * (a + 3.0) / ((a + 1.0) * (a + 1.0));
        bounds.push_back(outside_ball(m0, 0.125, 1.0 / std::sqrt(a)));
      }
      break;
    }
    case PotentialKind::corrupted_regression:
      if (cfg.dataset_path.empty() && want("nonuniform")) {
        bounds.push_back(nonuniform_bound(
            corrupted_regression_profile(cfg.alpha, cfg.beta), 1e-8));
      }
      break;
  }
  if (want("lyapunov") && cert.has_m() && cert.has_b() && cert.minimizer) {
    try {
      bounds.push_back(
          lyapunov_poincare(p, cert, cfg.lsi_c, cfg.lsi_osc_samples, cfg.seed));
    } catch (const std::runtime_error&) {
      // Oscillation too large for a finite bound; the recipe is skipped.
      if (cfg.lsi_method == "lyapunov") throw;
    }
  }
  if (bounds.empty()) {
    throw ValidationError("no applicable LSI recipe for method '" +
                          cfg.lsi_method + "' on " + to_string(cfg.kind));
  }
  return bounds;
}

LmcPlan make_plan(const ExperimentConfig& cfg, const Potential& p,
                  const Certificate& cert) {
  PlannerInputs inp = planner_inputs_from(p, cert, cfg.sigma2, cfg.epsilon);
  inp.c1 = cfg.c1;
  inp.c2 = cfg.c2;
  inp.c3 = cfg.c3;
  if (cfg.planner_metric == "chi2") return plan_chi2(inp);
  if (cfg.planner_metric == "renyi") {
    inp.alpha = cfg.planner_alpha;
    return plan_renyi(inp);
  }
  TargetMetric tm;
  if (cfg.planner_metric == "kl") {
    tm = TargetMetric::kl;
  } else if (cfg.planner_metric == "tv") {
    tm = TargetMetric::tv;
  } else if (cfg.planner_metric == "w2") {
    tm = TargetMetric::w2;
  } else {
    throw ValidationError("unknown planner.metric: " + cfg.planner_metric);
  }
  inp.epsilon = translate_metric(tm, cfg.epsilon, cert.lambda);
  LmcPlan plan = plan_chi2(inp);
  plan.note = "chi2 accuracy translated from " + cfg.planner_metric +
              " target " + format_double(cfg.epsilon) +
              "; guarantee holds at iteration 2N only";
  return plan;
}

// Minimal SVG line plot of log10(chi2) against the iteration counter, from
// the exact variance recursion.  Display-only; nothing downstream reads it.
std::string divergence_plot_svg(double sigma2_0, double eta, long n_steps,
                                int d) {
  const int w = 640, h = 360, margin = 48;
  const long points = std::min<long>(n_steps, 256);
  std::vector<std::pair<double, double>> xy;
  double lo = 1e300, hi = -1e300;
  for (long i = 0; i <= points; ++i) {
    const long k = n_steps * i / points;
    const double chi =
        oracle::chi2_isotropic(oracle::lmc_variance(sigma2_0, eta, k), d);
    const double y = std::log10(std::max(chi, 1e-300));
    xy.emplace_back(static_cast<double>(k), y);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  if (hi <= lo) hi = lo + 1.0;
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
      std::to_string(w) + "\" height=\"" + std::to_string(h) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"12\" y=\"20\" font-size=\"13\">log10 chi2 vs iteration "
         "(exact recursion)</text>\n";
  svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" "
         "points=\"";
  char buf[64];
  for (const auto& [k, y] : xy) {
    const double px = margin + (w - 2 * margin) * k / xy.back().first;
    const double py = h - margin - (h - 2 * margin) * (y - lo) / (hi - lo);
    std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", px, py);
    svg += buf;
  }
  svg += "\"/>\n</svg>\n";
  return svg;
}

}  // namespace

TrendCheckResult single_step_trend_check(double eta, double sigma2_0,
                                         double lambda,
                                         const std::vector<int>& dims,
                                         long n_from) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("single_step_trend_check: eta in (0,1)");
  }
  const long N = n_from > 0 ? n_from
                            : static_cast<long>(std::ceil(2.0 / eta));
  TrendCheckResult res;
  res.envelope_ok = true;
  for (int d : dims) {
    double c_hat = -std::numeric_limits<double>::infinity();
    double s = sigma2_0;
    for (long k = 0; k < N; ++k) s = (1.0 - eta) * (1.0 - eta) * s + 2.0 * eta;
    std::vector<double> chis;
    chis.reserve(N + 1);
    for (long k = N; k <= 2 * N; ++k) {
      chis.push_back(oracle::chi2_isotropic(s, d));
      s = (1.0 - eta) * (1.0 - eta) * s + 2.0 * eta;
    }
    const double contraction = 1.0 - 3.0 * eta / (4.0 * lambda);
    for (std::size_t i = 0; i + 1 < chis.size(); ++i) {
      c_hat = std::max(c_hat,
                       (chis[i + 1] - contraction * chis[i]) / (eta * eta));
    }
    if (!std::isfinite(c_hat)) res.envelope_ok = false;
    // Re-check the envelope with the fitted constant.
    for (std::size_t i = 0; i + 1 < chis.size(); ++i) {
      if (chis[i + 1] >
          contraction * chis[i] + c_hat * eta * eta + 1e-15) {
        res.envelope_ok = false;
      }
    }
    res.c_hat_per_d.emplace_back(d, c_hat);
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& [d, c] : res.c_hat_per_d) {
    const double ratio = c / d;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  res.scaling_ok = hi <= 4.0 * lo && lo > 0.0;
  return res;
}

std::vector<VerifyRow> run_verify_suite(const ExperimentConfig& cfg) {
  std::vector<VerifyRow> rows;
  const auto add = [&rows](const std::string& suite, const std::string& row,
                           bool ok, const std::string& detail) {
    rows.push_back({suite, row, ok, detail});
  };

  Potential pot = build_potential(cfg);
  ExperimentConfig local = cfg;
  validate_against_potential(local, pot);
  const Certificate cert = resolve_certificate(local, pot);

  // Semi-contraction of synchronously coupled diffusions (config potential).
  {
    const double eta_fine = 1e-3;
    const double t_end = 1.0;
    const long n_paths = 1000;
    const double slack = 5.0 * eta_fine;
    bool ok = true;
    double worst = -1e300;
    rng::NoiseStream init(cfg.seed, 77);
    for (long i = 0; i < n_paths && ok; ++i) {
      Vec x0(pot.dim), y0(pot.dim);
      for (int c = 0; c < pot.dim; ++c) {
        x0[c] = 2.0 * init.normal(rng::NoiseStream::kAux, i, c);
        y0[c] = 2.0 * init.normal(rng::NoiseStream::kAux, i, 1000 + c);
      }
      const auto path = couple_diffusions(pot, x0, y0, eta_fine, t_end,
                                          cfg.seed + 1000 + i);
      const double d0 = path.front().second;
      for (const auto& [t, dist] : path) {
        const double bound =
            std::exp(-cert.m * t) * d0 +
            std::sqrt(cert.b / cert.m * (1.0 - std::exp(-2.0 * cert.m * t)));
        worst = std::max(worst, dist - bound);
        if (dist > bound + slack) {
          ok = false;
          break;
        }
      }
    }
    add("semi_contract", pot.label, ok,
        "worst excess " + format_double(worst) + " vs slack " +
            format_double(slack));
  }

  // Jump bound on interpolation paths.
  {
    const double L = cert.L;
    const double eta =
        std::min(0.01, std::min(1.0, cert.m) / (4.0 * std::max(1.0, L * L)));
    const long N = 99;
    const long n_paths = 10000;
    JumpCheckConfig jc;
    jc.delta = 0.01;
    jc.kappa = cert.kappa();
    jc.b = cert.b;
    jc.d = pot.dim;
    jc.n_steps = N;
    jc.eta = eta;
    ChainConfig cc;
    cc.potential = pot;
    cc.eta = eta;
    cc.n_steps = N;
    cc.seed = cfg.seed + 2000;
    cc.init = GaussianInit{0.5 / (1.0 + L)};
    long violations = 0;
    for (long i = 0; i < n_paths; ++i) {
      const Trajectory traj = run_interpolation(cc, 8, i);
      if (monitor_jumps(traj, jc).violated) ++violations;
    }
    const double freq = static_cast<double>(violations) / n_paths;
    add("jump_bound", pot.label, freq <= jc.delta,
        "violation frequency " + format_double(freq) + " vs delta " +
            format_double(jc.delta));
  }

  // Normal-tail and sup-Brownian bounds.
  for (int d : {1, 10}) {
    const TailCheckReport rep = empirical_tail_checks(100000, d, cfg.seed + 3000);
    add("tail_bounds", "d=" + std::to_string(d), rep.all_ok(),
        "normal and Brownian-sup tails vs exponential bounds + 3 SE");
  }

  // Exponential contraction of the diffusion, closed forms on the oracle.
  {
    bool ok = true;
    const double slack = 1e-10;
    for (double s0 : {0.25, 1.7}) {
      const double kl0 = oracle::kl_gaussian(s0, 1);
      const double chi0 = oracle::chi2_isotropic(s0, 1);
      const double r20 = oracle::renyi_isotropic(2.0, s0, 1);
      for (int i = 1; i <= 30; ++i) {
        const double t = 0.1 * i;
        const double st = oracle::ou_law(s0, t).sigma2;
        ok &= oracle::kl_gaussian(st, 1) <= std::exp(-2.0 * t) * kl0 + slack;
        ok &= oracle::chi2_isotropic(st, 1) <=
              std::exp(-2.0 * t) * chi0 + slack;
        ok &= oracle::renyi_isotropic(2.0, st, 1) <=
              std::exp(-t) * r20 + slack;
      }
    }
    for (double s0 : {0.25, 1.4}) {
      const double r30 = oracle::renyi_isotropic(3.0, s0, 1);
      for (int i = 1; i <= 30; ++i) {
        const double t = 0.1 * i;
        const double st = oracle::ou_law(s0, t).sigma2;
        ok &= oracle::renyi_isotropic(3.0, st, 1) <=
              std::exp(-2.0 * t / 3.0) * r30 + slack;
      }
    }
    add("contraction", "gaussian_oracle", ok,
        "KL, chi2, R2, R3 decay rates on t in {0.1..3}");
  }

  // Metric inequality chain by quadrature.
  {
    const auto gauss_grid = [](double mu, double s2) {
      return normalize(grid_from_function_1d(
          [mu, s2](double x) {
            return std::exp(-0.5 * (x - mu) * (x - mu) / s2) /
                   std::sqrt(2.0 * M_PI * s2);
          },
          -8.0, 8.0, 4097));
    };
    const DensityGrid nu = gauss_grid(0.0, 1.0);
    bool ok = check_metric_chain(gauss_grid(0.0, 0.9), nu, 1.0).all_ok();
    rng::NoiseStream stream(cfg.seed, 88);
    for (int i = 0; i < 20 && ok; ++i) {
      const double s2 = 0.6 + 0.8 * stream.uniform(rng::NoiseStream::kAux, i, 0);
      const double mu = -1.0 + 2.0 * stream.uniform(rng::NoiseStream::kAux, i, 1);
      ok &= check_metric_chain(gauss_grid(mu, s2), nu, 1.0).all_ok();
    }
    add("metric_chain", "gaussian_pairs", ok,
        "TV <= sqrt(KL/2) <= sqrt(chi2/2), W2^2/(2 lambda) <= chi2");
  }

  // Affine recursion bound dominates the exact recursion.
  {
    rng::NoiseStream stream(cfg.seed, 99);
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      const double theta0 = 10.0 * stream.uniform(rng::NoiseStream::kAux, i, 0);
      const double a =
          std::min(0.999, std::max(1e-4, stream.uniform(rng::NoiseStream::kAux, i, 1)));
      const double h = 2.0 * stream.uniform(rng::NoiseStream::kAux, i, 2);
      const long k = static_cast<long>(
          stream.uniform(rng::NoiseStream::kAux, i, 3) * 200);
      double theta = theta0;
      for (long j = 0; j < k; ++j) theta = (1.0 - a) * theta + h;
      const double bound = iterate_affine_recursion(theta0, a, h, k);
      ok &= theta <= bound + 1e-12 * (1.0 + std::abs(bound));
    }
    add("rec_bound", "random_tuples", ok, "1000 random (theta0, a, h, k)");
  }

  // Single-step envelope trend on the exact variance recursion.
  {
    const TrendCheckResult res =
        single_step_trend_check(0.01, 0.9, 1.0, {1, 2, 4, 8});
    std::string detail = "Chat/d:";
    for (const auto& [d, c] : res.c_hat_per_d) {
      detail += " " + format_double(c / d);
    }
    add("single_step_trend", "gaussian_recursion",
        res.envelope_ok && res.scaling_ok, detail);
  }

  return rows;
}

CommandResult cmd_certify(const ExperimentConfig& cfg) {
  Timer timer;
  ExperimentConfig local = cfg;
  Potential pot = build_potential(local);
  validate_against_potential(local, pot);
  OutputSink sink(local);
  sink.set_config_hash(canonical_config_text(local));

  const Certificate cert = resolve_certificate(local, pot);
  sink.emit("certificate.json", certificate_json(cert));

  std::string checks = "{\n";
  const CheckReport grad = check_gradient_fd(pot, local.cert_n_fd, 1e-5,
                                             5.0, local.seed);
  checks += "  \"gradient_fd\": " + check_report_json(grad) + ",\n";
  const CheckReport diss =
      check_dissipativity(pot, cert.m, cert.b, local.cert_n_pairs,
                          local.cert_box_radius, local.seed);
  checks += "  \"dissipativity\": " + check_report_json(diss) + ",\n";
  const double lhat = estimate_lipschitz(pot, local.cert_n_pairs,
                                         local.cert_box_radius, local.seed);
  checks += "  \"lipschitz_estimate\": " + format_double(lhat) + "\n}\n";
  sink.emit("checks.json", checks);

  sink.manifest.timings_seconds.emplace_back("certify", timer.seconds());
  sink.finish();
  CommandResult res;
  res.produced_files = sink.produced;
  if (!grad.passed || !diss.passed) {
    res.exit_code = kExitNumerical;
    res.message = "certification checks failed";
  }
  return res;
}

CommandResult cmd_lsi(const ExperimentConfig& cfg) {
  Timer timer;
  ExperimentConfig local = cfg;
  Potential pot = build_potential(local);
  validate_against_potential(local, pot);
  OutputSink sink(local);
  sink.set_config_hash(canonical_config_text(local));

  const Certificate cert = resolve_certificate(local, pot);
  const auto bounds = applicable_lsi_bounds(local, pot, cert);
  std::string out = "[\n";
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    out += "  " + lsi_bound_json(bounds[i]);
    out += (i + 1 < bounds.size()) ? ",\n" : "\n";
  }
  out += "]\n";
  sink.emit("lsi_bounds.json", out);
  sink.manifest.timings_seconds.emplace_back("lsi", timer.seconds());
  sink.finish();
  return {kExitOk, sink.produced, ""};
}

CommandResult cmd_plan(const ExperimentConfig& cfg) {
  Timer timer;
  ExperimentConfig local = cfg;
  Potential pot = build_potential(local);
  validate_against_potential(local, pot);
  OutputSink sink(local);
  sink.set_config_hash(canonical_config_text(local));

  const Certificate cert = resolve_certificate(local, pot);
  const LmcPlan plan = make_plan(local, pot, cert);
  sink.emit("plan.json", plan_json(plan));
  sink.manifest.timings_seconds.emplace_back("plan", timer.seconds());
  sink.finish();
  CommandResult res;
  res.produced_files = sink.produced;
  if (!plan.feasible) {
    res.exit_code = kExitNumerical;
    res.message = "plan infeasible; see plan.json conditions";
  }
  return res;
}

CommandResult cmd_sample(const ExperimentConfig& cfg) {
  Timer timer;
  ExperimentConfig local = cfg;
  Potential pot = build_potential(local);
  validate_against_potential(local, pot);
  OutputSink sink(local);
  sink.set_config_hash(canonical_config_text(local));

  double eta;
  long n_steps;
  bool untuned = local.untuned();
  if (untuned) {
    if (!local.sampler_eta || !local.sampler_steps) {
      throw ValidationError(
          "sampler overrides need both sampler.eta and sampler.n_steps");
    }
    eta = *local.sampler_eta;
    n_steps = *local.sampler_steps;
  } else {
    const Certificate cert = resolve_certificate(local, pot);
    const LmcPlan plan = make_plan(local, pot, cert);
    sink.emit("plan.json", plan_json(plan));
    if (!plan.feasible) {
      sink.finish();
      return {kExitNumerical, sink.produced,
              "plan infeasible; refusing to sample"};
    }
    eta = plan.eta;
    n_steps = plan.total_iterations;
  }

  ChainConfig cc;
  cc.potential = pot;
  cc.eta = eta;
  cc.n_steps = n_steps;
  cc.seed = local.seed;
  cc.init = GaussianInit{local.sigma2};

  const Mat finals = run_ensemble(cc, local.n_chains, local.workers);
  std::string samples_csv = sample_matrix_csv(finals);
  if (untuned) {
    samples_csv = "# untuned: sampler overrides bypassed the planner\n" +
                  samples_csv;
  }
  sink.emit("samples.csv", samples_csv);
  sink.emit("trajectory.csv", trajectory_csv(run_chain(cc, 0).states));

  std::string div_csv = "metric,alpha,value,method,error_estimate\n";
  if (pot.dim == 1) {
    const DensityGrid hist =
        histogram_density(finals, {-8.0, 0.0}, {8.0, 1.0}, {256, 1});
    const DensityGrid target = normalize(grid_from_function_1d(
        [&pot](double x) {
          Vec v(1);
          v[0] = x;
          return std::exp(-pot.value(v));
        },
        hist.lo[0], hist.hi[0], hist.res[0]));
    div_csv += divergence_report_csv_row(empirical_chi2(hist, target)) + "\n";
    for (Metric m : {Metric::kl, Metric::tv}) {
      DivergenceReport rep = quadrature_divergence(hist, target, m);
      rep.method = EstimateMethod::empirical;
      div_csv += divergence_report_csv_row(rep) + "\n";
    }
    DivergenceReport w2 = w2_1d(hist, target, 100000);
    w2.method = EstimateMethod::empirical;
    div_csv += divergence_report_csv_row(w2) + "\n";
  } else if (pot.dim == 2) {
    const DensityGrid hist = histogram_density(finals, {-6.0, -6.0},
                                               {6.0, 6.0}, {96, 96});
    const DensityGrid target = normalize(grid_from_function_2d(
        [&pot](double x, double y) {
          Vec v(2);
          v << x, y;
          return std::exp(-pot.value(v));
        },
        hist.lo[0], hist.hi[0], hist.lo[1], hist.hi[1], hist.res[0],
        hist.res[1]));
    for (Metric m : {Metric::chi2, Metric::kl, Metric::tv}) {
      DivergenceReport rep = quadrature_divergence(hist, target, m);
      rep.method = EstimateMethod::empirical;
      div_csv += divergence_report_csv_row(rep) + "\n";
    }
  }
  if (local.kind == PotentialKind::gaussian) {
    const double s_final = oracle::lmc_variance(local.sigma2, eta, n_steps);
    DivergenceReport chi;
    chi.metric = Metric::chi2;
    chi.method = EstimateMethod::closed_form;
    chi.value = oracle::chi2_isotropic(s_final, pot.dim);
    div_csv += divergence_report_csv_row(chi) + "\n";
    DivergenceReport kl;
    kl.metric = Metric::kl;
    kl.method = EstimateMethod::closed_form;
    kl.value = oracle::kl_gaussian(s_final, pot.dim);
    div_csv += divergence_report_csv_row(kl) + "\n";
    DivergenceReport w2;
    w2.metric = Metric::w2;
    w2.method = EstimateMethod::closed_form;
    w2.value = std::sqrt(oracle::w2_squared_gaussian(s_final, 1.0, pot.dim));
    div_csv += divergence_report_csv_row(w2) + "\n";
    sink.emit("divergence_plot.svg",
              divergence_plot_svg(local.sigma2, eta, n_steps, pot.dim));
  }
  sink.emit("divergence.csv", div_csv);

  sink.manifest.timings_seconds.emplace_back("sample", timer.seconds());
  sink.finish();
  return {kExitOk, sink.produced, ""};
}

CommandResult cmd_verify(const ExperimentConfig& cfg) {
  Timer timer;
  ExperimentConfig local = cfg;
  OutputSink sink(local);
  sink.set_config_hash(canonical_config_text(local));

  const auto rows = run_verify_suite(local);
  std::string csv = "suite,row,passed,detail\n";
  bool all_ok = true;
  for (const auto& r : rows) {
    csv += r.suite + "," + r.row + "," + (r.passed ? "1" : "0") + ",\"" +
           r.detail + "\"\n";
    all_ok &= r.passed;
    std::printf("[%s] %-18s %s (%s)\n", r.passed ? "PASS" : "FAIL",
                r.suite.c_str(), r.row.c_str(), r.detail.c_str());
  }
  sink.emit("verify.csv", csv);
  sink.manifest.timings_seconds.emplace_back("verify", timer.seconds());
  sink.finish();
  CommandResult res;
  res.produced_files = sink.produced;
  if (!all_ok) {
    res.exit_code = kExitSuiteFailure;
    res.message = "verification suite has failing rows";
  }
  return res;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Langevin Monte Carlo sampling laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> overrides;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "master seed")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--override", overrides, "key=value config override");
  };

  CLI::App* certify = app.add_subcommand("certify", "verify assumptions");
  CLI::App* lsi = app.add_subcommand("lsi", "log-Sobolev constant bounds");
  CLI::App* plan = app.add_subcommand("plan", "step-size/iteration plan");
  CLI::App* sample = app.add_subcommand("sample", "run the LMC ensemble");
  CLI::App* verify = app.add_subcommand("verify", "inequality verification suite");
  for (CLI::App* sub : {certify, lsi, plan, sample, verify}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    std::ifstream in(config_path);
    if (!in) throw ValidationError("cannot open config file: " + config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto kv = parse_key_values(buffer.str(), config_path);
    for (const auto& o : overrides) apply_override(kv, o);
    ExperimentConfig cfg = config_from_map(kv);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_set) cfg.seed = seed;

    CommandResult res;
    if (certify->parsed()) {
      res = cmd_certify(cfg);
    } else if (lsi->parsed()) {
      res = cmd_lsi(cfg);
    } else if (plan->parsed()) {
      res = cmd_plan(cfg);
    } else if (sample->parsed()) {
      res = cmd_sample(cfg);
    } else {
      res = cmd_verify(cfg);
    }
    if (!res.message.empty()) std::fprintf(stderr, "%s\n", res.message.c_str());
    return res.exit_code;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
}

}  // namespace langevin
