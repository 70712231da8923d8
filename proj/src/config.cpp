#include "langevin/config.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace langevin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::map<std::string, std::string>& kv,
                 const std::string& key, double fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (...) {
    throw ValidationError("config key '" + key + "': not a number: " +
                          it->second);
  }
}

long to_long(const std::map<std::string, std::string>& kv,
             const std::string& key, long fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stol(it->second);
  } catch (...) {
    throw ValidationError("config key '" + key + "': not an integer: " +
                          it->second);
  }
}

std::string to_str(const std::map<std::string, std::string>& kv,
                   const std::string& key, const std::string& fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(origin + ":" + std::to_string(lineno) +
                            ": expected 'key = value', got: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ValidationError(origin + ":" + std::to_string(lineno) +
                            ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

void apply_override(std::map<std::string, std::string>& kv,
                    const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ValidationError("override must be key=value: " + assignment);
  }
  kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

ExperimentConfig config_from_map(std::map<std::string, std::string> kv) {
  ExperimentConfig cfg;
  cfg.kind = potential_kind_from_string(to_str(kv, "potential.kind", "gaussian"));
  // 0 means unspecified; dataset-backed potentials take their dimension from
  // the data, everything else falls back to 1 at build time.
  cfg.d = static_cast<int>(to_long(kv, "potential.d", 0));
  cfg.alpha = to_double(kv, "potential.alpha", 0.0);
  cfg.beta = to_double(kv, "potential.beta", 0.0);
  cfg.dataset_path = to_str(kv, "potential.dataset", "");
  const std::string a_list = to_str(kv, "potential.a", "");
  if (!a_list.empty()) {
    std::vector<double> vals;
    std::stringstream ss(a_list);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(trim(cell)));
    cfg.mixture_a = Eigen::Map<Vec>(vals.data(), vals.size());
  }

  cfg.certificate_source = to_str(kv, "certificate.source", "analytic");
  if (cfg.certificate_source != "analytic" &&
      cfg.certificate_source != "numeric") {
    throw ValidationError("certificate.source must be analytic or numeric");
  }
  cfg.cert_box_radius = to_double(kv, "certificate.box_radius", 20.0);
  cfg.cert_n_pairs = to_long(kv, "certificate.n_pairs", 10000);
  cfg.cert_n_fd = to_long(kv, "certificate.n_fd", 1000);

  cfg.lsi_method = to_str(kv, "lsi.method", "auto");
  cfg.lsi_c = to_double(kv, "lsi.c", 1.0);
  cfg.lsi_osc_samples = to_long(kv, "lsi.osc_samples", 10000);

  cfg.epsilon = to_double(kv, "planner.epsilon", 0.01);
  cfg.planner_metric = to_str(kv, "planner.metric", "chi2");
  cfg.planner_alpha = to_double(kv, "planner.alpha", 2.0);
  cfg.sigma2 = to_double(kv, "planner.sigma2", 0.0);
  cfg.c1 = to_double(kv, "planner.c1", 1.0);
  cfg.c2 = to_double(kv, "planner.c2", 1.0);
  cfg.c3 = to_double(kv, "planner.c3", 1.0);

  if (kv.count("sampler.eta")) cfg.sampler_eta = to_double(kv, "sampler.eta", 0);
  if (kv.count("sampler.n_steps")) {
    cfg.sampler_steps = to_long(kv, "sampler.n_steps", 0);
  }
  cfg.n_chains = to_long(kv, "sampler.n_chains", 10000);
  cfg.substeps = static_cast<int>(to_long(kv, "sampler.substeps", 1));
  cfg.workers = static_cast<int>(to_long(kv, "sampler.workers", 0));

  cfg.out_dir = to_str(kv, "output.dir", "out");
  cfg.seed = static_cast<std::uint64_t>(to_long(kv, "seed", 0));

  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
    throw ValidationError("planner.epsilon must be in (0,1)");
  }
  if (cfg.n_chains < 1) throw ValidationError("sampler.n_chains must be >= 1");
  if (cfg.substeps < 1) throw ValidationError("sampler.substeps must be >= 1");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_map(parse_key_values(buffer.str(), path));
}

Potential build_potential(const ExperimentConfig& cfg) {
  PotentialParams params;
  params.alpha = cfg.alpha;
  params.beta = cfg.beta;
  params.a = cfg.mixture_a;
  if (!cfg.dataset_path.empty()) params.data = load_dataset_csv(cfg.dataset_path);
  const bool dimension_from_elsewhere =
      params.data.has_value() || params.a.size() > 0;
  params.d = cfg.d > 0 ? cfg.d : (dimension_from_elsewhere ? 0 : 1);
  return build_library_potential(cfg.kind, params);
}

void validate_against_potential(ExperimentConfig& cfg, const Potential& p) {
  const double L = (p.known && p.known->has_L()) ? p.known->L : 1.0;
  if (cfg.sigma2 == 0.0) {
    cfg.sigma2 = 0.5 / (1.0 + L);  // default: half the admissible cap
  }
  if (!(cfg.sigma2 > 0.0 && cfg.sigma2 < 1.0 / (1.0 + L))) {
    throw ValidationError("sigma2 must be < 1/(1+L)");
  }
}

}  // namespace langevin
