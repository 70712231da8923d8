#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "langevin/potential.hpp"

namespace langevin {

// Flat key-value experiment config with dotted section names, e.g.
//   potential.kind = gaussian
//   planner.epsilon = 0.01
// '#' starts a comment; later keys override earlier ones.
struct ExperimentConfig {
  PotentialKind kind = PotentialKind::gaussian;
  int d = 1;
  double alpha = 0.0;
  double beta = 0.0;
  Vec mixture_a;
  std::string dataset_path;

  std::string certificate_source = "analytic";  // analytic | numeric
  double cert_box_radius = 20.0;
  long cert_n_pairs = 10000;
  long cert_n_fd = 1000;

  std::string lsi_method = "auto";
  double lsi_c = 1.0;
  long lsi_osc_samples = 10000;

  double epsilon = 0.01;
  std::string planner_metric = "chi2";  // chi2|renyi|kl|tv|w2
  double planner_alpha = 2.0;
  double sigma2 = 0.0;  // 0 -> default 0.5 / (1 + L) / 2
  double c1 = 1.0, c2 = 1.0, c3 = 1.0;

  std::optional<double> sampler_eta;   // overrides bypass the planner
  std::optional<long> sampler_steps;
  long n_chains = 10000;
  int substeps = 1;
  int workers = 0;

  std::string out_dir = "out";
  std::uint64_t seed = 0;

  bool untuned() const {
    return sampler_eta.has_value() || sampler_steps.has_value();
  }
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& origin);

ExperimentConfig config_from_map(std::map<std::string, std::string> kv);

ExperimentConfig load_config(const std::string& path);

// Applies a single "key=value" override on top of a parsed config.
void apply_override(std::map<std::string, std::string>& kv,
                    const std::string& assignment);

Potential build_potential(const ExperimentConfig& cfg);

// Validation that needs the potential (init-variance cap sigma2 < 1/(1+L)).
void validate_against_potential(ExperimentConfig& cfg, const Potential& p);

}  // namespace langevin
