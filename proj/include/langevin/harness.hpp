#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "langevin/config.hpp"
#include "langevin/divergence.hpp"
#include "langevin/potential.hpp"

namespace langevin {

// Exit codes shared by the CLI and the command layer.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitSuiteFailure = 4;

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_file(const std::string& path);

// One row per run artifact, with size and checksum, so reruns can be compared
// byte for byte.
struct RunManifest {
  std::uint64_t config_hash = 0;
  std::string version = "0.1.0";
  std::vector<std::pair<std::string, double>> timings_seconds;
  struct FileEntry {
    std::string name;
    std::uint64_t bytes = 0;
    std::uint64_t checksum = 0;
  };
  std::vector<FileEntry> files;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

// "%.17g" formatting everywhere so doubles round-trip losslessly.
std::string format_double(double v);
void write_text_file(const std::string& path, const std::string& content);

std::string sample_matrix_csv(const Mat& finals);      // chain_id, coord_1..d
std::string trajectory_csv(const std::vector<Vec>& states);  // step, coord_1..d

struct VerifyRow {
  std::string suite;
  std::string row;
  bool passed = false;
  std::string detail;
};

// Exact single-step envelope fit on the Gaussian variance recursion:
// Chat = max_k (chi2_{k+1} - (1 - 3 eta / (4 lambda)) chi2_k) / eta^2
// over k in [N, 2N], per dimension in dims.
struct TrendCheckResult {
  std::vector<std::pair<int, double>> c_hat_per_d;
  bool envelope_ok = false;       // envelope holds at every k with fitted Chat
  bool scaling_ok = false;        // max/min of Chat(d)/d within factor 4
};

TrendCheckResult single_step_trend_check(double eta, double sigma2_0,
                                         double lambda,
                                         const std::vector<int>& dims,
                                         long n_from = 0);

// The inequality-verification suite (semi-contraction, jump bound, tail
// bounds, contraction, metric chain, affine recursion bound, single-step
// trend).  Runs every row even after a failure.
std::vector<VerifyRow> run_verify_suite(const ExperimentConfig& cfg);

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::string> produced_files;
  std::string message;
};

CommandResult cmd_certify(const ExperimentConfig& cfg);
CommandResult cmd_lsi(const ExperimentConfig& cfg);
CommandResult cmd_plan(const ExperimentConfig& cfg);
CommandResult cmd_sample(const ExperimentConfig& cfg);
CommandResult cmd_verify(const ExperimentConfig& cfg);

int run_cli(int argc, char** argv);

}  // namespace langevin
