#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "acmca/energy.hpp"
#include "acmca/matrix_gen.hpp"

namespace acmca {

/// Invalid configuration (file grammar or field constraint). CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem / stream failure. CLI exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Full experiment description. Loaded from a flat `key = value` text file
/// ('#' comments, optional [section] headers for organization only); every
/// field has the default shown here.
struct ExperimentConfig {
  // experiment
  int n = 400;
  std::vector<int> m_list = {40, 60, 80, 100};
  int trials = 100;
  int frames = 50;
  MatrixKind matrix_kind = MatrixKind::Gaussian;
  bool adaptive = true;  // include the adaptive mode alongside the two static ones
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  int workers = 0;  // 0 = hardware concurrency
  bool dump_debug_grids = false;

  // signal
  double sparsity_rate = 0.1;
  double roi_fraction = 0.10;
  double roi_in_fraction = 0.7;
  double persistence = 0.9;
  double noise_sigma = 0.0;
  double roi_weight_boost = 1.0;

  // budget / adaptation
  double e_budget_pJ = 1e9;
  double e_critical_pJ = 1e6;
  std::optional<double> total_budget_pJ;
  int u1 = 5;
  int u2 = 20;
  double ema_alpha = 0.3;
  double support_threshold_rel = 0.1;  // threshold = rel * max|x_hat|

  // solver
  double bp_tol = 1e-6;
  int bp_max_iter = 2000;
  double bp_rho = 1.0;

  // programming
  ProgramConfig programming;

  // energy / area calibration
  EnergyParams energy;
  AreaModel area;

  int sparsity_k() const;

  /// Throws ConfigError naming the offending field. Also sorts and dedupes
  /// m_list so emitted reports have a canonical row order.
  void validate();
};

ExperimentConfig parse_config(std::istream& in, std::string_view source_name = "<stream>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// The canonical `key = value` rendering of a config (every field, sorted
/// sections); embedded in run reports so results are reproducible.
std::string render_config(const ExperimentConfig& config);

}  // namespace acmca
