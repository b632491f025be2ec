#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "acmca/crossbar.hpp"

namespace acmca {

enum class MatrixKind { Bernoulli, Gaussian };

using LevelGrid = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Recipe for a non-uniform measurement matrix. col_weights are sampling
/// weights per signal element, nonnegative with at least one positive entry,
/// normalized to mean 1 by the callers that derive them.
struct MatrixSpec {
  MatrixKind kind = MatrixKind::Gaussian;
  int rows = 0;
  int cols = 0;
  Eigen::VectorXd col_weights;

  static MatrixSpec uniform(MatrixKind kind, int rows, int cols) {
    return {kind, rows, cols, Eigen::VectorXd::Ones(cols)};
  }
  void validate() const;
};

/// Differential encoding reference: signed matrix entries are realized as
/// scale * (G(level) - G(reference level)), with the mid-scale level 8 as
/// reference and scale chosen so entries span roughly [-0.5, +0.5].
inline constexpr int kReferenceLevel = 8;
inline const double kDefaultPhiScale = 1.0 / (kConductanceMaxS - kConductanceMinS);

/// The realized measurement matrix: values derived from read-back cell
/// conductances (never from the requested targets), plus the level snapshot
/// they came from. The snapshot hash identifies one realization so the
/// sampling and reconstruction stages can assert they use the same matrix.
class MeasurementMatrix {
 public:
  MeasurementMatrix() = default;
  MeasurementMatrix(LevelGrid source_levels, double scale);

  int rows() const { return static_cast<int>(source_levels_.rows()); }
  int cols() const { return static_cast<int>(source_levels_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  const LevelGrid& source_levels() const { return source_levels_; }
  double scale() const { return scale_; }
  std::uint64_t snapshot_hash() const;

  /// CSV exports for debugging: realized values and the integer level grid.
  void export_values_csv(std::ostream& os) const;
  void export_levels_csv(std::ostream& os) const;

 private:
  Eigen::MatrixXd values_;
  LevelGrid source_levels_;
  double scale_ = kDefaultPhiScale;
};

/// Inverse standard normal CDF (Acklam's rational approximation, ~1e-9
/// relative accuracy). Exposed for the deterministic target mapping.
double inverse_normal_cdf(double u);

Eigen::MatrixXd draw_base_uniforms(int rows, int cols, RngStream& rng);

/// Deterministic inverse-CDF map from a frozen uniform grid to target levels
/// 0..15. Equal weights always reproduce equal targets, which is what makes
/// partial reprogramming well defined.
///   Bernoulli: level 15 with probability clamp(0.5 * w_n, 0.05, 0.95), else 1.
///   Gaussian:  g = sqrt(w_n) * invPhi(u), clipped to [-3, 3], affine-mapped
///              to [0, 15], rounded half away from zero.
LevelGrid target_levels_from(const Eigen::MatrixXd& base_uniforms, const MatrixSpec& spec);

/// Fresh-draw convenience wrapper around target_levels_from.
LevelGrid target_levels(const MatrixSpec& spec, RngStream& rng);

/// Stochastic program-and-verify settings. Amplitude is chosen so each set
/// pulse switches a still-down magnet with per_pulse_probability; with verify
/// on, each cell is pulsed and read back until its level reaches the target
/// or the pulse budget is spent.
struct ProgramConfig {
  double per_pulse_probability = 0.3;
  int max_pulses = 40;
  int pulses_per_batch = 1;
  bool verify = true;
};

/// Resets every cell, drives it to its target level, and returns the realized
/// matrix computed from read-back conductances. All pulse and read energy is
/// charged to the array's ledger. Best-effort: cells that exhaust the pulse
/// budget stay where they landed.
MeasurementMatrix program_matrix(CrossbarArray& array, const LevelGrid& targets,
                                 const ProgramConfig& config = {},
                                 double scale = kDefaultPhiScale);

/// Reprograms only the cells whose target differs from what they were last
/// programmed to. Returns the number of touched cells.
int reprogram_changed_cells(CrossbarArray& array, const LevelGrid& previous_targets,
                            const LevelGrid& new_targets, const ProgramConfig& config = {});

/// Reads the full conductance grid and rebuilds the realized matrix.
/// Deterministic given the cell states.
MeasurementMatrix realize_phi(CrossbarArray& array, double scale = kDefaultPhiScale);

struct RipEstimate {
  double delta_hat = 0.0;
  int k = 0;
  int trials = 0;
  int p_norm = 2;
};

/// Columns scaled to unit l2 norm; all-zero columns are left untouched.
Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& phi);

/// Largest isometry deviation max(lambda_max - 1, 1 - lambda_min) of the Gram
/// matrix of the given columns of a column-normalized phi. This is the exact
/// worst case over every vector supported on that index set.
double rip_delta_on_support(const Eigen::MatrixXd& phi_unit_cols, std::span<const int> support);

/// Empirical RIP constant: max of rip_delta_on_support over `trials` supports
/// of size k drawn uniformly at random.
RipEstimate rip_estimate(const Eigen::MatrixXd& phi, int k, int trials, RngStream& rng);
RipEstimate rip_estimate(const MeasurementMatrix& phi, int k, int trials, RngStream& rng);

}  // namespace acmca
