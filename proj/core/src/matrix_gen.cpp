#include "acmca/matrix_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace acmca {

void MatrixSpec::validate() const {
  if (rows < 1 || cols < 1) throw std::invalid_argument("MatrixSpec: dimensions must be >= 1");
  if (col_weights.size() != cols) {
    throw std::invalid_argument("MatrixSpec: col_weights length does not match cols");
  }
  // All-zero weights are allowed as a degenerate case (Gaussian collapses to
  // the mid level, Bernoulli to the clamp floor).
  for (int i = 0; i < col_weights.size(); ++i) {
    double w = col_weights[i];
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("MatrixSpec: col_weights must be finite and >= 0");
    }
  }
}

MeasurementMatrix::MeasurementMatrix(LevelGrid source_levels, double scale)
    : source_levels_(std::move(source_levels)), scale_(scale) {
  const double g_ref = conductance_for_level(kReferenceLevel);
  values_.resize(source_levels_.rows(), source_levels_.cols());
  for (int r = 0; r < source_levels_.rows(); ++r) {
    for (int c = 0; c < source_levels_.cols(); ++c) {
      values_(r, c) = scale_ * (conductance_for_level(source_levels_(r, c)) - g_ref);
    }
  }
}

std::uint64_t MeasurementMatrix::snapshot_hash() const {
  // FNV-1a over the level grid and the scale bits.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(source_levels_.rows()));
  feed(static_cast<std::uint64_t>(source_levels_.cols()));
  for (int r = 0; r < source_levels_.rows(); ++r) {
    for (int c = 0; c < source_levels_.cols(); ++c) {
      feed(static_cast<std::uint64_t>(source_levels_(r, c)));
    }
  }
  std::uint64_t scale_bits;
  static_assert(sizeof(scale_bits) == sizeof(scale_));
  std::memcpy(&scale_bits, &scale_, sizeof(scale_bits));
  feed(scale_bits);
  return h;
}

void MeasurementMatrix::export_values_csv(std::ostream& os) const {
  char buf[40];
  for (int r = 0; r < values_.rows(); ++r) {
    for (int c = 0; c < values_.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", values_(r, c));
      os << buf;
      if (c + 1 < values_.cols()) os << ',';
    }
    os << '\n';
  }
}

void MeasurementMatrix::export_levels_csv(std::ostream& os) const {
  for (int r = 0; r < source_levels_.rows(); ++r) {
    for (int c = 0; c < source_levels_.cols(); ++c) {
      os << source_levels_(r, c);
      if (c + 1 < source_levels_.cols()) os << ',';
    }
    os << '\n';
  }
}

double inverse_normal_cdf(double u) {
  // Acklam's rational approximation with one Halley refinement step.
  if (u <= 0.0) return -std::numeric_limits<double>::infinity();
  if (u >= 1.0) return std::numeric_limits<double>::infinity();
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (u < p_low) {
    double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - p_low) {
    double q = u - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley step against the exact CDF expressed with erfc.
  double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
  double g = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  x = x - g / (1.0 + x * g / 2.0);
  return x;
}

Eigen::MatrixXd draw_base_uniforms(int rows, int cols, RngStream& rng) {
  Eigen::MatrixXd u(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) u(r, c) = rng.uniform01();
  }
  return u;
}

LevelGrid target_levels_from(const Eigen::MatrixXd& base_uniforms, const MatrixSpec& spec) {
  spec.validate();
  if (base_uniforms.rows() != spec.rows || base_uniforms.cols() != spec.cols) {
    throw std::invalid_argument("target_levels_from: uniform grid does not match spec dimensions");
  }
  LevelGrid levels(spec.rows, spec.cols);
  for (int c = 0; c < spec.cols; ++c) {
    double w = spec.col_weights[c];
    if (spec.kind == MatrixKind::Bernoulli) {
      double p = std::clamp(0.5 * w, 0.05, 0.95);
      for (int r = 0; r < spec.rows; ++r) {
        levels(r, c) = base_uniforms(r, c) < p ? 15 : 1;
      }
    } else {
      double sd = std::sqrt(w);
      for (int r = 0; r < spec.rows; ++r) {
        double u = std::clamp(base_uniforms(r, c), 1e-12, 1.0 - 1e-12);
        double g = sd * inverse_normal_cdf(u);
        g = std::clamp(g, -3.0, 3.0);
        int level = static_cast<int>(std::lround((g + 3.0) * (15.0 / 6.0)));
        levels(r, c) = std::clamp(level, 0, kMaxTargetLevel);
      }
    }
  }
  return levels;
}

LevelGrid target_levels(const MatrixSpec& spec, RngStream& rng) {
  spec.validate();
  return target_levels_from(draw_base_uniforms(spec.rows, spec.cols, rng), spec);
}

namespace {

void program_cell(CrossbarArray& array, int row, int col, int target,
                  const ProgramConfig& config, double amplitude_mA) {
  array.write_cell(row, col, PulseSpec::reset_pulse());
  int level = 0;
  if (config.verify) {
    int spent = 0;
    while (level < target && spent < config.max_pulses) {
      int batch = std::min(config.pulses_per_batch, config.max_pulses - spent);
      array.write_cell(row, col, PulseSpec::set_train(amplitude_mA, batch));
      spent += batch;
      level = nearest_level(array.read_cell(row, col));
    }
  } else if (target > 0) {
    // Open-loop: pulse count chosen so the expected level reaches the target.
    double p = config.per_pulse_probability;
    double frac = static_cast<double>(target) / kMagnetsPerCell;
    int count = target >= kMagnetsPerCell
                    ? config.max_pulses
                    : static_cast<int>(std::ceil(std::log1p(-frac) / std::log1p(-p)));
    count = std::clamp(count, 1, config.max_pulses);
    array.write_cell(row, col, PulseSpec::set_train(amplitude_mA, count));
  }
}

}  // namespace

MeasurementMatrix program_matrix(CrossbarArray& array, const LevelGrid& targets,
                                 const ProgramConfig& config, double scale) {
  if (targets.rows() != array.rows() || targets.cols() != array.cols()) {
    throw std::invalid_argument("program_matrix: target grid does not match array dimensions");
  }
  double amplitude = array.switching_model().amplitude_for(config.per_pulse_probability);
  for (int r = 0; r < array.rows(); ++r) {
    for (int c = 0; c < array.cols(); ++c) {
      program_cell(array, r, c, targets(r, c), config, amplitude);
    }
  }
  return realize_phi(array, scale);
}

int reprogram_changed_cells(CrossbarArray& array, const LevelGrid& previous_targets,
                            const LevelGrid& new_targets, const ProgramConfig& config) {
  if (previous_targets.rows() != new_targets.rows() ||
      previous_targets.cols() != new_targets.cols() || new_targets.rows() != array.rows() ||
      new_targets.cols() != array.cols()) {
    throw std::invalid_argument("reprogram_changed_cells: grid dimensions disagree");
  }
  double amplitude = array.switching_model().amplitude_for(config.per_pulse_probability);
  int touched = 0;
  for (int r = 0; r < array.rows(); ++r) {
    for (int c = 0; c < array.cols(); ++c) {
      if (previous_targets(r, c) == new_targets(r, c)) continue;
      program_cell(array, r, c, new_targets(r, c), config, amplitude);
      ++touched;
    }
  }
  return touched;
}

MeasurementMatrix realize_phi(CrossbarArray& array, double scale) {
  Eigen::MatrixXd grid = array.read_conductances();
  LevelGrid levels(array.rows(), array.cols());
  for (int r = 0; r < array.rows(); ++r) {
    for (int c = 0; c < array.cols(); ++c) levels(r, c) = nearest_level(grid(r, c));
  }
  return MeasurementMatrix(std::move(levels), scale);
}

Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& phi) {
  Eigen::MatrixXd out = phi;
  for (int c = 0; c < out.cols(); ++c) {
    double norm = out.col(c).norm();
    if (norm > 0.0) out.col(c) /= norm;
  }
  return out;
}

double rip_delta_on_support(const Eigen::MatrixXd& phi_unit_cols, std::span<const int> support) {
  const int k = static_cast<int>(support.size());
  if (k < 1) throw std::invalid_argument("rip_delta_on_support: empty support");
  Eigen::MatrixXd sub(phi_unit_cols.rows(), k);
  for (int i = 0; i < k; ++i) {
    int col = support[i];
    if (col < 0 || col >= phi_unit_cols.cols()) {
      throw std::out_of_range("rip_delta_on_support: support index out of range");
    }
    sub.col(i) = phi_unit_cols.col(col);
  }
  Eigen::MatrixXd gram = sub.transpose() * sub;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  double lo = eig.eigenvalues().minCoeff();
  double hi = eig.eigenvalues().maxCoeff();
  return std::max(hi - 1.0, 1.0 - lo);
}

RipEstimate rip_estimate(const Eigen::MatrixXd& phi, int k, int trials, RngStream& rng) {
  const int n = static_cast<int>(phi.cols());
  if (k < 1 || k > n) throw std::invalid_argument("rip_estimate: k must be in [1, cols]");
  if (trials < 1) throw std::invalid_argument("rip_estimate: trials must be >= 1");
  Eigen::MatrixXd unit = normalize_columns(phi);
  std::vector<int> support(static_cast<std::size_t>(k));
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  double delta = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::fill(used.begin(), used.end(), 0);
    for (int i = 0; i < k;) {
      int idx = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
      if (used[idx]) continue;
      used[idx] = 1;
      support[i++] = idx;
    }
    delta = std::max(delta, rip_delta_on_support(unit, support));
  }
  return {delta, k, trials, 2};
}

RipEstimate rip_estimate(const MeasurementMatrix& phi, int k, int trials, RngStream& rng) {
  return rip_estimate(phi.values(), k, trials, rng);
}

}  // namespace acmca
