#pragma once

#include <Eigen/Dense>
#include <optional>

#include "acmca/crossbar.hpp"
#include "acmca/matrix_gen.hpp"

namespace acmca {

struct EnergyBudget {
  double e_budget_pJ = 0.0;    // per-iteration allowance
  double e_critical_pJ = 0.0;  // must be < e_budget
  std::optional<double> total_budget_pJ;

  void validate() const;
};

enum class UpdateTier { EveryIteration, ReducedU1, ReducedU2 };

/// gamma is the projected per-iteration energy allowance; its tier sets how
/// often the measurement matrix may be reprogrammed. Values at a threshold
/// fall into the lower-frequency tier.
struct GammaState {
  double gamma_pJ = 0.0;
  UpdateTier tier = UpdateTier::EveryIteration;
  int u1 = 5;
  int u2 = 20;
};

/// With a total budget: gamma = remaining / iterations_remaining (clamped at
/// 0). Without one: gamma = 2 * e_budget - energy spent last iteration. The
/// tier follows from gamma against the two thresholds.
GammaState update_gamma(GammaState state, const EnergyBudget& budget, double consumed_total_pJ,
                        double last_iteration_pJ, int iterations_remaining);

bool should_update(const GammaState& state, int iteration);

/// Exponential-moving-average surrogate for the posterior support activity.
struct RoiEstimate {
  Eigen::VectorXd activity;  // entries in [0, 1]
  double ema_alpha = 0.3;
};

RoiEstimate make_roi_estimate(int n, double ema_alpha = 0.3,
                              const std::vector<bool>* init_mask = nullptr);

/// activity <- (1 - alpha) * activity + alpha * [|x_hat| > threshold].
RoiEstimate update_roi(RoiEstimate est, const Eigen::VectorXd& x_hat, double support_threshold);

/// Sampling weights from activity: normalize(0.5 + boost * activity) to mean
/// 1. boost = 0 recovers uniform weights.
Eigen::VectorXd weights_from_activity(const Eigen::VectorXd& activity, double boost = 1.0);

struct AdaptResult {
  MeasurementMatrix phi;
  LevelGrid targets;
  int cells_touched = 0;
};

/// Recomputes target levels from the estimated activity (deterministically,
/// through the frozen uniform grid), reprograms only the cells whose target
/// changed, and returns the re-realized matrix. Unchanged activity therefore
/// touches zero cells and costs zero programming energy.
AdaptResult adapt_matrix(CrossbarArray& array, const RoiEstimate& est, MatrixKind kind,
                         const Eigen::MatrixXd& base_uniforms, const LevelGrid& previous_targets,
                         const ProgramConfig& config = {}, double weight_boost = 1.0,
                         double scale = kDefaultPhiScale);

}  // namespace acmca
