#include "acmca/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acmca {

void EnergyBudget::validate() const {
  if (!(e_critical_pJ > 0.0) || !(e_critical_pJ < e_budget_pJ)) {
    throw std::invalid_argument("EnergyBudget: require 0 < e_critical < e_budget");
  }
}

namespace {
UpdateTier tier_for(double gamma, const EnergyBudget& budget) {
  if (std::isinf(gamma)) return UpdateTier::EveryIteration;  // unbounded allowance
  if (gamma > budget.e_budget_pJ) return UpdateTier::EveryIteration;
  if (gamma > budget.e_critical_pJ) return UpdateTier::ReducedU1;
  return UpdateTier::ReducedU2;
}
}  // namespace

GammaState update_gamma(GammaState state, const EnergyBudget& budget, double consumed_total_pJ,
                        double last_iteration_pJ, int iterations_remaining) {
  budget.validate();
  if (iterations_remaining < 1) {
    throw std::invalid_argument("update_gamma: iterations_remaining must be >= 1");
  }
  double gamma;
  if (budget.total_budget_pJ.has_value()) {
    gamma = (*budget.total_budget_pJ - consumed_total_pJ) / iterations_remaining;
  } else {
    gamma = 2.0 * budget.e_budget_pJ - last_iteration_pJ;
  }
  gamma = std::max(gamma, 0.0);
  state.gamma_pJ = gamma;
  state.tier = tier_for(gamma, budget);
  return state;
}

bool should_update(const GammaState& state, int iteration) {
  if (iteration < 0) throw std::invalid_argument("should_update: iteration must be >= 0");
  switch (state.tier) {
    case UpdateTier::EveryIteration:
      return true;
    case UpdateTier::ReducedU1:
      return iteration % state.u1 == 0;
    case UpdateTier::ReducedU2:
      return iteration % state.u2 == 0;
  }
  return false;
}

RoiEstimate make_roi_estimate(int n, double ema_alpha, const std::vector<bool>* init_mask) {
  if (n < 1) throw std::invalid_argument("make_roi_estimate: n must be >= 1");
  if (init_mask != nullptr && static_cast<int>(init_mask->size()) != n) {
    throw std::invalid_argument("make_roi_estimate: mask length mismatch");
  }
  RoiEstimate est;
  est.ema_alpha = ema_alpha;
  est.activity = Eigen::VectorXd::Zero(n);
  if (init_mask != nullptr) {
    for (int i = 0; i < n; ++i) {
      est.activity[i] = (*init_mask)[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    }
  }
  return est;
}

RoiEstimate update_roi(RoiEstimate est, const Eigen::VectorXd& x_hat, double support_threshold) {
  if (x_hat.size() != est.activity.size()) {
    throw std::invalid_argument("update_roi: estimate length mismatch");
  }
  if (!(support_threshold > 0.0)) {
    throw std::invalid_argument("update_roi: support threshold must be positive");
  }
  double alpha = est.ema_alpha;
  for (int i = 0; i < est.activity.size(); ++i) {
    double indicator = std::abs(x_hat[i]) > support_threshold ? 1.0 : 0.0;
    est.activity[i] = (1.0 - alpha) * est.activity[i] + alpha * indicator;
  }
  return est;
}

Eigen::VectorXd weights_from_activity(const Eigen::VectorXd& activity, double boost) {
  Eigen::VectorXd w = (0.5 + boost * activity.array()).matrix();
  double mean = w.mean();
  if (mean > 0.0) w /= mean;
  return w;
}

AdaptResult adapt_matrix(CrossbarArray& array, const RoiEstimate& est, MatrixKind kind,
                         const Eigen::MatrixXd& base_uniforms, const LevelGrid& previous_targets,
                         const ProgramConfig& config, double weight_boost, double scale) {
  if (est.activity.size() != array.cols()) {
    throw std::invalid_argument("adapt_matrix: activity length does not match array columns");
  }
  MatrixSpec spec{kind, array.rows(), array.cols(), weights_from_activity(est.activity, weight_boost)};
  LevelGrid targets = target_levels_from(base_uniforms, spec);
  AdaptResult out;
  out.cells_touched = reprogram_changed_cells(array, previous_targets, targets, config);
  out.targets = std::move(targets);
  out.phi = realize_phi(array, scale);
  return out;
}

}  // namespace acmca
