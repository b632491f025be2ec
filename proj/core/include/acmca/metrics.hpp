#pragma once

#include <Eigen/Dense>
#include <vector>

#include "acmca/signal.hpp"

namespace acmca {

inline constexpr double kTnmseFloorDb = -120.0;

struct TnmseResult {
  double dB = 0.0;
  int frames_used = 0;
  int frames_skipped = 0;  // zero-norm restricted truth frames
};

/// Time-averaged normalized mean squared error in dB:
///   10 log10( (1/T) sum_t ||(x_hat_t - x_t) | mask||^2 / ||x_t | mask||^2 )
/// with an optional index restriction. Frames whose restricted truth has zero
/// norm are skipped (counted in the result); if every frame is skipped the
/// metric is undefined and a std::domain_error is thrown. Perfect
/// reconstruction reports the -120 dB floor.
TnmseResult tnmse(const std::vector<SparseFrame>& truth,
                  const std::vector<Eigen::VectorXd>& estimates,
                  const std::vector<bool>* restrict_mask = nullptr);

/// Running helper for per-iteration traces: accumulates frame ratios and
/// reports the dB value so far.
class TnmseAccumulator {
 public:
  explicit TnmseAccumulator(const std::vector<bool>* restrict_mask = nullptr)
      : mask_(restrict_mask) {}
  void add(const SparseFrame& truth, const Eigen::VectorXd& estimate);
  double dB() const;
  int frames_used() const { return used_; }
  int frames_skipped() const { return skipped_; }

 private:
  const std::vector<bool>* mask_;
  double ratio_sum_ = 0.0;
  int used_ = 0;
  int skipped_ = 0;
};

}  // namespace acmca
