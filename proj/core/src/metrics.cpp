#include "acmca/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace acmca {

namespace {

// Returns {error_sq, truth_sq} on the (optionally restricted) indices.
std::pair<double, double> frame_ratio_parts(const SparseFrame& truth,
                                            const Eigen::VectorXd& estimate,
                                            const std::vector<bool>* mask) {
  if (estimate.size() != truth.n) throw std::invalid_argument("tnmse: estimate length mismatch");
  if (mask != nullptr && static_cast<int>(mask->size()) != truth.n) {
    throw std::invalid_argument("tnmse: mask length mismatch");
  }
  Eigen::VectorXd x = truth.dense();
  double err_sq = 0.0;
  double ref_sq = 0.0;
  for (int i = 0; i < truth.n; ++i) {
    if (mask != nullptr && !(*mask)[static_cast<std::size_t>(i)]) continue;
    double d = estimate[i] - x[i];
    err_sq += d * d;
    ref_sq += x[i] * x[i];
  }
  return {err_sq, ref_sq};
}

double ratios_to_db(double ratio_sum, int used) {
  if (used < 1) throw std::domain_error("tnmse: every frame was skipped, metric undefined");
  double mean = ratio_sum / used;
  if (mean <= 0.0) return kTnmseFloorDb;
  return std::max(10.0 * std::log10(mean), kTnmseFloorDb);
}

}  // namespace

void TnmseAccumulator::add(const SparseFrame& truth, const Eigen::VectorXd& estimate) {
  auto [err_sq, ref_sq] = frame_ratio_parts(truth, estimate, mask_);
  if (ref_sq == 0.0) {
    ++skipped_;
    return;
  }
  ratio_sum_ += err_sq / ref_sq;
  ++used_;
}

double TnmseAccumulator::dB() const { return ratios_to_db(ratio_sum_, used_); }

TnmseResult tnmse(const std::vector<SparseFrame>& truth,
                  const std::vector<Eigen::VectorXd>& estimates,
                  const std::vector<bool>* restrict_mask) {
  if (truth.size() != estimates.size() || truth.empty()) {
    throw std::invalid_argument("tnmse: truth and estimate sequences must match and be nonempty");
  }
  TnmseAccumulator acc(restrict_mask);
  for (std::size_t t = 0; t < truth.size(); ++t) acc.add(truth[t], estimates[t]);
  TnmseResult out;
  out.frames_used = acc.frames_used();
  out.frames_skipped = acc.frames_skipped();
  out.dB = acc.dB();
  return out;
}

}  // namespace acmca
