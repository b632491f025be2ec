#include "acmca/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acmca {

Eigen::VectorXd SparseFrame::dense() const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < support.size(); ++i) x[support[i]] = values[i];
  return x;
}

RoiProfile RoiProfile::contiguous(int n, double roi_fraction, int start, double in_roi_fraction,
                                  double persistence) {
  if (n < 1) throw std::invalid_argument("RoiProfile: n must be >= 1");
  int len = static_cast<int>(std::lround(roi_fraction * n));
  len = std::clamp(len, 0, n);
  if (start < 0 || start + len > n) throw std::invalid_argument("RoiProfile: block out of range");
  RoiProfile roi;
  roi.n = n;
  roi.mask.assign(static_cast<std::size_t>(n), false);
  for (int i = start; i < start + len; ++i) roi.mask[static_cast<std::size_t>(i)] = true;
  roi.in_roi_fraction = in_roi_fraction;
  roi.persistence = persistence;
  return roi;
}

int RoiProfile::roi_size() const {
  int count = 0;
  for (bool b : mask) count += b ? 1 : 0;
  return count;
}

SparseFrame generate_frame(const SparseFrame* prev, const RoiProfile& roi, int k, RngStream& rng) {
  const int n = roi.n;
  if (k < 0 || k > n) throw std::invalid_argument("generate_frame: k must be in [0, n]");

  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  std::vector<int> support;
  support.reserve(static_cast<std::size_t>(k));

  if (prev != nullptr) {
    if (prev->n != n) throw std::invalid_argument("generate_frame: prev frame length mismatch");
    for (int idx : prev->support) {
      if (static_cast<int>(support.size()) >= k) break;
      if (rng.uniform01() < roi.persistence) {
        support.push_back(idx);
        taken[static_cast<std::size_t>(idx)] = 1;
      }
    }
  }

  std::vector<int> free_in, free_out;
  while (static_cast<int>(support.size()) < k) {
    free_in.clear();
    free_out.clear();
    for (int i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      (roi.mask[static_cast<std::size_t>(i)] ? free_in : free_out).push_back(i);
    }
    bool want_roi = rng.uniform01() < roi.in_roi_fraction;
    const std::vector<int>& pool = want_roi ? (free_in.empty() ? free_out : free_in)
                                            : (free_out.empty() ? free_in : free_out);
    int idx = pool[rng.uniform_below(pool.size())];
    support.push_back(idx);
    taken[static_cast<std::size_t>(idx)] = 1;
  }

  std::sort(support.begin(), support.end());
  SparseFrame frame;
  frame.n = n;
  frame.frame_index = prev ? prev->frame_index + 1 : 0;
  frame.support = std::move(support);
  frame.values.resize(frame.support.size());
  for (double& v : frame.values) v = rng.normal();
  return frame;
}

Measurements sample(const MeasurementMatrix& phi, const SparseFrame& x, double noise_sigma,
                    RngStream* rng, SamplePath via, CrossbarArray* array) {
  if (x.n != phi.cols()) throw std::invalid_argument("sample: frame length does not match matrix");
  const int m = phi.rows();
  const int n = phi.cols();
  Eigen::VectorXd xd = x.dense();

  double input_sum = 0.0;
  for (int c = 0; c < n; ++c) input_sum += xd[c];
  const double g_ref = conductance_for_level(kReferenceLevel);

  Eigen::VectorXd currents(m);
  if (via == SamplePath::Crossbar) {
    if (array == nullptr) throw std::invalid_argument("sample: crossbar path needs an array");
    if (array->rows() != m || array->cols() != n) {
      throw std::invalid_argument("sample: array dimensions do not match matrix");
    }
    currents = array->vmm(xd).currents_A;
  } else {
    const LevelGrid& levels = phi.source_levels();
    for (int r = 0; r < m; ++r) {
      double acc = 0.0;
      for (int c = 0; c < n; ++c) acc += conductance_for_level(levels(r, c)) * xd[c];
      currents[r] = acc;
    }
  }

  Measurements out;
  out.noise_sigma = noise_sigma;
  out.y.resize(m);
  for (int r = 0; r < m; ++r) out.y[r] = phi.scale() * (currents[r] - g_ref * input_sum);
  if (noise_sigma > 0.0) {
    if (rng == nullptr) throw std::invalid_argument("sample: noise requires an rng stream");
    for (int r = 0; r < m; ++r) out.y[r] += noise_sigma * rng->normal();
  }
  return out;
}

}  // namespace acmca
