#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "acmca/matrix_gen.hpp"
#include "acmca/rng.hpp"

namespace acmca {

/// One time step of a k-sparse signal: exactly |support| nonzeros, zero
/// elsewhere.
struct SparseFrame {
  int n = 0;
  int frame_index = 0;
  std::vector<int> support;      // sorted
  std::vector<double> values;    // aligned with support

  int k() const { return static_cast<int>(support.size()); }
  Eigen::VectorXd dense() const;
};

/// Region-of-interest weighting for the time-varying generator: a contiguous
/// index block holding `in_roi_fraction` of the nonzeros in expectation, with
/// Markov support carry-over between frames.
struct RoiProfile {
  int n = 0;
  std::vector<bool> mask;        // true inside the RoI
  double in_roi_fraction = 0.7;
  double persistence = 0.9;

  static RoiProfile contiguous(int n, double roi_fraction = 0.10, int start = 0,
                               double in_roi_fraction = 0.7, double persistence = 0.9);
  int roi_size() const;
};

/// Draws the next frame. Each index of the previous support survives with
/// probability `persistence`; replacements land inside the RoI with
/// probability `in_roi_fraction` (uniform over the free indices of the chosen
/// region); values on the final support are standard normal.
SparseFrame generate_frame(const SparseFrame* prev, const RoiProfile& roi, int k, RngStream& rng);

struct Measurements {
  Eigen::VectorXd y;
  double noise_sigma = 0.0;
};

enum class SamplePath { IdealMatmul, Crossbar };

/// y = Phi x (+ white Gaussian noise when noise_sigma > 0). Both paths
/// evaluate the same differential-readout arithmetic
///   y_m = scale * (sum_n G[m][n] x_n - G_ref sum_n x_n)
/// so they agree bit for bit with noise off; the Crossbar path additionally
/// routes the conductance sums through crossbar.vmm, charging VMM energy.
Measurements sample(const MeasurementMatrix& phi, const SparseFrame& x, double noise_sigma,
                    RngStream* rng, SamplePath via, CrossbarArray* array = nullptr);

}  // namespace acmca
