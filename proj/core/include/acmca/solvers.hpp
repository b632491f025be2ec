#pragma once

#include <Eigen/Dense>

#include "acmca/crossbar.hpp"
#include "acmca/matrix_gen.hpp"

namespace acmca {

struct Reconstruction {
  Eigen::VectorXd x_hat;
  int iterations = 0;
  double residual_norm = 0.0;  // ||y - Phi x_hat||_2, recomputed at return
  bool converged = true;
  bool ls_fallback = false;    // OMP refit fell back to a pseudo-inverse
};

struct BpOptions {
  double tol = 1e-6;
  int max_iter = 2000;
  double rho = 1.0;
  bool adapt_rho = true;  // residual balancing
};

/// Basis pursuit (min ||x||_1 s.t. Phi x = y) via alternating-direction
/// augmented-Lagrangian splitting. The x-step projects onto the constraint
/// set through a cached factorization of Phi Phi^T, so repeated solves
/// against one matrix are cheap, and the dual/split state can be carried
/// between solves to warm-start slowly varying frames.
class BpSolver {
 public:
  explicit BpSolver(const Eigen::MatrixXd& phi, BpOptions options = {});

  /// Fresh solve (warm state cleared first).
  Reconstruction solve(const Eigen::VectorXd& y);

  /// Solve continuing from the previous split/dual variables.
  Reconstruction solve_warm(const Eigen::VectorXd& y);

  /// Swaps in a new matrix with the same column count, refactoring the
  /// constraint projection but keeping the warm-start state.
  void update_matrix(const Eigen::MatrixXd& phi);

  void reset_warm_state();
  const Eigen::MatrixXd& phi() const { return phi_; }

 private:
  Reconstruction run(const Eigen::VectorXd& y);

  Eigen::MatrixXd phi_;
  Eigen::LDLT<Eigen::MatrixXd> gram_ldlt_;  // factorization of Phi Phi^T (+ ridge if needed)
  BpOptions options_;
  Eigen::VectorXd z_, u_;
  double rho_ = 1.0;
  bool has_warm_ = false;
};

/// One-shot convenience wrapper.
Reconstruction reconstruct_bp(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                              double tol = 1e-6, int max_iter = 2000);

enum class AtomSelect { Scan, CrossbarWta };

/// Orthogonal matching pursuit: k greedy iterations of atom selection by
/// argmax |Phi^T r| with a least-squares refit on the selected support.
Reconstruction reconstruct_omp(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, int k);

/// OMP over a realized matrix. With AtomSelect::CrossbarWta the correlation
/// Phi^T r is evaluated on a transposed crossbar programming: a VMM against
/// the residual, the differential-reference correction, then winner-takes-all
/// over the magnitudes. Rows of the transposed array for already-selected
/// atoms are power-gated so they cannot win again.
Reconstruction reconstruct_omp(const MeasurementMatrix& phi, const Eigen::VectorXd& y, int k,
                               AtomSelect select, CrossbarArray* transposed = nullptr);

}  // namespace acmca
