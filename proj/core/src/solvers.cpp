#include "acmca/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace acmca {

namespace {

double soft_threshold(double v, double kappa) {
  if (v > kappa) return v - kappa;
  if (v < -kappa) return v + kappa;
  return 0.0;
}

}  // namespace

BpSolver::BpSolver(const Eigen::MatrixXd& phi, BpOptions options)
    : options_(options), rho_(options.rho) {
  if (options_.tol <= 0.0 || options_.max_iter < 1 || options_.rho <= 0.0) {
    throw std::invalid_argument("BpSolver: tol, max_iter and rho must be positive");
  }
  update_matrix(phi);
  reset_warm_state();
}

void BpSolver::update_matrix(const Eigen::MatrixXd& phi) {
  if (phi.size() == 0 || phi.norm() == 0.0) {
    throw std::invalid_argument("BpSolver: matrix must be nonzero");
  }
  if (phi_.size() != 0 && phi.cols() != phi_.cols()) {
    throw std::invalid_argument("BpSolver: column count must not change");
  }
  phi_ = phi;
  Eigen::MatrixXd gram = phi_ * phi_.transpose();
  gram_ldlt_.compute(gram);
  if (gram_ldlt_.info() != Eigen::Success || !gram_ldlt_.isPositive()) {
    double ridge = 1e-12 * std::max(1.0, gram.trace() / gram.rows());
    gram.diagonal().array() += ridge;
    gram_ldlt_.compute(gram);
  }
}

void BpSolver::reset_warm_state() {
  z_ = Eigen::VectorXd::Zero(phi_.cols());
  u_ = Eigen::VectorXd::Zero(phi_.cols());
  rho_ = options_.rho;
  has_warm_ = false;
}

Reconstruction BpSolver::solve(const Eigen::VectorXd& y) {
  reset_warm_state();
  return run(y);
}

Reconstruction BpSolver::solve_warm(const Eigen::VectorXd& y) { return run(y); }

Reconstruction BpSolver::run(const Eigen::VectorXd& y) {
  if (y.size() != phi_.rows()) throw std::invalid_argument("BpSolver: y length mismatch");
  const double y_norm = y.norm();
  const double tol = options_.tol;

  // Feasibility-projection split: x = P(z - u) + q with P the projector onto
  // the null space of Phi and q the minimum-norm solution of Phi x = y.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(phi_.cols());
  Eigen::VectorXd z_prev;
  int iter = 0;
  bool converged = false;
  for (iter = 1; iter <= options_.max_iter; ++iter) {
    Eigen::VectorXd v = z_ - u_;
    x = v - phi_.transpose() * gram_ldlt_.solve(phi_ * v - y);
    z_prev = z_;
    z_ = (x + u_).unaryExpr([kappa = 1.0 / rho_](double t) { return soft_threshold(t, kappa); });
    u_ += x - z_;

    double primal = (x - z_).norm();
    double dual = rho_ * (z_ - z_prev).norm();
    double scale = std::max({1.0, x.norm(), z_.norm()});
    double feas = (phi_ * z_ - y).norm();
    if (feas <= tol * std::max(y_norm, 1e-30) && primal <= tol * scale && dual <= tol * scale) {
      converged = true;
      break;
    }
    if (options_.adapt_rho && iter % 10 == 0) {
      if (primal > 10.0 * dual && rho_ < 1e6) {
        rho_ *= 2.0;
        u_ /= 2.0;
      } else if (dual > 10.0 * primal && rho_ > 1e-6) {
        rho_ /= 2.0;
        u_ *= 2.0;
      }
    }
  }
  has_warm_ = true;

  Reconstruction rec;
  rec.x_hat = z_;
  rec.iterations = std::min(iter, options_.max_iter);
  rec.converged = converged;
  rec.residual_norm = (y - phi_ * z_).norm();
  return rec;
}

Reconstruction reconstruct_bp(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, double tol,
                              int max_iter) {
  BpOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  BpSolver solver(phi, options);
  return solver.solve(y);
}

namespace {

struct RefitResult {
  Eigen::VectorXd coeffs;
  bool fallback = false;
};

RefitResult least_squares_on_support(const Eigen::MatrixXd& phi, const std::vector<int>& support,
                                     const Eigen::VectorXd& y) {
  Eigen::MatrixXd sub(phi.rows(), static_cast<int>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) sub.col(static_cast<int>(i)) = phi.col(support[i]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  RefitResult out;
  if (qr.rank() < static_cast<Eigen::Index>(support.size())) {
    out.coeffs = sub.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
    out.fallback = true;
  } else {
    out.coeffs = qr.solve(y);
  }
  return out;
}

Reconstruction omp_core(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, int k,
                        const std::function<int(const Eigen::VectorXd& residual,
                                                const std::vector<char>& selected)>& pick_atom) {
  if (k < 1) throw std::invalid_argument("reconstruct_omp: k must be >= 1");
  if (k > phi.cols()) throw std::invalid_argument("reconstruct_omp: k exceeds column count");
  if (y.size() != phi.rows()) throw std::invalid_argument("reconstruct_omp: y length mismatch");

  std::vector<int> support;
  std::vector<char> selected(static_cast<std::size_t>(phi.cols()), 0);
  Eigen::VectorXd residual = y;
  Reconstruction rec;
  rec.x_hat = Eigen::VectorXd::Zero(phi.cols());
  RefitResult refit;
  for (int it = 0; it < k; ++it) {
    if (residual.norm() == 0.0) break;
    int atom = pick_atom(residual, selected);
    support.push_back(atom);
    selected[static_cast<std::size_t>(atom)] = 1;
    refit = least_squares_on_support(phi, support, y);
    rec.ls_fallback = rec.ls_fallback || refit.fallback;
    residual = y;
    for (std::size_t i = 0; i < support.size(); ++i) {
      residual -= refit.coeffs[static_cast<Eigen::Index>(i)] * phi.col(support[i]);
    }
    rec.iterations = it + 1;
  }
  for (std::size_t i = 0; i < support.size(); ++i) {
    rec.x_hat[support[i]] = refit.coeffs[static_cast<Eigen::Index>(i)];
  }
  rec.residual_norm = residual.norm();
  return rec;
}

}  // namespace

Reconstruction reconstruct_omp(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, int k) {
  return omp_core(phi, y, k,
                  [&phi](const Eigen::VectorXd& residual, const std::vector<char>& selected) {
                    int best = -1;
                    double best_val = -1.0;
                    for (int c = 0; c < phi.cols(); ++c) {
                      if (selected[static_cast<std::size_t>(c)]) continue;
                      double v = std::abs(phi.col(c).dot(residual));
                      if (v > best_val) {
                        best_val = v;
                        best = c;
                      }
                    }
                    return best;
                  });
}

Reconstruction reconstruct_omp(const MeasurementMatrix& phi, const Eigen::VectorXd& y, int k,
                               AtomSelect select, CrossbarArray* transposed) {
  if (select == AtomSelect::Scan) return reconstruct_omp(phi.values(), y, k);
  if (transposed == nullptr) {
    throw std::invalid_argument("reconstruct_omp: CrossbarWta needs a transposed array");
  }
  if (transposed->rows() != phi.cols() || transposed->cols() != phi.rows()) {
    throw std::invalid_argument("reconstruct_omp: transposed array dimensions do not match");
  }
  const double g_ref = conductance_for_level(kReferenceLevel);
  const double scale = phi.scale();
  return omp_core(
      phi.values(), y, k,
      [&](const Eigen::VectorXd& residual, const std::vector<char>& selected) {
        std::vector<bool> row_mask(static_cast<std::size_t>(transposed->rows()));
        for (int r = 0; r < transposed->rows(); ++r) {
          row_mask[static_cast<std::size_t>(r)] = !selected[static_cast<std::size_t>(r)];
        }
        std::vector<bool> col_mask(static_cast<std::size_t>(transposed->cols()), true);
        transposed->set_enable(row_mask, col_mask);
        VmmResult raw = transposed->vmm(residual);
        double residual_sum = 0.0;
        for (int c = 0; c < residual.size(); ++c) residual_sum += residual[c];
        VmmResult scored;
        scored.currents_A = Eigen::VectorXd::Zero(transposed->rows());
        scored.row_enabled = raw.row_enabled;
        for (int r = 0; r < transposed->rows(); ++r) {
          if (!raw.row_enabled[static_cast<std::size_t>(r)]) continue;
          scored.currents_A[r] = std::abs(scale * (raw.currents_A[r] - g_ref * residual_sum));
        }
        return wta(scored);
      });
}

}  // namespace acmca
