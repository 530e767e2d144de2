#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iqclearn/gram.hpp"

// One-class SVM over dissipativity parameters M with block-definiteness
// constraints:
//   min 1/2 ||M||_F^2 - rho + 1/(nu m) sum xi_i
//   s.t. <M, Gamma_i> >= rho - xi_i, xi_i >= 0,
//        M = blockdiag(M_ww, M_vv), -M_ww >= eps_w I, M_vv >= eps_v I.
namespace iqclearn::ocsvm {

struct DissipativityParams {
  Eigen::MatrixXd M_ww;  // eigenvalues <= -eps_w
  Eigen::MatrixXd M_vv;  // eigenvalues >= eps_v

  Eigen::MatrixXd full() const;  // blockdiag(M_ww, M_vv)
  double inner(const gram::GramMatrix& g) const;
};

struct SolverConfig {
  double nu = 0.01;  // in (0, 1) strictly
  double eps_w = 1e-6;
  double eps_v = 1e-6;
  bool fix_output_block = true;  // scalar M_ww := -1 (requires n_zw == 1)
  int max_iters = 100000;
  double tol_abs = 1e-8;   // scaled by sqrt(problem size)
  double tol_rel = 1e-10;
  double penalty = 1.0;    // initial ADMM penalty, adapted online

  void validate() const;
};

struct Solution {
  DissipativityParams M;
  double rho = 0.0;
  std::vector<double> xi;        // per-sample violations, >= 0
  std::vector<double> rho_star;  // effective margins rho - xi_i
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
};

// Consensus ADMM: the (M, rho, xi) quadratic-plus-linear subproblem is
// solved in closed form (xi eliminated analytically), cone blocks handled
// by project_block_psd, slack nonnegativity by clipping. Throws on empty
// data or dimension mismatch; non-convergence yields converged=false with
// residuals attached.
Solution solve(const std::vector<gram::GramMatrix>& grams,
               const SolverConfig& config);

enum class ConeSign { kPositive, kNegative };

// Eigenvalue clamp: >= eps (positive) or <= -eps (negative). Idempotent.
Eigen::MatrixXd project_block_psd(const Eigen::MatrixXd& S, double eps,
                                  ConeSign sign);

// Independent small-instance oracle (n_z <= 5, m <= 50): accelerated
// projected gradient on the Lagrangian dual over the capped simplex
// {0 <= alpha <= 1/(nu m), sum alpha = 1}, certified by duality gap and
// complementarity residuals <= 1e-6 scale.
Solution oracle_solve(const std::vector<gram::GramMatrix>& grams,
                      const SolverConfig& config);

struct ViolationStats {
  double mean_violation = 0.0;  // sum xi_i / m
  int violating_count = 0;
  double rho = 0.0;
  double rho_star_min = 0.0;
};

ViolationStats margin_violation_stats(const Solution& sol);

// Fraction of holdout Gram matrices with <M, Gamma> < rho_star - eps.
double holdout_violation_rate(const DissipativityParams& M, double rho_star,
                              const std::vector<gram::GramMatrix>& holdout,
                              double eps);

}  // namespace iqclearn::ocsvm
