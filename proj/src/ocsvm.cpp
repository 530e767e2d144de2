#include "iqclearn/ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace iqclearn::ocsvm {

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Symmetric vectorization with sqrt(2)-scaled off-diagonals, so svec inner
// products equal Frobenius inner products.
int svec_dim(int n) { return n * (n + 1) / 2; }

Eigen::VectorXd svec(const Eigen::MatrixXd& S) {
  const int n = static_cast<int>(S.rows());
  Eigen::VectorXd v(svec_dim(n));
  int k = 0;
  for (int i = 0; i < n; ++i) {
    v(k++) = S(i, i);
    for (int j = i + 1; j < n; ++j) v(k++) = kSqrt2 * S(i, j);
  }
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v, int n) {
  Eigen::MatrixXd S(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    S(i, i) = v(k++);
    for (int j = i + 1; j < n; ++j) {
      S(i, j) = v(k) / kSqrt2;
      S(j, i) = v(k) / kSqrt2;
      ++k;
    }
  }
  return S;
}

struct ProblemData {
  int n_zw = 0;
  int n_zv = 0;
  int m = 0;
  bool fix_ww = false;
  int p_ww = 0;  // svec dims of the variable blocks (0 when fixed)
  int p_vv = 0;
  Eigen::MatrixXd G;   // p x m, columns svec of variable Gamma blocks
  Eigen::VectorXd b;   // constraint offsets from the fixed block
};

ProblemData build_problem(const std::vector<gram::GramMatrix>& grams,
                          const SolverConfig& config) {
  config.validate();
  if (grams.empty()) throw std::invalid_argument("ocsvm: empty gram list");
  ProblemData pd;
  pd.n_zw = grams[0].n_zw;
  pd.n_zv = grams[0].n_zv;
  pd.m = static_cast<int>(grams.size());
  for (const auto& g : grams) {
    if (g.n_zw != pd.n_zw || g.n_zv != pd.n_zv ||
        g.gamma.rows() != pd.n_zw + pd.n_zv)
      throw std::invalid_argument("ocsvm: gram dimension mismatch");
  }
  if (pd.n_zw < 1 || pd.n_zv < 1)
    throw std::invalid_argument("ocsvm: need at least one channel per block");
  pd.fix_ww = config.fix_output_block;
  if (pd.fix_ww && pd.n_zw != 1)
    throw std::invalid_argument(
        "ocsvm: fix_output_block requires a scalar output block (n_zw == 1)");
  pd.p_ww = pd.fix_ww ? 0 : svec_dim(pd.n_zw);
  pd.p_vv = svec_dim(pd.n_zv);
  const int p = pd.p_ww + pd.p_vv;
  pd.G.resize(p, pd.m);
  pd.b = Eigen::VectorXd::Zero(pd.m);
  for (int i = 0; i < pd.m; ++i) {
    if (pd.fix_ww) {
      pd.G.col(i) = svec(grams[i].vv());
      pd.b(i) = -grams[i].gamma(0, 0);  // M_ww = -1 contribution
    } else {
      pd.G.col(i).head(pd.p_ww) = svec(grams[i].ww());
      pd.G.col(i).tail(pd.p_vv) = svec(grams[i].vv());
    }
  }
  return pd;
}

DissipativityParams params_from_y(const ProblemData& pd,
                                  const SolverConfig& config,
                                  const Eigen::VectorXd& y, bool project) {
  DissipativityParams M;
  if (pd.fix_ww) {
    M.M_ww = -Eigen::MatrixXd::Ones(1, 1);
    M.M_vv = smat(y, pd.n_zv);
  } else {
    M.M_ww = smat(y.head(pd.p_ww), pd.n_zw);
    M.M_vv = smat(y.tail(pd.p_vv), pd.n_zv);
  }
  if (project) {
    if (!pd.fix_ww)
      M.M_ww = project_block_psd(M.M_ww, config.eps_w, ConeSign::kNegative);
    M.M_vv = project_block_psd(M.M_vv, config.eps_v, ConeSign::kPositive);
  }
  return M;
}

Eigen::VectorXd project_cone_svec(const ProblemData& pd,
                                  const SolverConfig& config,
                                  const Eigen::VectorXd& y) {
  DissipativityParams M = params_from_y(pd, config, y, true);
  if (pd.fix_ww) return svec(M.M_vv);
  Eigen::VectorXd out(pd.p_ww + pd.p_vv);
  out.head(pd.p_ww) = svec(M.M_ww);
  out.tail(pd.p_vv) = svec(M.M_vv);
  return out;
}

// Given M fixed, (rho, xi) optimum: rho is the (floor(nu m)+1)-th smallest
// constraint value, xi the hinge slacks.
void polish_rho_xi(const ProblemData& pd, const SolverConfig& config,
                   const std::vector<gram::GramMatrix>& grams, Solution* sol) {
  const int m = pd.m;
  std::vector<double> s(m);
  for (int i = 0; i < m; ++i) s[i] = sol->M.inner(grams[i]);
  std::vector<double> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  const int k = std::min<int>(
      m, static_cast<int>(std::floor(config.nu * m)) + 1);
  sol->rho = sorted[k - 1];
  sol->xi.resize(m);
  sol->rho_star.resize(m);
  double xi_sum = 0.0;
  for (int i = 0; i < m; ++i) {
    sol->xi[i] = std::max(0.0, sol->rho - s[i]);
    sol->rho_star[i] = sol->rho - sol->xi[i];
    xi_sum += sol->xi[i];
  }
  const double norm2 =
      sol->M.M_ww.squaredNorm() + sol->M.M_vv.squaredNorm();
  sol->objective =
      0.5 * norm2 - sol->rho + xi_sum / (config.nu * m);
}

}  // namespace

Eigen::MatrixXd DissipativityParams::full() const {
  const int nw = static_cast<int>(M_ww.rows());
  const int nv = static_cast<int>(M_vv.rows());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nw + nv, nw + nv);
  M.topLeftCorner(nw, nw) = M_ww;
  M.bottomRightCorner(nv, nv) = M_vv;
  return M;
}

double DissipativityParams::inner(const gram::GramMatrix& g) const {
  return (M_ww.array() * g.ww().array()).sum() +
         (M_vv.array() * g.vv().array()).sum();
}

void SolverConfig::validate() const {
  if (!(nu > 0.0 && nu < 1.0))
    throw std::invalid_argument("SolverConfig: nu must lie strictly in (0,1)");
  if (eps_w < 0.0 || eps_v < 0.0)
    throw std::invalid_argument("SolverConfig: negative cone floor");
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters < 1");
}

Eigen::MatrixXd project_block_psd(const Eigen::MatrixXd& S, double eps,
                                  ConeSign sign) {
  Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) {
    lam(i) = sign == ConeSign::kPositive ? std::max(lam(i), eps)
                                         : std::min(lam(i), -eps);
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

Solution solve(const std::vector<gram::GramMatrix>& grams,
               const SolverConfig& config) {
  const ProblemData pd = build_problem(grams, config);
  const int p = pd.p_ww + pd.p_vv;
  const int m = pd.m;
  const double inv_num = 1.0 / (config.nu * m);
  const Eigen::VectorXd gsum = pd.G.rowwise().sum();
  const Eigen::MatrixXd GGt = pd.G * pd.G.transpose();

  double sigma = config.penalty;
  auto factorize = [&](double sig) {
    Eigen::MatrixXd H(p + 1, p + 1);
    H.topLeftCorner(p, p) =
        (1.0 + sig) * Eigen::MatrixXd::Identity(p, p) + 0.5 * sig * GGt;
    H.topRightCorner(p, 1) = -0.5 * sig * gsum;
    H.bottomLeftCorner(1, p) = -0.5 * sig * gsum.transpose();
    H(p, p) = 0.5 * sig * m;
    return Eigen::LLT<Eigen::MatrixXd>(H);
  };
  Eigen::LLT<Eigen::MatrixXd> llt = factorize(sigma);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(p);
  double rho = 0.0;
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd zM = Eigen::VectorXd::Zero(p), uM = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd zxi = Eigen::VectorXd::Zero(m),
                  uxi = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd zc = Eigen::VectorXd::Zero(m), uc = Eigen::VectorXd::Zero(m);

  Solution sol;
  int iter = 0;
  for (; iter < config.max_iters; ++iter) {
    // x-step: closed-form quadratic in (y, rho) after eliminating xi.
    const Eigen::VectorXd a = zxi - uxi;
    const Eigen::VectorXd d = zc - uc - pd.b;
    const Eigen::VectorXd h =
        (0.5 * sigma * (a - d)).array() - 0.5 * inv_num;
    Eigen::VectorXd rhs(p + 1);
    rhs.head(p) = sigma * (zM - uM) - pd.G * h;
    rhs(p) = 1.0 + h.sum();
    const Eigen::VectorXd yr = llt.solve(rhs);
    y = yr.head(p);
    rho = yr(p);
    const Eigen::VectorXd g = pd.G.transpose() * y - rho * Eigen::VectorXd::Ones(m);
    xi = 0.5 * (a + d - g).array() - 0.5 * inv_num / sigma;
    const Eigen::VectorXd c = g + pd.b + xi;

    // z-step: cone and nonnegativity projections.
    const Eigen::VectorXd zM_old = zM, zxi_old = zxi, zc_old = zc;
    zM = project_cone_svec(pd, config, y + uM);
    zxi = (xi + uxi).cwiseMax(0.0);
    zc = (c + uc).cwiseMax(0.0);

    uM += y - zM;
    uxi += xi - zxi;
    uc += c - zc;

    const double r_pri = std::sqrt((y - zM).squaredNorm() +
                                   (xi - zxi).squaredNorm() +
                                   (c - zc).squaredNorm());
    const Eigen::VectorXd dzc = zc - zc_old;
    const double s_dual =
        sigma * std::sqrt((zM - zM_old + pd.G * dzc).squaredNorm() +
                          std::pow(dzc.sum(), 2) +
                          (zxi - zxi_old + dzc).squaredNorm());
    sol.primal_residual = r_pri;
    sol.dual_residual = s_dual;

    const double ax_norm = std::sqrt(y.squaredNorm() + xi.squaredNorm() +
                                     c.squaredNorm());
    const double z_norm = std::sqrt(zM.squaredNorm() + zxi.squaredNorm() +
                                    zc.squaredNorm());
    const double eps_pri = std::sqrt(static_cast<double>(p + 2 * m)) *
                               config.tol_abs +
                           config.tol_rel * std::max(ax_norm, z_norm);
    const Eigen::VectorXd atu_y = uM + pd.G * uc;
    const double atu_norm = sigma * std::sqrt(atu_y.squaredNorm() +
                                              std::pow(uc.sum(), 2) +
                                              (uxi + uc).squaredNorm());
    const double eps_dual = std::sqrt(static_cast<double>(p + 1 + m)) *
                                config.tol_abs +
                            config.tol_rel * atu_norm;
    if (r_pri <= eps_pri && s_dual <= eps_dual) {
      sol.converged = true;
      ++iter;
      break;
    }

    // Residual balancing keeps the penalty in a useful range.
    if ((iter + 1) % 10 == 0) {
      if (r_pri > 10.0 * s_dual && sigma < 1e8) {
        sigma *= 2.0;
        uM *= 0.5;
        uxi *= 0.5;
        uc *= 0.5;
        llt = factorize(sigma);
      } else if (s_dual > 10.0 * r_pri && sigma > 1e-8) {
        sigma *= 0.5;
        uM *= 2.0;
        uxi *= 2.0;
        uc *= 2.0;
        llt = factorize(sigma);
      }
    }
  }

  sol.iterations = iter;
  sol.M = params_from_y(pd, config, y, true);
  polish_rho_xi(pd, config, grams, &sol);
  return sol;
}

Solution oracle_solve(const std::vector<gram::GramMatrix>& grams,
                      const SolverConfig& config) {
  const ProblemData pd = build_problem(grams, config);
  if (pd.n_zw + pd.n_zv > 5 || pd.m > 50)
    throw std::invalid_argument(
        "oracle_solve: instance too large (n_z <= 5, m <= 50)");
  const int m = pd.m;
  const double cap = 1.0 / (config.nu * m);

  // Projection onto {0 <= alpha <= cap, sum alpha = 1} by bisection on the
  // shift threshold.
  auto project_capped_simplex = [&](Eigen::VectorXd v) {
    double lo = v.minCoeff() - cap - 1.0, hi = v.maxCoeff() + 1.0;
    for (int it = 0; it < 200; ++it) {
      const double tau = 0.5 * (lo + hi);
      double s = 0.0;
      for (int i = 0; i < m; ++i)
        s += std::clamp(v(i) - tau, 0.0, cap);
      (s > 1.0 ? lo : hi) = tau;
    }
    const double tau = 0.5 * (lo + hi);
    for (int i = 0; i < m; ++i) v(i) = std::clamp(v(i) - tau, 0.0, cap);
    return v;
  };

  // Dual value and gradient at alpha; the projection theorem gives
  // q(alpha) = min_{M in K} 1/2||M||^2 - <M, G(alpha)> with gradient
  // -<M(alpha), Gamma_i> by Danskin.
  auto dual_eval = [&](const Eigen::VectorXd& alpha, Eigen::VectorXd* grad,
                       DissipativityParams* M_out) {
    const Eigen::VectorXd gvec = pd.G * alpha;
    DissipativityParams M = params_from_y(pd, config, gvec, true);
    double q = 0.5 * (M.M_ww.squaredNorm() + M.M_vv.squaredNorm());
    for (int i = 0; i < m; ++i) {
      const double inner_i = M.inner(grams[i]);
      q -= alpha(i) * inner_i;
      if (grad) (*grad)(i) = -inner_i;
    }
    if (M_out) *M_out = M;
    return q;
  };

  // Curvature bound: projections are 1-Lipschitz, so the gradient map is
  // Lipschitz with constant lambda_max of the variable-block Gram kernel.
  const Eigen::MatrixXd Q = pd.G.transpose() * pd.G;
  const double L =
      std::max(1e-12, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q)
                          .eigenvalues()
                          .maxCoeff());
  const double step = 1.0 / L;

  std::mt19937_64 rng(0x1ac0ffeeULL);
  Eigen::VectorXd best_alpha;
  double best_q = -std::numeric_limits<double>::infinity();
  for (int start = 0; start < 3; ++start) {
    Eigen::VectorXd alpha(m);
    if (start == 0) {
      alpha.setConstant(1.0 / m);
    } else {
      for (int i = 0; i < m; ++i)
        alpha(i) = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      alpha /= alpha.sum();
      alpha = project_capped_simplex(alpha);
    }
    // FISTA with function-value restart.
    Eigen::VectorXd x = alpha, x_prev = alpha, v = alpha;
    Eigen::VectorXd grad(m);
    double t = 1.0;
    double q_prev = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200000; ++it) {
      dual_eval(v, &grad, nullptr);
      x_prev = x;
      x = project_capped_simplex(v + step * grad);  // ascent
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      v = x + ((t - 1.0) / t_next) * (x - x_prev);
      t = t_next;
      if ((it + 1) % 200 == 0) {
        const double q = dual_eval(x, nullptr, nullptr);
        if (q < q_prev) {  // restart momentum
          v = x;
          t = 1.0;
        }
        if (std::abs(q - q_prev) <= 1e-14 * (1.0 + std::abs(q))) break;
        q_prev = q;
      }
    }
    const double q = dual_eval(x, nullptr, nullptr);
    if (q > best_q) {
      best_q = q;
      best_alpha = x;
    }
  }

  Solution sol;
  DissipativityParams M;
  Eigen::VectorXd grad(m);
  dual_eval(best_alpha, &grad, &M);
  sol.M = M;
  polish_rho_xi(pd, config, grams, &sol);
  sol.converged = true;
  sol.iterations = 0;

  // KKT certificate: normalized duality gap and complementarity residuals.
  const double gap =
      std::abs(sol.objective - best_q) / (1.0 + std::abs(sol.objective));
  double compl_res = 0.0;
  const double scale = 1.0 + pd.G.colwise().norm().maxCoeff();
  for (int i = 0; i < m; ++i) {
    const double slack = sol.M.inner(grams[i]) - sol.rho + sol.xi[i];
    compl_res = std::max(compl_res,
                         std::abs(best_alpha(i) * slack) / scale);
    compl_res = std::max(
        compl_res, std::abs((cap - best_alpha(i)) * sol.xi[i]) / scale / cap);
  }
  sol.primal_residual = gap;
  sol.dual_residual = compl_res;
  if (gap > 1e-6 || compl_res > 1e-6) sol.converged = false;
  return sol;
}

ViolationStats margin_violation_stats(const Solution& sol) {
  ViolationStats st;
  st.rho = sol.rho;
  double sum = 0.0;
  double rs_min = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < sol.xi.size(); ++i) {
    sum += sol.xi[i];
    if (sol.xi[i] > 1e-12) ++st.violating_count;
    rs_min = std::min(rs_min, sol.rho_star[i]);
  }
  st.mean_violation = sol.xi.empty() ? 0.0 : sum / sol.xi.size();
  st.rho_star_min = sol.xi.empty() ? sol.rho : rs_min;
  return st;
}

double holdout_violation_rate(const DissipativityParams& M, double rho_star,
                              const std::vector<gram::GramMatrix>& holdout,
                              double eps) {
  if (holdout.empty())
    throw std::invalid_argument("holdout_violation_rate: empty holdout");
  int count = 0;
  for (const auto& g : holdout)
    if (M.inner(g) < rho_star - eps) ++count;
  return static_cast<double>(count) / holdout.size();
}

}  // namespace iqclearn::ocsvm
