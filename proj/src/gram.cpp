#include "iqclearn/gram.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace iqclearn::gram {

GramMatrix compute_gram(const std::vector<std::vector<double>>& z, double dt,
                        int n_zw) {
  const int n = static_cast<int>(z.size());
  if (n == 0) throw std::invalid_argument("compute_gram: no channels");
  if (n_zw < 0 || n_zw > n)
    throw std::invalid_argument("compute_gram: bad block split");
  const size_t N = z[0].size();
  if (N < 2) throw std::invalid_argument("compute_gram: need >= 2 samples");
  for (const auto& ch : z) {
    if (ch.size() != N)
      throw std::invalid_argument("compute_gram: ragged channels");
    for (double v : ch)
      if (std::isnan(v))
        throw std::invalid_argument("compute_gram: NaN in feature signal");
  }

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd zk(n);
  for (size_t k = 0; k < N; ++k) {
    for (int i = 0; i < n; ++i) zk(i) = z[i][k];
    const double wgt = (k == 0 || k + 1 == N) ? 0.5 * dt : dt;
    G.selfadjointView<Eigen::Lower>().rankUpdate(zk, wgt);
  }
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  G = 0.5 * (G + G.transpose()).eval();

  GramMatrix out;
  out.gamma = std::move(G);
  out.n_zw = n_zw;
  out.n_zv = n - n_zw;
  return out;
}

double pair_inner(const Eigen::MatrixXd& M, const GramMatrix& g) {
  return (M.array() * g.gamma.array()).sum();
}

namespace {

GramMatrix gram_of_trajectory(const plant::Trajectory& traj,
                              const lti::FilterBank& bank) {
  auto z = lti::filter_bank_apply(bank, traj.w, traj.v, traj.dt);
  return compute_gram(z, traj.dt, bank.n_zw());
}

}  // namespace

std::vector<GramMatrix> batch_gram_serial(
    const std::vector<plant::Trajectory>& trajs, const lti::FilterBank& bank) {
  std::vector<GramMatrix> out(trajs.size());
  for (size_t i = 0; i < trajs.size(); ++i) {
    try {
      out[i] = gram_of_trajectory(trajs[i], bank);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "batch_gram: trajectory " << i << ": " << e.what();
      throw std::runtime_error(msg.str());
    }
  }
  return out;
}

std::vector<GramMatrix> batch_gram(const std::vector<plant::Trajectory>& trajs,
                                   const lti::FilterBank& bank) {
  const long m = static_cast<long>(trajs.size());
  std::vector<GramMatrix> out(trajs.size());
  std::vector<std::string> errors(trajs.size());
  bool failed = false;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < m; ++i) {
    try {
      out[i] = gram_of_trajectory(trajs[i], bank);
    } catch (const std::exception& e) {
      errors[i] = e.what();
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) {
    for (long i = 0; i < m; ++i) {
      if (!errors[i].empty()) {
        std::ostringstream msg;
        msg << "batch_gram: trajectory " << i << ": " << errors[i];
        throw std::runtime_error(msg.str());
      }
    }
  }
  return out;
}

}  // namespace iqclearn::gram
