#pragma once

#include <vector>

#include <Eigen/Dense>

#include "iqclearn/lti.hpp"
#include "iqclearn/plant.hpp"

// Per-trajectory dual dissipativity parameters Gamma = int z z^T dt.
namespace iqclearn::gram {

// Symmetric PSD n_z x n_z matrix with the (n_zw, n_zv) block split.
struct GramMatrix {
  Eigen::MatrixXd gamma;
  int n_zw = 0;
  int n_zv = 0;

  int n_z() const { return n_zw + n_zv; }
  Eigen::MatrixXd ww() const { return gamma.topLeftCorner(n_zw, n_zw); }
  Eigen::MatrixXd vv() const { return gamma.bottomRightCorner(n_zv, n_zv); }
};

// Trapezoidal quadrature of the outer-product integrand; symmetry enforced
// by averaging with the transpose. Throws on NaN input or < 2 samples.
GramMatrix compute_gram(const std::vector<std::vector<double>>& z, double dt,
                        int n_zw);

// <M, Gamma> trace inner product.
double pair_inner(const Eigen::MatrixXd& M, const GramMatrix& g);

// filter_bank_apply then compute_gram per trajectory, order-preserving.
// The parallel version distributes trajectories over OpenMP threads; each
// trajectory is computed serially so results are bitwise identical to the
// serial reference.
std::vector<GramMatrix> batch_gram(const std::vector<plant::Trajectory>& trajs,
                                   const lti::FilterBank& bank);
std::vector<GramMatrix> batch_gram_serial(
    const std::vector<plant::Trajectory>& trajs, const lti::FilterBank& bank);

}  // namespace iqclearn::gram
