#include "iqclearn/iqc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace iqclearn::iqc {

double eval_ell(const lti::FilterBank& bank, const Eigen::MatrixXd& M_vv,
                double omega) {
  if (M_vv.rows() != bank.n_zv() || M_vv.cols() != bank.n_zv())
    throw std::invalid_argument("eval_ell: M_vv dimension mismatch");
  const Eigen::VectorXcd psi = bank.v_response(omega);
  const std::complex<double> q = psi.dot(M_vv.cast<std::complex<double>>() * psi);
  const double mag = std::abs(q);
  if (std::abs(q.imag()) > 1e-12 * std::max(1.0, mag))
    throw std::runtime_error("eval_ell: Hermitian form has imaginary residue");
  return q.real();
}

IqcCurve curve_over_grid(const lti::FilterBank& bank,
                         const Eigen::MatrixXd& M_vv, const GridSpec& grid) {
  if (grid.points < 2)
    throw std::invalid_argument("curve_over_grid: need >= 2 grid points");
  IqcCurve curve;
  curve.omega.resize(grid.points);
  curve.ell.resize(grid.points);
  for (int i = 0; i < grid.points; ++i) {
    const double lw = grid.log10_lo + (grid.log10_hi - grid.log10_lo) * i /
                                          (grid.points - 1);
    curve.omega[i] = std::pow(10.0, lw);
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < grid.points; ++i)
    curve.ell[i] = eval_ell(bank, M_vv, curve.omega[i]);
  return curve;
}

CurveComparison compare_with_reference(
    const IqcCurve& learned, const std::function<double(double)>& reference) {
  if (learned.omega.empty())
    throw std::invalid_argument("compare_with_reference: empty curve");
  CurveComparison cmp;
  const size_t n = learned.omega.size();
  size_t over = 0;
  double best = -1.0;
  for (size_t i = 0; i < n; ++i) {
    const double ref = reference(learned.omega[i]);
    if (learned.ell[i] >= ref) ++over;
    cmp.max_ratio = std::max(cmp.max_ratio,
                             learned.ell[i] / std::max(ref, 1e-9));
    if (learned.ell[i] > best) {
      best = learned.ell[i];
      cmp.argmax_omega = learned.omega[i];
    }
  }
  cmp.overestimation_fraction = static_cast<double>(over) / n;
  cmp.learned_lo = learned.ell.front();
  cmp.learned_hi = learned.ell.back();
  cmp.reference_lo = reference(learned.omega.front());
  cmp.reference_hi = reference(learned.omega.back());
  return cmp;
}

double half_rise_frequency(const IqcCurve& curve) {
  const size_t n = curve.ell.size();
  if (n < 2) throw std::invalid_argument("half_rise_frequency: empty curve");
  std::vector<double> sorted = curve.ell;
  std::sort(sorted.begin(), sorted.end());
  const size_t decile = std::max<size_t>(1, n / 10);
  const double plateau =
      std::accumulate(sorted.end() - decile, sorted.end(), 0.0) / decile;
  // Saturation: the high end of the grid must sit on the plateau.
  if (plateau > 0.0 && curve.ell.back() < 0.5 * plateau)
    throw std::runtime_error("half_rise_frequency: curve does not saturate");
  for (size_t i = 0; i < n; ++i)
    if (curve.ell[i] >= 0.5 * plateau) return curve.omega[i];
  return curve.omega.back();
}

}  // namespace iqclearn::iqc
