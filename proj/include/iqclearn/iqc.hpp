#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iqclearn/lti.hpp"

// Frequency-domain uncertainty bound ell(jw) = Psi_v(jw)^dag M_vv Psi_v(jw)
// and its comparison against reference curves.
namespace iqclearn::iqc {

struct IqcCurve {
  std::vector<double> omega;  // strictly increasing, log-spaced
  std::vector<double> ell;    // nonnegative
  std::string provenance;
};

struct GridSpec {
  double log10_lo = -2.0;
  double log10_hi = 2.0;
  int points = 201;
};

// real(Psi^dag M Psi); the imaginary part of the Hermitian form must vanish
// to 1e-12 relative and is asserted before being discarded.
double eval_ell(const lti::FilterBank& bank, const Eigen::MatrixXd& M_vv,
                double omega);

IqcCurve curve_over_grid(const lti::FilterBank& bank,
                         const Eigen::MatrixXd& M_vv, const GridSpec& grid);

struct CurveComparison {
  double overestimation_fraction = 0.0;  // points with learned >= reference
  double learned_lo = 0.0;               // endpoint values
  double learned_hi = 0.0;
  double reference_lo = 0.0;
  double reference_hi = 0.0;
  double max_ratio = 0.0;     // max learned / max(ref, 1e-9)
  double argmax_omega = 0.0;  // omega of the learned maximum
};

CurveComparison compare_with_reference(
    const IqcCurve& learned, const std::function<double(double)>& reference);

// Smallest grid omega where ell reaches half the plateau (mean of the top
// decile). Throws when the curve does not saturate on-grid.
double half_rise_frequency(const IqcCurve& curve);

}  // namespace iqclearn::iqc
