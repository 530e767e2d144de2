#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Stable proper rational SISO transfer functions, their state-space
// realizations, and the block-diagonal filter banks built from them.
namespace iqclearn::lti {

using Complex = std::complex<double>;

// Real polynomial coefficients in descending powers of s.
using Poly = std::vector<double>;

Poly poly_multiply(const Poly& a, const Poly& b);
Complex poly_eval(const Poly& p, Complex s);
// Roots via companion-matrix eigenvalues. Empty for constants.
std::vector<Complex> poly_roots(const Poly& p);

class StateSpace;

// Proper, stable, denominator-monic rational transfer function.
class TransferFunction {
 public:
  // Throws std::invalid_argument on an empty/zero denominator, an improper
  // ratio, or a denominator root with real part >= -1e-9 (the offending
  // root is named in the message).
  TransferFunction(Poly num, Poly den);

  static TransferFunction identity() { return TransferFunction({1.0}, {1.0}); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  int order() const { return static_cast<int>(den_.size()) - 1; }

  Complex freq_response(double omega) const;

  TransferFunction operator*(const TransferFunction& other) const;

  StateSpace to_state_space() const;

  std::string describe() const;

 private:
  Poly num_;  // may be {0}
  Poly den_;  // monic, nonempty
};

// Controllable-canonical SISO realization (A Hurwitz for multiplier filters).
class StateSpace {
 public:
  StateSpace(Eigen::MatrixXd A, Eigen::VectorXd B, Eigen::RowVectorXd C,
             double D);

  int order() const { return static_cast<int>(A_.rows()); }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& B() const { return B_; }
  const Eigen::RowVectorXd& C() const { return C_; }
  double D() const { return D_; }

  Complex freq_response(double omega) const;

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd B_;
  Eigen::RowVectorXd C_;
  double D_;
};

// Zero-initial-state simulation through the bilinear (Tustin)
// discretization: (I - h/2 A) x+ = (I + h/2 A) x + h/2 B (u + u+),
// y_k = C x_k + D u_k. Throws if dt puts 1 - dt*lambda/2 within 1e-8 of
// zero for some eigenvalue lambda of A.
std::vector<double> simulate_filter(const StateSpace& ss,
                                    const std::vector<double>& u, double dt);

// Constructors named in the pipeline config schema.
TransferFunction tf_from_coeffs(const Poly& num, const Poly& den);
// (s/lo)/(s/lo + 1) * 1/(s/hi + 1)
TransferFunction make_band_pass(double omega_lo, double omega_hi);
enum class ButterKind { kLow, kHigh };
// Second-order Butterworth: low wc^2/(s^2+sqrt2 wc s+wc^2), high s^2/(...).
TransferFunction make_butterworth2(double cutoff, ButterKind kind);
// Muntz-Laguerre basis phi_k = sqrt(2 Re b_k)/(s+b_k) prod_{k'<k}
// (s - conj(b_k'))/(s + b_k'). Poles must have Re > 0 and, when complex,
// appear so each expanded filter has real coefficients.
std::vector<TransferFunction> make_laguerre_basis(
    const std::vector<Complex>& poles, int n);

// Block-diagonal dynamic multiplier: z = [Psi_w w; Psi_v v].
struct FilterBank {
  std::vector<TransferFunction> psi_w;
  std::vector<TransferFunction> psi_v;

  int n_zw() const { return static_cast<int>(psi_w.size()); }
  int n_zv() const { return static_cast<int>(psi_v.size()); }
  int n_z() const { return n_zw() + n_zv(); }

  // Complex responses of the input-channel filters at omega.
  Eigen::VectorXcd v_response(double omega) const;
};

// Feature channels, z_w block first then z_v; w and v must share length.
std::vector<std::vector<double>> filter_bank_apply(const FilterBank& bank,
                                                   const std::vector<double>& w,
                                                   const std::vector<double>& v,
                                                   double dt);

}  // namespace iqclearn::lti
