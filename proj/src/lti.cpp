#include "iqclearn/lti.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace iqclearn::lti {

namespace {

constexpr double kStabilityMargin = 1e-9;

Poly trim_leading_zeros(Poly p) {
  size_t i = 0;
  while (i + 1 < p.size() && p[i] == 0.0) ++i;
  p.erase(p.begin(), p.begin() + static_cast<long>(i));
  return p;
}

std::vector<Complex> complex_poly_multiply(const std::vector<Complex>& a,
                                           const std::vector<Complex>& b) {
  std::vector<Complex> out(a.size() + b.size() - 1, Complex(0.0, 0.0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly realify(const std::vector<Complex>& p, const char* what) {
  double scale = 0.0;
  for (const auto& c : p) scale = std::max(scale, std::abs(c));
  Poly out(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    if (std::abs(p[i].imag()) > 1e-9 * std::max(1.0, scale)) {
      throw std::invalid_argument(
          std::string(what) +
          ": expansion leaves complex coefficients; complex poles must come "
          "in conjugate pairs yielding real filters");
    }
    out[i] = p[i].real();
  }
  return out;
}

}  // namespace

Poly poly_multiply(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Complex poly_eval(const Poly& p, Complex s) {
  Complex acc(0.0, 0.0);
  for (double c : p) acc = acc * s + c;
  return acc;
}

std::vector<Complex> poly_roots(const Poly& p_in) {
  Poly p = trim_leading_zeros(p_in);
  const int n = static_cast<int>(p.size()) - 1;
  if (n <= 0) return {};
  // p(s)/p[0] = s^n + a_{n-1} s^{n-1} + ... + a_0 with a_i = p[n-i]/p[0].
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -p[n - i] / p[0];
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<Complex> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

TransferFunction::TransferFunction(Poly num, Poly den) {
  den = trim_leading_zeros(std::move(den));
  if (den.empty() || den[0] == 0.0)
    throw std::invalid_argument("TransferFunction: zero or empty denominator");
  num = trim_leading_zeros(std::move(num));
  if (num.empty()) num = {0.0};
  if (num.size() > den.size())
    throw std::invalid_argument(
        "TransferFunction: improper (numerator degree exceeds denominator)");
  const double lead = den[0];
  for (double& c : den) c /= lead;
  for (double& c : num) c /= lead;
  for (const Complex& r : poly_roots(den)) {
    if (r.real() >= -kStabilityMargin) {
      std::ostringstream msg;
      msg << "TransferFunction: unstable denominator root " << r.real()
          << (r.imag() >= 0 ? "+" : "") << r.imag() << "j";
      throw std::invalid_argument(msg.str());
    }
  }
  num_ = std::move(num);
  den_ = std::move(den);
}

Complex TransferFunction::freq_response(double omega) const {
  if (!std::isfinite(omega) || omega < 0.0)
    throw std::invalid_argument("freq_response: omega must be finite and >= 0");
  const Complex s(0.0, omega);
  return poly_eval(num_, s) / poly_eval(den_, s);
}

TransferFunction TransferFunction::operator*(
    const TransferFunction& other) const {
  return TransferFunction(poly_multiply(num_, other.num_),
                          poly_multiply(den_, other.den_));
}

StateSpace TransferFunction::to_state_space() const {
  const int n = order();
  if (n == 0) {
    return StateSpace(Eigen::MatrixXd(0, 0), Eigen::VectorXd(0),
                      Eigen::RowVectorXd(0), num_[0]);
  }
  // den is monic: s^n + a_{n-1} s^{n-1} + ... + a_0, stored descending.
  // Split num = D*den + remainder, remainder degree < n.
  Poly num_full(n + 1, 0.0);
  std::copy(num_.begin(), num_.end(),
            num_full.begin() + (n + 1 - static_cast<int>(num_.size())));
  const double D = num_full[0];
  Poly rem(n, 0.0);  // descending, degree n-1
  for (int i = 0; i < n; ++i) rem[i] = num_full[i + 1] - D * den_[i + 1];

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) A(n - 1, j) = -den_[n - j];  // -a_j, ascending
  Eigen::VectorXd B = Eigen::VectorXd::Zero(n);
  B(n - 1) = 1.0;
  Eigen::RowVectorXd C(n);
  for (int j = 0; j < n; ++j) C(j) = rem[n - 1 - j];  // ascending powers
  return StateSpace(A, B, C, D);
}

std::string TransferFunction::describe() const {
  std::ostringstream os;
  os << "tf(num=[";
  for (size_t i = 0; i < num_.size(); ++i)
    os << (i ? "," : "") << num_[i];
  os << "],den=[";
  for (size_t i = 0; i < den_.size(); ++i)
    os << (i ? "," : "") << den_[i];
  os << "])";
  return os.str();
}

StateSpace::StateSpace(Eigen::MatrixXd A, Eigen::VectorXd B,
                       Eigen::RowVectorXd C, double D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(D) {
  if (A_.rows() != A_.cols() || A_.rows() != B_.rows() ||
      A_.rows() != C_.cols())
    throw std::invalid_argument("StateSpace: inconsistent dimensions");
}

Complex StateSpace::freq_response(double omega) const {
  const int n = order();
  if (n == 0) return Complex(D_, 0.0);
  Eigen::MatrixXcd jwIA =
      Complex(0.0, omega) * Eigen::MatrixXcd::Identity(n, n) -
      A_.cast<Complex>();
  Eigen::VectorXcd x = jwIA.partialPivLu().solve(B_.cast<Complex>());
  return (C_.cast<Complex>() * x)(0) + D_;
}

std::vector<double> simulate_filter(const StateSpace& ss,
                                    const std::vector<double>& u, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("simulate_filter: dt must be > 0");
  const int n = ss.order();
  const size_t N = u.size();
  std::vector<double> y(N, 0.0);
  if (n == 0) {
    for (size_t k = 0; k < N; ++k) y[k] = ss.D() * u[k];
    return y;
  }
  const double alpha = 0.5 * dt;
  {
    Eigen::VectorXcd ev = ss.A().eigenvalues();
    for (int i = 0; i < n; ++i) {
      if (std::abs(1.0 - alpha * ev(i)) < 1e-8)
        throw std::invalid_argument(
            "simulate_filter: dt degenerates the Tustin pole map");
    }
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(I - alpha * ss.A());
  const Eigen::MatrixXd Ad = lu.solve(I + alpha * ss.A());
  const Eigen::VectorXd Bd = lu.solve(alpha * ss.B());

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (size_t k = 0; k < N; ++k) {
    y[k] = ss.C() * x + ss.D() * u[k];
    if (k + 1 < N) x = Ad * x + Bd * (u[k] + u[k + 1]);
  }
  return y;
}

TransferFunction tf_from_coeffs(const Poly& num, const Poly& den) {
  return TransferFunction(num, den);
}

TransferFunction make_band_pass(double omega_lo, double omega_hi) {
  if (omega_lo <= 0.0 || omega_hi <= 0.0)
    throw std::invalid_argument("make_band_pass: corner frequencies must be > 0");
  TransferFunction hp({1.0 / omega_lo, 0.0}, {1.0 / omega_lo, 1.0});
  TransferFunction lp({1.0}, {1.0 / omega_hi, 1.0});
  return hp * lp;
}

TransferFunction make_butterworth2(double cutoff, ButterKind kind) {
  if (cutoff <= 0.0)
    throw std::invalid_argument("make_butterworth2: cutoff must be > 0");
  const Poly den = {1.0, std::sqrt(2.0) * cutoff, cutoff * cutoff};
  if (kind == ButterKind::kLow) return TransferFunction({cutoff * cutoff}, den);
  return TransferFunction({1.0, 0.0, 0.0}, den);
}

std::vector<TransferFunction> make_laguerre_basis(
    const std::vector<Complex>& poles, int n) {
  if (n < 0) throw std::invalid_argument("make_laguerre_basis: n < 0");
  if (static_cast<int>(poles.size()) < n)
    throw std::invalid_argument("make_laguerre_basis: fewer poles than n");
  std::vector<TransferFunction> basis;
  std::vector<Complex> num_prod = {Complex(1.0, 0.0)};  // prod (s - conj b)
  std::vector<Complex> den_prod = {Complex(1.0, 0.0)};  // prod (s + b)
  for (int k = 0; k < n; ++k) {
    const Complex b = poles[k];
    if (b.real() <= 0.0)
      throw std::invalid_argument(
          "make_laguerre_basis: pole with nonpositive real part");
    const double gain = std::sqrt(2.0 * b.real());
    std::vector<Complex> num = num_prod;
    for (auto& c : num) c *= gain;
    std::vector<Complex> den =
        complex_poly_multiply(den_prod, {Complex(1.0, 0.0), b});
    basis.emplace_back(realify(num, "make_laguerre_basis"),
                       realify(den, "make_laguerre_basis"));
    num_prod = complex_poly_multiply(num_prod,
                                     {Complex(1.0, 0.0), -std::conj(b)});
    den_prod = den;
  }
  return basis;
}

Eigen::VectorXcd FilterBank::v_response(double omega) const {
  Eigen::VectorXcd r(n_zv());
  for (int i = 0; i < n_zv(); ++i) r(i) = psi_v[i].freq_response(omega);
  return r;
}

std::vector<std::vector<double>> filter_bank_apply(const FilterBank& bank,
                                                   const std::vector<double>& w,
                                                   const std::vector<double>& v,
                                                   double dt) {
  if (w.size() != v.size())
    throw std::invalid_argument("filter_bank_apply: w and v length mismatch");
  if (bank.n_z() == 0)
    throw std::invalid_argument("filter_bank_apply: empty filter bank");
  std::vector<std::vector<double>> z;
  z.reserve(bank.n_z());
  for (const auto& tf : bank.psi_w)
    z.push_back(simulate_filter(tf.to_state_space(), w, dt));
  for (const auto& tf : bank.psi_v)
    z.push_back(simulate_filter(tf.to_state_space(), v, dt));
  return z;
}

}  // namespace iqclearn::lti
