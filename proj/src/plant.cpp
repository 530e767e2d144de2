#include "iqclearn/plant.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace iqclearn::plant {

namespace {

long snapped_samples(double theta, double dt) {
  return std::lround(theta / dt);
}

class LinearTestPlant final : public NonlinearPlant {
 public:
  int state_dim() const override { return 1; }
  void f(const std::vector<double>& x, double u,
         std::vector<double>& dx) const override {
    dx[0] = -x[0] + u;
  }
  double h(const std::vector<double>& x, double) const override {
    return x[0];
  }
};

// Two-state surrogate with a hard 12-unit input delay. The tanh saturation
// acts on the input; the second state adds a short lag and an odd,
// rate-dependent distortion that vanishes at DC and rolls off at high
// frequency, so the mismatch against the FOPTD nominal peaks at
// intermediate frequencies.
class SurrogateReactor final : public NonlinearPlant {
 public:
  static constexpr double kGain = 0.28;
  static constexpr double kTau = 4.0;
  static constexpr double kDelay = 12.0;
  static constexpr double kTau2 = 0.5;
  static constexpr double kSat = 1.5;       // tanh saturation sharpness
  static constexpr double kKappa = 30.0;    // rate-nonlinearity weight
  static constexpr double kRateScale = kGain / kTau;

  int state_dim() const override { return 2; }
  double input_delay() const override { return kDelay; }
  void f(const std::vector<double>& x, double u,
         std::vector<double>& dx) const override {
    const double sat = std::tanh(kSat * u) / kSat;
    const double r = (-x[0] + kGain * sat) / kTau;
    dx[0] = r;
    dx[1] = (x[0] + kKappa * r * std::abs(r) / kRateScale - x[1]) / kTau2;
  }
  double h(const std::vector<double>& x, double) const override {
    return x[1];
  }
};

}  // namespace

std::vector<double> simulate_nonlinear(const NonlinearPlant& plant,
                                       const std::vector<double>& u,
                                       double dt) {
  if (dt <= 0.0)
    throw std::invalid_argument("simulate_nonlinear: dt must be > 0");
  const size_t N = u.size();
  const int n = plant.state_dim();
  const long lag = snapped_samples(plant.input_delay(), dt);

  std::vector<double> x(n, 0.0), k1(n), k2(n), k3(n), k4(n), tmp(n);
  std::vector<double> y(N, 0.0);
  auto u_at = [&](long k) -> double {
    const long j = k - lag;
    return (j >= 0 && j < static_cast<long>(N)) ? u[j] : 0.0;
  };
  for (size_t k = 0; k < N; ++k) {
    y[k] = plant.h(x, u_at(static_cast<long>(k)));
    if (!std::isfinite(y[k])) {
      std::ostringstream msg;
      msg << "simulate_nonlinear: non-finite state at t=" << k * dt;
      throw std::runtime_error(msg.str());
    }
    if (k + 1 == N) break;
    const double uk = u_at(static_cast<long>(k));  // ZOH over the step
    plant.f(x, uk, k1);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    plant.f(tmp, uk, k2);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    plant.f(tmp, uk, k3);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    plant.f(tmp, uk, k4);
    for (int i = 0; i < n; ++i)
      x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return y;
}

std::vector<double> simulate_foptd(const NominalFOPTD& model,
                                   const std::vector<double>& u, double dt) {
  if (model.tau0 <= 0.0 || model.theta0 < 0.0)
    throw std::invalid_argument("simulate_foptd: need tau0 > 0, theta0 >= 0");
  if (dt <= 0.0) throw std::invalid_argument("simulate_foptd: dt must be > 0");
  const size_t N = u.size();
  const long lag = snapped_samples(model.theta0, dt);
  const double a = std::exp(-dt / model.tau0);
  const double b = model.K0 * (1.0 - a);
  std::vector<double> y(N, 0.0);
  double state = 0.0;
  for (size_t k = 0; k < N; ++k) {
    y[k] = state;
    const long j = static_cast<long>(k) - lag;
    const double ud = (j >= 0) ? u[j] : 0.0;
    state = a * state + b * ud;
  }
  return y;
}

std::vector<double> delay_mismatch_channel(double theta,
                                           const std::vector<double>& u,
                                           double dt) {
  if (theta < 0.0)
    throw std::invalid_argument("delay_mismatch_channel: negative theta");
  if (dt <= 0.0)
    throw std::invalid_argument("delay_mismatch_channel: dt must be > 0");
  const long lag = snapped_samples(theta, dt);
  const size_t N = u.size();
  std::vector<double> w(N, 0.0);
  for (size_t k = 0; k < N; ++k) {
    const long j = static_cast<long>(k) - lag;
    const double ud = (j >= 0) ? u[j] : 0.0;
    w[k] = ud - u[k];
  }
  return w;
}

std::pair<std::vector<double>, std::vector<double>> residual(
    const std::vector<double>& u, const std::vector<double>& y,
    const std::vector<double>& y0, MismatchMode mode) {
  if (u.size() != y.size() || y.size() != y0.size())
    throw std::invalid_argument("residual: length mismatch");
  std::vector<double> w(y.size());
  for (size_t k = 0; k < y.size(); ++k) w[k] = y[k] - y0[k];
  if (mode == MismatchMode::kAdditive) return {u, std::move(w)};
  return {y0, std::move(w)};
}

double ell0_delay(double omega, double theta0) {
  if (omega < 0.0 || theta0 <= 0.0)
    throw std::invalid_argument("ell0_delay: need omega >= 0, theta0 > 0");
  if (omega >= M_PI / theta0) return 4.0;
  const double s = std::sin(0.5 * omega * theta0);
  return 4.0 * s * s;
}

double ell_megretski(double omega) {
  if (omega < 0.0) throw std::invalid_argument("ell_megretski: omega < 0");
  const double w2 = omega * omega;
  return (4.0 * w2 * w2 + 50.0 * w2) / (w2 * w2 + 6.5 * w2 + 50.0);
}

std::unique_ptr<NonlinearPlant> surrogate_reactor() {
  return std::make_unique<SurrogateReactor>();
}

std::unique_ptr<NonlinearPlant> linear_test_plant() {
  return std::make_unique<LinearTestPlant>();
}

}  // namespace iqclearn::plant
