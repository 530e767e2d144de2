#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

// Plants, nominal models, and the mismatch channel producing (v, w)
// trajectories of the mismatch system.
namespace iqclearn::plant {

// Uniformly sampled mismatch-channel signals, run started from rest.
struct Trajectory {
  double dt = 0.0;
  std::vector<double> v;
  std::vector<double> w;
  // Generation metadata carried into archives.
  double omega = 0.0;  // dominant excitation frequency, 0 when n/a
  double theta = 0.0;  // realized delay for delay-mismatch runs
};

// First-order-plus-time-delay nominal model K0 e^{-theta0 s}/(tau0 s + 1).
struct NominalFOPTD {
  double K0 = 1.0;
  double tau0 = 1.0;
  double theta0 = 0.0;
};

// Nonlinear SISO system x' = f(x, u), y = h(x, u) with the origin an
// equilibrium of zero output.
class NonlinearPlant {
 public:
  virtual ~NonlinearPlant() = default;
  virtual int state_dim() const = 0;
  virtual void f(const std::vector<double>& x, double u,
                 std::vector<double>& dx) const = 0;
  virtual double h(const std::vector<double>& x, double u) const = 0;
  // Input delay applied before the ODE (a zero-prefilled delay line).
  virtual double input_delay() const { return 0.0; }
};

// Classical fixed-step RK4 with zero-order-held input over each step.
// Throws std::runtime_error naming the failing time on non-finite state.
std::vector<double> simulate_nonlinear(const NonlinearPlant& plant,
                                       const std::vector<double>& u, double dt);

// Exact exponential discrete update applied to u delayed by
// round(theta0/dt) samples from a zero-prefilled delay line.
std::vector<double> simulate_foptd(const NominalFOPTD& model,
                                   const std::vector<double>& u, double dt);

// w(t) = u(t - theta) - u(t), u = 0 for t < 0; theta snapped to the grid.
std::vector<double> delay_mismatch_channel(double theta,
                                           const std::vector<double>& u,
                                           double dt);

enum class MismatchMode { kAdditive, kMultiplicative };

// Additive: v = plant input u, w = y - y0. Multiplicative: v = y0, w = y - y0.
std::pair<std::vector<double>, std::vector<double>> residual(
    const std::vector<double>& u, const std::vector<double>& y,
    const std::vector<double>& y0, MismatchMode mode);

// Worst-case squared delay-mismatch gain over theta in [0, theta0]:
// 4 sin^2(omega theta0 / 2) below pi/theta0, 4 above.
double ell0_delay(double omega, double theta0);

// Rational majorant (4 w^4 + 50 w^2)/(w^4 + 6.5 w^2 + 50).
double ell_megretski(double omega);

// Fixed nonlinear SISO benchmark: 12-time-unit input delay, first-order lag
// with tanh input saturation, and a second state driven by a rate-dependent
// odd nonlinearity. Linearizes near the origin to roughly
// FOPTD(K0=0.28, tau0=4, theta0=12).
std::unique_ptr<NonlinearPlant> surrogate_reactor();

// f = -x + u, h = x; used as an integrator accuracy reference.
std::unique_ptr<NonlinearPlant> linear_test_plant();

}  // namespace iqclearn::plant
