#include "iqclearn/excitation.hpp"

#include <cmath>
#include <stdexcept>

namespace iqclearn::excitation {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double default_duration(double omega) {
  return std::min(std::max(20.0 * 2.0 * M_PI / omega, 50.0), 200.0);
}

size_t sample_count(double duration, double dt) {
  return static_cast<size_t>(std::floor(duration / dt)) + 1;
}

}  // namespace

void ExcitationSpec::validate() const {
  if (amplitude <= 0.0)
    throw std::invalid_argument("ExcitationSpec: amplitude must be > 0");
  if (!(log10_lo < log10_hi))
    throw std::invalid_argument("ExcitationSpec: need log10_lo < log10_hi");
  if (dt <= 0.0) throw std::invalid_argument("ExcitationSpec: dt must be > 0");
  if (duration < 0.0)
    throw std::invalid_argument("ExcitationSpec: negative duration");
  if (duration > 0.0 && duration / dt < 16.0)
    throw std::invalid_argument("ExcitationSpec: need duration/dt >= 16");
  if (kind == Kind::kPrbs && bit_time < dt)
    throw std::invalid_argument("ExcitationSpec: prbs bit time < dt");
  if (kind == Kind::kFourier && terms < 1)
    throw std::invalid_argument("ExcitationSpec: fourier needs terms >= 1");
}

std::uint64_t counter_rng(std::uint64_t seed, std::uint64_t draw,
                          std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ splitmix64(draw));
  key = splitmix64(key ^ splitmix64(stream));
  return splitmix64(key ^ splitmix64(counter));
}

double uniform01(std::uint64_t seed, std::uint64_t draw, std::uint64_t stream,
                 std::uint64_t counter) {
  // 53-bit mantissa in [0, 1)
  return static_cast<double>(counter_rng(seed, draw, stream, counter) >> 11) *
         0x1.0p-53;
}

Signal sample_sinusoid(const ExcitationSpec& spec, std::uint64_t draw) {
  spec.validate();
  const double log10w = spec.log10_lo + (spec.log10_hi - spec.log10_lo) *
                                            uniform01(spec.seed, draw, 0, 0);
  const double omega = std::pow(10.0, log10w);
  const double dt = std::min(spec.dt, 2.0 * M_PI / (200.0 * omega));
  const double T =
      spec.duration > 0.0 ? spec.duration : default_duration(omega);
  Signal sig;
  sig.dt = dt;
  sig.omega = omega;
  const size_t N = sample_count(T, dt);
  sig.u.resize(N);
  for (size_t k = 0; k < N; ++k)
    sig.u[k] = spec.amplitude * std::sin(omega * dt * static_cast<double>(k));
  return sig;
}

Signal sample_prbs(const ExcitationSpec& spec, std::uint64_t draw) {
  spec.validate();
  const double T = spec.duration > 0.0 ? spec.duration : 200.0;
  Signal sig;
  sig.dt = spec.dt;
  const size_t N = sample_count(T, spec.dt);
  sig.u.resize(N);
  const size_t per_bit =
      std::max<size_t>(1, static_cast<size_t>(std::lround(spec.bit_time / spec.dt)));
  for (size_t k = 0; k < N; ++k) {
    const size_t bit = k / per_bit;
    const bool up = (counter_rng(spec.seed, draw, 1, bit) & 1ULL) != 0;
    sig.u[k] = up ? spec.amplitude : -spec.amplitude;
  }
  return sig;
}

Signal sample_fourier(const ExcitationSpec& spec, std::uint64_t draw) {
  spec.validate();
  std::vector<double> amp(spec.terms), omega(spec.terms);
  double omega_max = 0.0;
  for (int i = 0; i < spec.terms; ++i) {
    amp[i] = spec.amplitude *
             (2.0 * uniform01(spec.seed, draw, 2, 2 * i) - 1.0);
    const double lw = spec.log10_lo + (spec.log10_hi - spec.log10_lo) *
                                          uniform01(spec.seed, draw, 2, 2 * i + 1);
    omega[i] = std::pow(10.0, lw);
    omega_max = std::max(omega_max, omega[i]);
  }
  const double dt = std::min(spec.dt, 2.0 * M_PI / (200.0 * omega_max));
  const double T = spec.duration > 0.0 ? spec.duration : 200.0;
  Signal sig;
  sig.dt = dt;
  sig.omega = omega_max;
  const size_t N = sample_count(T, dt);
  sig.u.assign(N, 0.0);
  for (int i = 0; i < spec.terms; ++i)
    for (size_t k = 0; k < N; ++k)
      sig.u[k] += amp[i] * std::sin(omega[i] * dt * static_cast<double>(k));
  return sig;
}

Signal sample(const ExcitationSpec& spec, std::uint64_t draw) {
  switch (spec.kind) {
    case Kind::kSinusoid:
      return sample_sinusoid(spec, draw);
    case Kind::kPrbs:
      return sample_prbs(spec, draw);
    case Kind::kFourier:
      return sample_fourier(spec, draw);
  }
  throw std::logic_error("sample: unknown excitation kind");
}

Kind kind_from_string(const std::string& s) {
  if (s == "sinusoid") return Kind::kSinusoid;
  if (s == "prbs") return Kind::kPrbs;
  if (s == "fourier") return Kind::kFourier;
  throw std::invalid_argument("unknown excitation kind: " + s);
}

std::string kind_to_string(Kind k) {
  switch (k) {
    case Kind::kSinusoid:
      return "sinusoid";
    case Kind::kPrbs:
      return "prbs";
    case Kind::kFourier:
      return "fourier";
  }
  return "?";
}

}  // namespace iqclearn::excitation
