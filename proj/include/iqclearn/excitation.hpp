#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Seeded, reproducible excitation signals. All randomness comes from a
// counter-based generator keyed by (seed, draw index, stream), so any
// trajectory can be regenerated in isolation and in any order.
namespace iqclearn::excitation {

enum class Kind { kSinusoid, kPrbs, kFourier };

struct ExcitationSpec {
  Kind kind = Kind::kSinusoid;
  double amplitude = 1.0;
  double log10_lo = -2.0;  // decades of omega (or omega*tau as configured)
  double log10_hi = 2.0;
  double bit_time = 0.05;  // prbs only
  int terms = 5;           // fourier only
  double duration = 0.0;   // 0 => per-draw default
  double dt = 0.01;        // upper bound; single-tone draws may refine
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

// Stateless splitmix64-style mixer: same (key, counter) -> same value on
// every platform.
std::uint64_t counter_rng(std::uint64_t seed, std::uint64_t draw,
                          std::uint64_t stream, std::uint64_t counter);
double uniform01(std::uint64_t seed, std::uint64_t draw, std::uint64_t stream,
                 std::uint64_t counter);

struct Signal {
  double dt = 0.0;
  std::vector<double> u;
  double omega = 0.0;  // dominant tone, 0 for prbs
};

// u(t) = A sin(omega t), log10 omega ~ U[lo, hi]. Single-tone runs pick
// dt = 2 pi / (200 omega) capped at spec.dt, and a default duration
// clamp(20 * 2 pi / omega, 50, 200) when spec.duration == 0.
Signal sample_sinusoid(const ExcitationSpec& spec, std::uint64_t draw);

// +/-A held per bit interval, fair coin per bit
// so the run starts from rest.
Signal sample_prbs(const ExcitationSpec& spec, std::uint64_t draw);

// sum a_i sin(omega_i t), a_i ~ U[-A, A], log10 omega_i ~ U[lo, hi].
Signal sample_fourier(const ExcitationSpec& spec, std::uint64_t draw);

Signal sample(const ExcitationSpec& spec, std::uint64_t draw);

Kind kind_from_string(const std::string& s);
std::string kind_to_string(Kind k);

}  // namespace iqclearn::excitation
