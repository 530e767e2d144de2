#include <stdexcept>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "iqclearn/excitation.hpp"

using namespace iqclearn::excitation;

TEST_CASE("ExcitationSpec validation") {
  ExcitationSpec spec;
  CHECK_NOTHROW(spec.validate());

  auto bad = spec;
  bad.amplitude = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.log10_lo = bad.log10_hi = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.duration = 0.1;  // duration/dt = 10 < 16
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.kind = Kind::kPrbs;
  bad.bit_time = 0.001;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.kind = Kind::kFourier;
  bad.terms = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("counter_rng determinism and uniform01 range") {
  // same key, same value; distinct on any key component change
  CHECK(counter_rng(1, 2, 3, 4) == counter_rng(1, 2, 3, 4));
  CHECK(counter_rng(1, 2, 3, 4) != counter_rng(1, 2, 3, 5));
  CHECK(counter_rng(1, 2, 3, 4) != counter_rng(1, 2, 4, 4));
  CHECK(counter_rng(1, 2, 3, 4) != counter_rng(1, 3, 3, 4));
  CHECK(counter_rng(1, 2, 3, 4) != counter_rng(2, 2, 3, 4));

  double mean = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = uniform01(42, 0, 0, static_cast<std::uint64_t>(i));
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    mean += x;
  }
  mean /= n;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("sample_sinusoid") {
  ExcitationSpec spec;
  spec.seed = 7;

  SUBCASE("deterministic and frequency in range") {
    for (std::uint64_t draw = 0; draw < 50; ++draw) {
      const auto a = sample_sinusoid(spec, draw);
      const auto b = sample_sinusoid(spec, draw);
      CHECK(a.u == b.u);
      CHECK(a.omega == b.omega);
      CHECK(std::log10(a.omega) >= spec.log10_lo);
      CHECK(std::log10(a.omega) <= spec.log10_hi);
      CHECK(a.u[0] == 0.0);
      // dt refined so each period has >= ~200 samples
      CHECK(a.dt <= 2.0 * M_PI / (199.0 * a.omega));
      CHECK(a.dt <= spec.dt);
    }
  }

  SUBCASE("amplitude attained") {
    spec.amplitude = 0.25;
    const auto sig = sample_sinusoid(spec, 3);
    double peak = 0.0;
    for (double v : sig.u) peak = std::max(peak, std::abs(v));
    CHECK(peak == doctest::Approx(0.25).epsilon(1e-3));
  }

  SUBCASE("half-decade coverage over 500 draws") {
    std::array<int, 8> bins{};
    for (std::uint64_t draw = 0; draw < 500; ++draw) {
      const auto sig = sample_sinusoid(spec, draw);
      const int b = static_cast<int>((std::log10(sig.omega) + 2.0) / 0.5);
      ++bins[std::min(std::max(b, 0), 7)];
    }
    for (int count : bins) CHECK(count >= 20);
  }
}

TEST_CASE("sample_prbs") {
  ExcitationSpec spec;
  spec.kind = Kind::kPrbs;
  spec.bit_time = 0.05;
  spec.dt = 0.01;
  spec.seed = 11;

  SUBCASE("values +-A, levels held for each bit interval") {
    const auto sig = sample_prbs(spec, 0);
    const size_t per_bit = 5;
    for (size_t k = 0; k < sig.u.size(); ++k) {
      CHECK(std::abs(sig.u[k]) == doctest::Approx(spec.amplitude));
      if (k % per_bit != 0) CHECK(sig.u[k] == sig.u[k - 1]);
    }
  }

  SUBCASE("one-bit horizon is constant +-A") {
    auto one = spec;
    one.duration = 0.048;  // strictly inside the first bit
    one.dt = 0.002;
    const auto sig = sample_prbs(one, 0);
    for (double v : sig.u) CHECK(v == sig.u[0]);
    CHECK(std::abs(sig.u[0]) == doctest::Approx(one.amplitude));
  }

  SUBCASE("empirical bit mean within the 5-sigma LLN bound") {
    auto long_spec = spec;
    long_spec.duration = 0.0;
    double mean = 0.0;
    int bits = 0;
    for (std::uint64_t b = 1; b <= 100000; ++b) {
      mean += (counter_rng(long_spec.seed, 0, 1, b) & 1ULL) ? 1.0 : -1.0;
      ++bits;
    }
    mean /= bits;
    CHECK(std::abs(mean) <= 0.02);
  }
}

TEST_CASE("sample_fourier") {
  ExcitationSpec spec;
  spec.kind = Kind::kFourier;
  spec.terms = 5;
  spec.seed = 23;

  SUBCASE("starts from rest, bounded by k*A, deterministic") {
    const auto a = sample_fourier(spec, 4);
    const auto b = sample_fourier(spec, 4);
    CHECK(a.u == b.u);
    CHECK(a.u[0] == 0.0);
    for (double v : a.u) CHECK(std::abs(v) <= 5.0 * spec.amplitude + 1e-12);
  }

  SUBCASE("k=1 reduces to a randomized-amplitude sinusoid") {
    auto one = spec;
    one.terms = 1;
    const auto sig = sample_fourier(one, 2);
    // u[k] = a sin(w dt k): check the three-term recurrence
    // u[k+1] = 2 cos(w dt) u[k] - u[k-1]
    const double c = 2.0 * std::cos(sig.omega * sig.dt);
    for (size_t k = 1; k + 1 < std::min<size_t>(sig.u.size(), 5000); ++k)
      CHECK(std::abs(sig.u[k + 1] - (c * sig.u[k] - sig.u[k - 1])) <= 1e-9);
  }
}

TEST_CASE("sample dispatch and kind names") {
  ExcitationSpec spec;
  CHECK(sample(spec, 0).u == sample_sinusoid(spec, 0).u);
  spec.kind = Kind::kPrbs;
  CHECK(sample(spec, 0).u == sample_prbs(spec, 0).u);
  spec.kind = Kind::kFourier;
  CHECK(sample(spec, 0).u == sample_fourier(spec, 0).u);

  for (Kind k : {Kind::kSinusoid, Kind::kPrbs, Kind::kFourier})
    CHECK(kind_from_string(kind_to_string(k)) == k);
  CHECK_THROWS_AS(kind_from_string("square"), std::invalid_argument);
}
