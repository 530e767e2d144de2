#include <stdexcept>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "iqclearn/excitation.hpp"
#include "iqclearn/iqc.hpp"
#include "iqclearn/plant.hpp"

using namespace iqclearn;
using namespace iqclearn::iqc;

namespace {

lti::FilterBank delay_bank() {
  lti::FilterBank bank;
  bank.psi_w = {lti::TransferFunction::identity()};
  bank.psi_v = {lti::tf_from_coeffs({1}, {1, 1}),
                lti::tf_from_coeffs({1, 0}, {1, 1}),
                lti::tf_from_coeffs({1, 0}, {1, 2, 1})};
  return bank;
}

}  // namespace

TEST_CASE("eval_ell") {
  const auto bank = delay_bank();

  SUBCASE("diag(0,4,0) reproduces 4 w^2 / (1 + w^2)") {
    const Eigen::MatrixXd M = Eigen::Vector3d(0.0, 4.0, 0.0).asDiagonal();
    for (double w : {0.0, 0.01, 0.5, 1.0, 7.0, 100.0}) {
      CHECK(eval_ell(bank, M, w) ==
            doctest::Approx(4.0 * w * w / (1.0 + w * w)).epsilon(1e-12));
    }
  }

  SUBCASE("high-pass-only support vanishes at DC") {
    const Eigen::MatrixXd M = Eigen::Vector3d(0.0, 2.0, 3.0).asDiagonal();
    CHECK(eval_ell(bank, M, 0.0) == 0.0);
  }

  SUBCASE("identity weight on a single low-pass filter") {
    lti::FilterBank single;
    single.psi_w = {lti::TransferFunction::identity()};
    single.psi_v = {lti::tf_from_coeffs({1}, {1, 1})};
    for (double w : {0.0, 0.3, 1.0, 10.0}) {
      CHECK(eval_ell(single, Eigen::MatrixXd::Identity(1, 1), w) ==
            doctest::Approx(1.0 / (1.0 + w * w)).epsilon(1e-12));
    }
  }

  SUBCASE("permutation of filters and M rows/columns is invariant") {
    Eigen::MatrixXd M(3, 3);
    M << 2.0, 0.5, 0.1, 0.5, 3.0, -0.2, 0.1, -0.2, 1.0;
    auto swapped = bank;
    std::swap(swapped.psi_v[0], swapped.psi_v[2]);
    Eigen::PermutationMatrix<3> P;
    P.setIdentity();
    P.applyTranspositionOnTheRight(0, 2);
    const Eigen::MatrixXd Mp = P.transpose() * M * P;
    for (double w : {0.05, 0.7, 4.0})
      CHECK(eval_ell(bank, M, w) ==
            doctest::Approx(eval_ell(swapped, Mp, w)).epsilon(1e-12));
  }

  SUBCASE("PSD weight gives a nonnegative curve") {
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::MatrixXd L(3, 3);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          L(r, c) = 2.0 * excitation::uniform01(31, trial, r, c) - 1.0;
      const Eigen::MatrixXd M = L * L.transpose();
      const double w =
          std::pow(10.0, -2.0 + 4.0 * excitation::uniform01(31, trial, 9, 0));
      CHECK(eval_ell(bank, M, w) >= -1e-10);
    }
  }

  SUBCASE("diagonal decomposition identity") {
    const Eigen::Vector3d a(0.7, 1.3, 0.2);
    const Eigen::MatrixXd M = a.asDiagonal();
    for (double w : {0.1, 1.0, 10.0}) {
      double expect = 0.0;
      for (int k = 0; k < 3; ++k)
        expect += a(k) * std::norm(bank.psi_v[k].freq_response(w));
      CHECK(eval_ell(bank, M, w) == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  SUBCASE("endpoint limits pick out the low/high-pass diagonal entries") {
    Eigen::MatrixXd M(3, 3);
    M << 1.7, 0.0, 0.0, 0.0, 3.9, 0.0, 0.0, 0.0, 0.4;
    CHECK(eval_ell(bank, M, 1e-5) == doctest::Approx(1.7).epsilon(1e-6));
    CHECK(eval_ell(bank, M, 1e5) == doctest::Approx(3.9).epsilon(1e-6));
  }

  CHECK_THROWS_AS(eval_ell(bank, Eigen::MatrixXd::Identity(2, 2), 1.0),
                  std::invalid_argument);
}

TEST_CASE("curve_over_grid") {
  const auto bank = delay_bank();
  const Eigen::MatrixXd M = Eigen::Vector3d(0.0, 4.0, 0.0).asDiagonal();
  GridSpec grid;  // [-2, 2], 201 points

  const auto curve = curve_over_grid(bank, M, grid);
  REQUIRE(curve.omega.size() == 201);
  CHECK(curve.omega.front() == doctest::Approx(1e-2).epsilon(1e-12));
  CHECK(curve.omega.back() == doctest::Approx(1e2).epsilon(1e-12));
  for (size_t i = 1; i < curve.omega.size(); ++i) {
    CHECK(curve.omega[i] > curve.omega[i - 1]);
    // 4 w^2/(1+w^2) is strictly increasing
    CHECK(curve.ell[i] > curve.ell[i - 1]);
  }
  for (size_t i = 0; i < curve.ell.size(); ++i)
    CHECK(curve.ell[i] ==
          doctest::Approx(4.0 * curve.omega[i] * curve.omega[i] /
                          (1.0 + curve.omega[i] * curve.omega[i]))
              .epsilon(1e-12));

  SUBCASE("floor-only solution is the weighted filter energy") {
    const double eps = 1e-6;
    const Eigen::MatrixXd Mf = eps * Eigen::MatrixXd::Identity(3, 3);
    const auto fc = curve_over_grid(bank, Mf, grid);
    for (size_t i = 0; i < fc.ell.size(); ++i) {
      double expect = 0.0;
      for (const auto& tf : bank.psi_v)
        expect += eps * std::norm(tf.freq_response(fc.omega[i]));
      CHECK(fc.ell[i] == doctest::Approx(expect).epsilon(1e-10));
    }
  }

  GridSpec bad = grid;
  bad.points = 1;
  CHECK_THROWS_AS(curve_over_grid(bank, M, bad), std::invalid_argument);
}

TEST_CASE("compare_with_reference") {
  const auto bank = delay_bank();
  const Eigen::MatrixXd M = Eigen::Vector3d(0.0, 4.0, 0.0).asDiagonal();
  const auto learned = curve_over_grid(bank, M, GridSpec{});

  SUBCASE("self-comparison counts ties as overestimation") {
    const auto cmp = compare_with_reference(learned, [&](double w) {
      size_t best = 0;
      for (size_t i = 1; i < learned.omega.size(); ++i)
        if (std::abs(learned.omega[i] - w) < std::abs(learned.omega[best] - w))
          best = i;
      return learned.ell[best];
    });
    CHECK(cmp.overestimation_fraction == doctest::Approx(1.0));
    CHECK(cmp.max_ratio == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("against the exact delay bound") {
    const auto cmp = compare_with_reference(
        learned, [](double w) { return plant::ell0_delay(w, 0.5); });
    // overestimates below the crossover, both tails agree
    int over = 0, total = 0;
    for (size_t i = 0; i < learned.omega.size(); ++i) {
      if (learned.omega[i] > 0.8 * M_PI / 0.5) continue;
      ++total;
      if (learned.ell[i] >= plant::ell0_delay(learned.omega[i], 0.5)) ++over;
    }
    CHECK(static_cast<double>(over) / total >= 0.95);
    CHECK(std::abs(cmp.learned_lo - cmp.reference_lo) <= 0.3);
    CHECK(std::abs(cmp.learned_hi - 4.0) <= 0.5);
    CHECK(cmp.reference_hi == 4.0);
  }

  SUBCASE("argmax lands on the peak of a band-pass curve") {
    lti::FilterBank bp;
    bp.psi_w = {lti::TransferFunction::identity()};
    bp.psi_v = {lti::make_band_pass(0.5, 2.0)};
    const auto curve =
        curve_over_grid(bp, Eigen::MatrixXd::Identity(1, 1), GridSpec{});
    const auto cmp = compare_with_reference(curve, [](double) { return 0.0; });
    CHECK(cmp.argmax_omega == doctest::Approx(1.0).epsilon(0.1));
    CHECK(cmp.overestimation_fraction == doctest::Approx(1.0));
  }
}

TEST_CASE("half_rise_frequency") {
  GridSpec grid;
  const double step = std::pow(10.0, 4.0 / 200.0);  // one grid step, ratio

  SUBCASE("exact delay bound rises at pi / (2 theta0)") {
    IqcCurve curve;
    for (int i = 0; i < grid.points; ++i) {
      const double w = std::pow(10.0, -2.0 + 4.0 * i / (grid.points - 1));
      curve.omega.push_back(w);
      curve.ell.push_back(plant::ell0_delay(w, 0.5));
    }
    const double hr = half_rise_frequency(curve);
    CHECK(hr >= M_PI / step * 0.999);
    CHECK(hr <= M_PI * step * 1.001);
  }

  SUBCASE("learned-form curve rises at omega = 1") {
    const auto bank = delay_bank();
    const Eigen::MatrixXd M = Eigen::Vector3d(0.0, 4.0, 0.0).asDiagonal();
    const auto curve = curve_over_grid(bank, M, grid);
    const double hr = half_rise_frequency(curve);
    CHECK(hr >= 1.0 / step * 0.999);
    CHECK(hr <= 1.0 * step * 1.001);
  }

  SUBCASE("constant curve returns the first grid point") {
    IqcCurve flat;
    flat.omega = {0.1, 1.0, 10.0};
    flat.ell = {2.0, 2.0, 2.0};
    CHECK(half_rise_frequency(flat) == 0.1);
  }

  SUBCASE("non-saturating curve is rejected") {
    lti::FilterBank lp;
    lp.psi_w = {lti::TransferFunction::identity()};
    lp.psi_v = {lti::tf_from_coeffs({1}, {1, 1})};
    const auto curve =
        curve_over_grid(lp, Eigen::MatrixXd::Identity(1, 1), grid);
    CHECK_THROWS_AS(half_rise_frequency(curve), std::runtime_error);
  }
}
