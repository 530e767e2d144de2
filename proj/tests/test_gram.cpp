#include <stdexcept>
#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "iqclearn/excitation.hpp"
#include "iqclearn/gram.hpp"

using namespace iqclearn;
using gram::compute_gram;
using gram::GramMatrix;

namespace {

std::vector<double> sampled(double (*f)(double), double t0, double t1,
                            double dt) {
  const size_t N = static_cast<size_t>(std::llround((t1 - t0) / dt)) + 1;
  std::vector<double> out(N);
  for (size_t k = 0; k < N; ++k) out[k] = f(t0 + k * dt);
  return out;
}

}  // namespace

TEST_CASE("compute_gram analytic oracles") {
  const double dt = 1e-3;

  SUBCASE("zero signal gives the zero matrix") {
    const auto g = compute_gram({std::vector<double>(100, 0.0)}, dt, 0);
    CHECK(g.gamma(0, 0) == 0.0);
  }

  SUBCASE("integral of sin^2 over a period is pi") {
    const auto g =
        compute_gram({sampled(std::sin, 0.0, 2.0 * M_PI, dt)}, dt, 0);
    CHECK(g.gamma(0, 0) == doctest::Approx(M_PI).epsilon(1e-5));
  }

  SUBCASE("sin and cos are orthogonal over a period") {
    const auto g = compute_gram({sampled(std::sin, 0.0, 2.0 * M_PI, dt),
                                 sampled(std::cos, 0.0, 2.0 * M_PI, dt)},
                                dt, 1);
    CHECK(g.gamma(0, 0) == doctest::Approx(M_PI).epsilon(1e-5));
    // cos^2 has a nonzero endpoint value, so the truncated last step
    // (2*pi is not a multiple of dt) costs ~2e-4
    CHECK(g.gamma(1, 1) == doctest::Approx(M_PI).epsilon(1e-4));
    CHECK(std::abs(g.gamma(0, 1)) <= 1e-5);
    CHECK(g.n_zw == 1);
    CHECK(g.n_zv == 1);
    CHECK(g.ww()(0, 0) == g.gamma(0, 0));
    CHECK(g.vv()(0, 0) == g.gamma(1, 1));
  }

  SUBCASE("trace equals the quadrature of |z|^2") {
    const auto s = sampled(std::sin, 0.0, 5.0, dt);
    const auto c = sampled(std::cos, 0.0, 5.0, dt);
    const auto g = compute_gram({s, c}, dt, 1);
    double quad = 0.0;
    for (size_t k = 0; k < s.size(); ++k) {
      const double wgt = (k == 0 || k + 1 == s.size()) ? 0.5 : 1.0;
      quad += wgt * dt * (s[k] * s[k] + c[k] * c[k]);
    }
    CHECK(g.gamma.trace() == doctest::Approx(quad).epsilon(1e-12));
  }

  SUBCASE("scaling z by alpha scales Gamma by alpha^2") {
    auto s = sampled(std::sin, 0.0, 3.0, dt);
    const auto g1 = compute_gram({s}, dt, 0);
    for (double& v : s) v *= 3.0;
    const auto g9 = compute_gram({s}, dt, 0);
    CHECK(g9.gamma(0, 0) == doctest::Approx(9.0 * g1.gamma(0, 0)).epsilon(1e-12));
  }

  SUBCASE("rejections") {
    CHECK_THROWS_AS(compute_gram({}, dt, 0), std::invalid_argument);
    CHECK_THROWS_AS(compute_gram({{1.0}}, dt, 0), std::invalid_argument);
    CHECK_THROWS_AS(compute_gram({{1.0, 2.0}, {1.0}}, dt, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        compute_gram({{1.0, std::numeric_limits<double>::quiet_NaN()}}, dt, 0),
        std::invalid_argument);
    CHECK_THROWS_AS(compute_gram({{1.0, 2.0}}, dt, 2), std::invalid_argument);
  }
}

TEST_CASE("PSD and symmetry invariants on random trajectories") {
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(excitation::counter_rng(5, trial, 0, 0) % 4);
    const size_t N = 50 + excitation::counter_rng(5, trial, 1, 0) % 200;
    std::vector<std::vector<double>> z(n, std::vector<double>(N));
    for (int c = 0; c < n; ++c)
      for (size_t k = 0; k < N; ++k)
        z[c][k] = 2.0 * excitation::uniform01(5, trial, 10 + c, k) - 1.0;
    const auto g = compute_gram(z, 0.01, 0);

    const double sym = (g.gamma - g.gamma.transpose()).cwiseAbs().maxCoeff();
    CHECK(sym <= 1e-12 * std::max(1.0, g.gamma.cwiseAbs().maxCoeff()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.gamma);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * g.gamma.trace());
    CHECK(g.gamma.trace() >= 0.0);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("pair_inner matches quadrature of z^T M z") {
  const double dt = 1e-3;
  const auto s = sampled(std::sin, 0.0, 4.0, dt);
  const auto c = sampled(std::cos, 0.0, 4.0, dt);
  const auto g = compute_gram({s, c}, dt, 1);
  Eigen::MatrixXd M(2, 2);
  M << -1.0, 0.3, 0.3, 2.0;
  double quad = 0.0;
  for (size_t k = 0; k < s.size(); ++k) {
    const double wgt = (k == 0 || k + 1 == s.size()) ? 0.5 : 1.0;
    Eigen::Vector2d zk(s[k], c[k]);
    quad += wgt * dt * zk.dot(M * zk);
  }
  CHECK(pair_inner(M, g) == doctest::Approx(quad).epsilon(1e-10));

  SUBCASE("PSD pairing is nonnegative up to quadrature tolerance") {
    Eigen::MatrixXd P(2, 2);
    P << 2.0, 1.0, 1.0, 1.0;  // PSD
    CHECK(pair_inner(P, g) >=
          -1e-8 * g.gamma.trace() * P.norm());
  }
}

TEST_CASE("batch_gram") {
  lti::FilterBank bank;
  bank.psi_w = {lti::TransferFunction::identity()};
  bank.psi_v = {lti::tf_from_coeffs({1}, {1, 1}),
                lti::tf_from_coeffs({1, 0}, {1, 1}),
                lti::tf_from_coeffs({1, 0}, {1, 2, 1})};

  SUBCASE("empty list gives empty list") {
    CHECK(gram::batch_gram({}, bank).empty());
    CHECK(gram::batch_gram_serial({}, bank).empty());
  }

  std::vector<plant::Trajectory> trajs(40);
  for (size_t i = 0; i < trajs.size(); ++i) {
    const double omega =
        std::pow(10.0, -1.0 + 2.0 * excitation::uniform01(9, i, 0, 0));
    trajs[i].dt = 0.01;
    trajs[i].v.resize(2000);
    for (size_t k = 0; k < trajs[i].v.size(); ++k)
      trajs[i].v[k] = std::sin(omega * trajs[i].dt * k);
    trajs[i].w = plant::delay_mismatch_channel(0.5, trajs[i].v, trajs[i].dt);
  }

  SUBCASE("parallel matches the serial reference bitwise, 4x4 PSD blocks") {
    const auto a = gram::batch_gram(trajs, bank);
    const auto b = gram::batch_gram_serial(trajs, bank);
    REQUIRE(a.size() == trajs.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].gamma.rows() == 4);
      CHECK((a[i].gamma.array() == b[i].gamma.array()).all());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a[i].gamma);
      CHECK(es.eigenvalues().minCoeff() >= -1e-8 * a[i].gamma.trace());
    }
  }

  SUBCASE("re-running is deterministic") {
    const auto a = gram::batch_gram(trajs, bank);
    const auto b = gram::batch_gram(trajs, bank);
    for (size_t i = 0; i < a.size(); ++i)
      CHECK((a[i].gamma.array() == b[i].gamma.array()).all());
  }

  SUBCASE("failures carry the trajectory index") {
    auto broken = trajs;
    broken[17].v[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH(gram::batch_gram(broken, bank),
                      doctest::Contains("17"));
    CHECK_THROWS_WITH(gram::batch_gram_serial(broken, bank),
                      doctest::Contains("17"));
  }
}
