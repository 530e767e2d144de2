// Times the OpenMP trajectory-parallel Gram reduction against the serial
// reference on a synthetic workload and checks they agree bitwise.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "iqclearn/excitation.hpp"
#include "iqclearn/gram.hpp"
#include "iqclearn/lti.hpp"
#include "iqclearn/plant.hpp"

using namespace iqclearn;

int main(int argc, char** argv) {
  const int m = argc > 1 ? std::atoi(argv[1]) : 200;
  const int samples = argc > 2 ? std::atoi(argv[2]) : 20000;
  const double dt = 0.01;

  lti::FilterBank bank;
  bank.psi_w = {lti::TransferFunction::identity()};
  bank.psi_v = {lti::tf_from_coeffs({1}, {1, 1}),
                lti::tf_from_coeffs({1, 0}, {1, 1}),
                lti::tf_from_coeffs({1, 0}, {1, 2, 1})};

  std::vector<plant::Trajectory> trajs(m);
  for (int i = 0; i < m; ++i) {
    const double omega =
        std::pow(10.0, -2.0 + 4.0 * excitation::uniform01(7, i, 0, 0));
    trajs[i].dt = dt;
    trajs[i].v.resize(samples);
    for (int k = 0; k < samples; ++k)
      trajs[i].v[k] = std::sin(omega * dt * k);
    trajs[i].w = plant::delay_mismatch_channel(0.5, trajs[i].v, dt);
  }

  auto time_it = [&](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::make_pair(std::chrono::duration<double>(t1 - t0).count(),
                          std::move(result));
  };

  auto [t_serial, g_serial] =
      time_it([&] { return gram::batch_gram_serial(trajs, bank); });
  auto [t_parallel, g_parallel] =
      time_it([&] { return gram::batch_gram(trajs, bank); });

  bool identical = true;
  for (int i = 0; i < m; ++i)
    if ((g_serial[i].gamma.array() != g_parallel[i].gamma.array()).any())
      identical = false;

  std::printf("trajectories=%d samples=%d\n", m, samples);
  std::printf("serial    %8.3f s\n", t_serial);
  std::printf("parallel  %8.3f s  speedup %.2fx\n", t_parallel,
              t_serial / t_parallel);
  std::printf("bitwise identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
