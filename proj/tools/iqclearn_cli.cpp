#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iqclearn/pipeline.hpp"

namespace {

using iqclearn::pipeline::PipelineConfig;

PipelineConfig load_with_overrides(const std::string& config_path,
                                   const std::string& out_dir,
                                   long long seed, bool seed_set) {
  PipelineConfig cfg = iqclearn::pipeline::load_config(config_path);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed_set) {
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.excitation.seed = cfg.seed;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IQC learning pipeline: generate, learn, eval, verify"};
  app.require_subcommand(1);

  std::string config_path, out_dir, archive_path, solution_path;
  long long seed = 0;
  bool seed_set = false, dump_trajectories = false;
  std::vector<double> omegas;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "pipeline config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out-dir", out_dir, "override output directory");
    sub->add_option("--seed", seed, "override master seed")
        ->each([&](const std::string&) { seed_set = true; });
  };

  auto* gen = app.add_subcommand("generate",
                                 "simulate trajectories and write the Gram "
                                 "archive");
  add_common(gen);
  gen->add_flag("--dump-trajectories", dump_trajectories,
                "also write one file per trajectory");

  auto* learn = app.add_subcommand("learn", "solve the OC-SVM on an archive");
  add_common(learn);
  learn->add_option("--archive", archive_path,
                    "gram archive path (default <out_dir>/grams.txt)");

  auto* eval = app.add_subcommand("eval",
                                  "evaluate the learned frequency-domain "
                                  "bound and reference curves");
  add_common(eval);
  eval->add_option("--solution", solution_path,
                   "solution path (default <out_dir>/solution.txt)");

  auto* verify = app.add_subcommand(
      "verify", "actual-vs-nominal responses under cosine excitation");
  add_common(verify);
  verify->add_option("--omega", omegas, "frequencies (rad/time)")->required();

  auto* runall = app.add_subcommand("run-all", "generate + learn + eval");
  add_common(runall);

  CLI11_PARSE(app, argc, argv);

  try {
    const PipelineConfig cfg =
        load_with_overrides(config_path, out_dir, seed, seed_set);
    if (gen->parsed()) {
      iqclearn::pipeline::cmd_generate(cfg, dump_trajectories);
      std::printf("wrote %s/grams.txt (%d trajectories)\n",
                  cfg.out_dir.c_str(), cfg.trajectory_count);
    } else if (learn->parsed()) {
      const std::string path =
          archive_path.empty() ? cfg.out_dir + "/grams.txt" : archive_path;
      const auto archive = iqclearn::pipeline::read_gram_archive(path);
      const auto sol = iqclearn::pipeline::cmd_learn(cfg, archive);
      const auto st = iqclearn::ocsvm::margin_violation_stats(sol);
      std::printf(
          "solved: objective=%.6g rho=%.6g mean_violation=%.6g iters=%d "
          "converged=%d\n",
          sol.objective, st.rho, st.mean_violation, sol.iterations,
          sol.converged ? 1 : 0);
      if (!sol.converged) return 2;
    } else if (eval->parsed()) {
      const std::string path =
          solution_path.empty() ? cfg.out_dir + "/solution.txt" : solution_path;
      const auto sol = iqclearn::pipeline::read_solution(path);
      const auto res = iqclearn::pipeline::cmd_eval(cfg, sol);
      std::printf("wrote curves; ell0 overestimation fraction %.3f, argmax "
                  "omega %.4g\n",
                  res.vs_ell0.overestimation_fraction,
                  res.vs_ell0.argmax_omega);
    } else if (verify->parsed()) {
      iqclearn::pipeline::cmd_verify(cfg, omegas);
      std::printf("wrote %zu verify tables to %s\n", omegas.size(),
                  cfg.out_dir.c_str());
    } else if (runall->parsed()) {
      iqclearn::pipeline::run_all(cfg);
      std::printf("pipeline complete; artifacts in %s\n", cfg.out_dir.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\": \"%s\"}\n", e.what());
    return 1;
  }
  return 0;
}
