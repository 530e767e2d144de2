#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iqclearn/excitation.hpp"
#include "iqclearn/gram.hpp"
#include "iqclearn/iqc.hpp"
#include "iqclearn/lti.hpp"
#include "iqclearn/ocsvm.hpp"
#include "iqclearn/plant.hpp"

// Configuration-driven pipeline: generate -> learn -> eval -> verify, each
// stage reading and writing plain-text artifacts under the output directory.
namespace iqclearn::pipeline {

enum class PlantKind { kDelayMismatch, kSurrogateReactor, kFoptd, kLinearTest };

struct PlantConfig {
  PlantKind kind = PlantKind::kDelayMismatch;
  double theta0 = 0.5;          // delay_mismatch bound
  bool randomize_theta = true;  // theta ~ U[0, theta0] per trajectory
  plant::NominalFOPTD foptd;    // plant params for kind == foptd
};

struct FilterDecl {
  std::string kind;  // "tf" | "bandpass" | "butter2" | "laguerre"
  std::vector<double> num, den;              // tf
  double lo = 0.0, hi = 0.0;                 // bandpass
  double cutoff = 0.0;                       // butter2
  std::string pass = "low";                  // butter2
  std::vector<lti::Complex> poles;           // laguerre
  int n = 0;                                 // laguerre
};

struct PipelineConfig {
  std::string name = "experiment";
  PlantConfig plant;
  plant::NominalFOPTD nominal{0.28, 4.0, 12.0};
  plant::MismatchMode mismatch_mode = plant::MismatchMode::kAdditive;
  excitation::ExcitationSpec excitation;
  int trajectory_count = 500;
  std::vector<FilterDecl> bank_w;
  std::vector<FilterDecl> bank_v;
  ocsvm::SolverConfig solver;
  iqc::GridSpec grid;
  std::string out_dir = "out";
  std::uint64_t seed = 0;  // master seed, also feeds excitation.seed
};

PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& json_text);
std::string config_to_json(const PipelineConfig& cfg);
// FNV-1a over the canonical serialized form.
std::uint64_t config_hash(const PipelineConfig& cfg);

lti::FilterBank build_bank(const PipelineConfig& cfg);

// One mismatch-channel trajectory for the configured plant; deterministic
// in (cfg, index).
plant::Trajectory make_trajectory(const PipelineConfig& cfg,
                                  std::uint64_t index);

struct GramRecord {
  gram::GramMatrix gamma;
  double omega = 0.0;
  double theta = 0.0;
  double dt = 0.0;
  double duration = 0.0;
};

struct GramArchive {
  std::uint64_t config_hash = 0;
  int n_zw = 0;
  int n_zv = 0;
  std::vector<GramRecord> records;
};

void write_gram_archive(const GramArchive& archive, const std::string& path);
GramArchive read_gram_archive(const std::string& path);

void write_solution(const ocsvm::Solution& sol, std::uint64_t cfg_hash,
                    const ocsvm::SolverConfig& config,
                    const std::string& path);
ocsvm::Solution read_solution(const std::string& path);

// Pipeline stages. Each writes its artifacts under cfg.out_dir and returns
// the in-memory result for callers that chain stages directly.
GramArchive cmd_generate(const PipelineConfig& cfg,
                         bool dump_trajectories = false);
ocsvm::Solution cmd_learn(const PipelineConfig& cfg,
                          const GramArchive& archive);
struct EvalResult {
  iqc::IqcCurve learned;
  iqc::CurveComparison vs_ell0;
  iqc::CurveComparison vs_megretski;
};
EvalResult cmd_eval(const PipelineConfig& cfg, const ocsvm::Solution& sol);
// Actual-vs-nominal time responses under u = A cos(omega t).
void cmd_verify(const PipelineConfig& cfg, const std::vector<double>& omegas);
void run_all(const PipelineConfig& cfg);

}  // namespace iqclearn::pipeline
