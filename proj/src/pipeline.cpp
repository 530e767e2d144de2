#include "iqclearn/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace iqclearn::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string plant_kind_to_string(PlantKind k) {
  switch (k) {
    case PlantKind::kDelayMismatch:
      return "delay_mismatch";
    case PlantKind::kSurrogateReactor:
      return "surrogate_reactor";
    case PlantKind::kFoptd:
      return "foptd";
    case PlantKind::kLinearTest:
      return "linear_test";
  }
  return "?";
}

PlantKind plant_kind_from_string(const std::string& s) {
  if (s == "delay_mismatch") return PlantKind::kDelayMismatch;
  if (s == "surrogate_reactor") return PlantKind::kSurrogateReactor;
  if (s == "foptd") return PlantKind::kFoptd;
  if (s == "linear_test") return PlantKind::kLinearTest;
  throw std::invalid_argument("unknown plant kind: " + s);
}

json filter_to_json(const FilterDecl& f) {
  json j;
  j["kind"] = f.kind;
  if (f.kind == "tf") {
    j["num"] = f.num;
    j["den"] = f.den;
  } else if (f.kind == "bandpass") {
    j["lo"] = f.lo;
    j["hi"] = f.hi;
  } else if (f.kind == "butter2") {
    j["cutoff"] = f.cutoff;
    j["pass"] = f.pass;
  } else if (f.kind == "laguerre") {
    json poles = json::array();
    for (const auto& p : f.poles) poles.push_back({p.real(), p.imag()});
    j["poles"] = poles;
    j["n"] = f.n;
  } else {
    throw std::invalid_argument("unknown filter kind: " + f.kind);
  }
  return j;
}

FilterDecl filter_from_json(const json& j) {
  FilterDecl f;
  f.kind = j.at("kind").get<std::string>();
  if (f.kind == "tf") {
    f.num = j.at("num").get<std::vector<double>>();
    f.den = j.at("den").get<std::vector<double>>();
  } else if (f.kind == "bandpass") {
    f.lo = j.at("lo").get<double>();
    f.hi = j.at("hi").get<double>();
  } else if (f.kind == "butter2") {
    f.cutoff = j.at("cutoff").get<double>();
    f.pass = j.value("pass", std::string("low"));
  } else if (f.kind == "laguerre") {
    for (const auto& p : j.at("poles")) {
      if (p.is_array())
        f.poles.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      else
        f.poles.emplace_back(p.get<double>(), 0.0);
    }
    f.n = j.at("n").get<int>();
  } else {
    throw std::invalid_argument("unknown filter kind: " + f.kind);
  }
  return f;
}

std::vector<lti::TransferFunction> build_filters(
    const std::vector<FilterDecl>& decls) {
  std::vector<lti::TransferFunction> out;
  for (const auto& f : decls) {
    if (f.kind == "tf") {
      out.push_back(lti::tf_from_coeffs(f.num, f.den));
    } else if (f.kind == "bandpass") {
      out.push_back(lti::make_band_pass(f.lo, f.hi));
    } else if (f.kind == "butter2") {
      out.push_back(lti::make_butterworth2(
          f.cutoff, f.pass == "high" ? lti::ButterKind::kHigh
                                     : lti::ButterKind::kLow));
    } else if (f.kind == "laguerre") {
      for (auto& tf : lti::make_laguerre_basis(f.poles, f.n))
        out.push_back(std::move(tf));
    }
  }
  return out;
}

std::vector<double> cosine_signal(double amplitude, double omega, double dt,
                                  double duration) {
  const size_t N = static_cast<size_t>(std::floor(duration / dt)) + 1;
  std::vector<double> u(N);
  for (size_t k = 0; k < N; ++k)
    u[k] = amplitude * std::cos(omega * dt * static_cast<double>(k));
  return u;
}

void write_provenance(std::ofstream& os, std::uint64_t hash) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  os << "# version " << kVersion << "\n# config_hash " << buf << "\n";
}

std::vector<double> actual_response(const PipelineConfig& cfg,
                                    const std::vector<double>& u, double dt,
                                    double theta) {
  switch (cfg.plant.kind) {
    case PlantKind::kDelayMismatch: {
      auto w = plant::delay_mismatch_channel(theta, u, dt);
      std::vector<double> y(u.size());
      for (size_t k = 0; k < u.size(); ++k) y[k] = u[k] + w[k];
      return y;
    }
    case PlantKind::kSurrogateReactor:
      return plant::simulate_nonlinear(*plant::surrogate_reactor(), u, dt);
    case PlantKind::kFoptd:
      return plant::simulate_foptd(cfg.plant.foptd, u, dt);
    case PlantKind::kLinearTest:
      return plant::simulate_nonlinear(*plant::linear_test_plant(), u, dt);
  }
  throw std::logic_error("unknown plant kind");
}

std::vector<double> nominal_response(const PipelineConfig& cfg,
                                     const std::vector<double>& u, double dt) {
  if (cfg.plant.kind == PlantKind::kDelayMismatch) return u;
  return plant::simulate_foptd(cfg.nominal, u, dt);
}

}  // namespace

std::string config_to_json(const PipelineConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["plant"]["kind"] = plant_kind_to_string(cfg.plant.kind);
  j["plant"]["theta0"] = cfg.plant.theta0;
  j["plant"]["randomize_theta"] = cfg.plant.randomize_theta;
  j["plant"]["K0"] = cfg.plant.foptd.K0;
  j["plant"]["tau0"] = cfg.plant.foptd.tau0;
  j["plant"]["delay"] = cfg.plant.foptd.theta0;
  j["nominal"]["K0"] = cfg.nominal.K0;
  j["nominal"]["tau0"] = cfg.nominal.tau0;
  j["nominal"]["theta0"] = cfg.nominal.theta0;
  j["mismatch_mode"] =
      cfg.mismatch_mode == plant::MismatchMode::kAdditive ? "additive"
                                                          : "multiplicative";
  const auto& e = cfg.excitation;
  j["excitation"]["kind"] = excitation::kind_to_string(e.kind);
  j["excitation"]["amplitude"] = e.amplitude;
  j["excitation"]["log10_omega"] = {e.log10_lo, e.log10_hi};
  j["excitation"]["bit_time"] = e.bit_time;
  j["excitation"]["terms"] = e.terms;
  j["excitation"]["duration"] = e.duration;
  j["excitation"]["dt"] = e.dt;
  j["trajectories"] = cfg.trajectory_count;
  j["bank"]["w"] = json::array();
  for (const auto& f : cfg.bank_w) j["bank"]["w"].push_back(filter_to_json(f));
  j["bank"]["v"] = json::array();
  for (const auto& f : cfg.bank_v) j["bank"]["v"].push_back(filter_to_json(f));
  j["solver"]["nu"] = cfg.solver.nu;
  j["solver"]["eps_w"] = cfg.solver.eps_w;
  j["solver"]["eps_v"] = cfg.solver.eps_v;
  j["solver"]["fix_output_block"] = cfg.solver.fix_output_block;
  j["solver"]["max_iters"] = cfg.solver.max_iters;
  j["solver"]["tol_abs"] = cfg.solver.tol_abs;
  j["solver"]["tol_rel"] = cfg.solver.tol_rel;
  j["grid"]["log10_lo"] = cfg.grid.log10_lo;
  j["grid"]["log10_hi"] = cfg.grid.log10_hi;
  j["grid"]["points"] = cfg.grid.points;
  j["out_dir"] = cfg.out_dir;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

PipelineConfig parse_config(const std::string& json_text) {
  json j = json::parse(json_text);
  PipelineConfig cfg;
  cfg.name = j.value("name", cfg.name);
  if (j.contains("plant")) {
    const auto& p = j["plant"];
    cfg.plant.kind = plant_kind_from_string(p.value("kind", "delay_mismatch"));
    cfg.plant.theta0 = p.value("theta0", cfg.plant.theta0);
    cfg.plant.randomize_theta =
        p.value("randomize_theta", cfg.plant.randomize_theta);
    cfg.plant.foptd.K0 = p.value("K0", cfg.plant.foptd.K0);
    cfg.plant.foptd.tau0 = p.value("tau0", cfg.plant.foptd.tau0);
    cfg.plant.foptd.theta0 = p.value("delay", cfg.plant.foptd.theta0);
  }
  if (j.contains("nominal")) {
    const auto& n = j["nominal"];
    cfg.nominal.K0 = n.value("K0", cfg.nominal.K0);
    cfg.nominal.tau0 = n.value("tau0", cfg.nominal.tau0);
    cfg.nominal.theta0 = n.value("theta0", cfg.nominal.theta0);
  }
  if (j.value("mismatch_mode", "additive") == std::string("multiplicative"))
    cfg.mismatch_mode = plant::MismatchMode::kMultiplicative;
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("excitation")) {
    const auto& e = j["excitation"];
    cfg.excitation.kind =
        excitation::kind_from_string(e.value("kind", "sinusoid"));
    cfg.excitation.amplitude = e.value("amplitude", cfg.excitation.amplitude);
    if (e.contains("log10_omega")) {
      cfg.excitation.log10_lo = e["log10_omega"].at(0).get<double>();
      cfg.excitation.log10_hi = e["log10_omega"].at(1).get<double>();
    }
    cfg.excitation.bit_time = e.value("bit_time", cfg.excitation.bit_time);
    cfg.excitation.terms = e.value("terms", cfg.excitation.terms);
    cfg.excitation.duration = e.value("duration", cfg.excitation.duration);
    cfg.excitation.dt = e.value("dt", cfg.excitation.dt);
  }
  cfg.excitation.seed = cfg.seed;
  cfg.trajectory_count = j.value("trajectories", cfg.trajectory_count);
  if (cfg.trajectory_count < 1)
    throw std::invalid_argument("config: trajectories must be >= 1");
  if (j.contains("bank")) {
    for (const auto& f : j["bank"].value("w", json::array()))
      cfg.bank_w.push_back(filter_from_json(f));
    for (const auto& f : j["bank"].value("v", json::array()))
      cfg.bank_v.push_back(filter_from_json(f));
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    cfg.solver.nu = s.value("nu", cfg.solver.nu);
    cfg.solver.eps_w = s.value("eps_w", cfg.solver.eps_w);
    cfg.solver.eps_v = s.value("eps_v", cfg.solver.eps_v);
    cfg.solver.fix_output_block =
        s.value("fix_output_block", cfg.solver.fix_output_block);
    cfg.solver.max_iters = s.value("max_iters", cfg.solver.max_iters);
    cfg.solver.tol_abs = s.value("tol_abs", cfg.solver.tol_abs);
    cfg.solver.tol_rel = s.value("tol_rel", cfg.solver.tol_rel);
  }
  cfg.solver.validate();
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    cfg.grid.log10_lo = g.value("log10_lo", cfg.grid.log10_lo);
    cfg.grid.log10_hi = g.value("log10_hi", cfg.grid.log10_hi);
    cfg.grid.points = g.value("points", cfg.grid.points);
  }
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.excitation.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t config_hash(const PipelineConfig& cfg) {
  const std::string text = config_to_json(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

lti::FilterBank build_bank(const PipelineConfig& cfg) {
  lti::FilterBank bank;
  bank.psi_w = build_filters(cfg.bank_w);
  bank.psi_v = build_filters(cfg.bank_v);
  if (bank.n_z() == 0) throw std::invalid_argument("config: empty filter bank");
  return bank;
}

plant::Trajectory make_trajectory(const PipelineConfig& cfg,
                                  std::uint64_t index) {
  const excitation::Signal sig = excitation::sample(cfg.excitation, index);
  plant::Trajectory traj;
  traj.dt = sig.dt;
  traj.omega = sig.omega;
  if (cfg.plant.kind == PlantKind::kDelayMismatch) {
    traj.theta = cfg.plant.randomize_theta
                     ? cfg.plant.theta0 *
                           excitation::uniform01(cfg.seed, index, 100, 0)
                     : cfg.plant.theta0;
    traj.v = sig.u;
    traj.w = plant::delay_mismatch_channel(traj.theta, sig.u, sig.dt);
    return traj;
  }
  const std::vector<double> y = actual_response(cfg, sig.u, sig.dt, 0.0);
  const std::vector<double> y0 = nominal_response(cfg, sig.u, sig.dt);
  auto [v, w] = plant::residual(sig.u, y, y0, cfg.mismatch_mode);
  traj.v = std::move(v);
  traj.w = std::move(w);
  return traj;
}

void write_gram_archive(const GramArchive& archive, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write gram archive: " + path);
  os << "# iqclearn gram archive v1\n";
  write_provenance(os, archive.config_hash);
  os << "# n_zw " << archive.n_zw << " n_zv " << archive.n_zv << "\n";
  os << "# count " << archive.records.size() << "\n";
  os << "# record: index n_z omega theta dt duration; next line row-major "
        "gamma\n";
  for (size_t i = 0; i < archive.records.size(); ++i) {
    const auto& r = archive.records[i];
    const int n = r.gamma.n_z();
    os << "record " << i << " " << n << " " << fmt(r.omega) << " "
       << fmt(r.theta) << " " << fmt(r.dt) << " " << fmt(r.duration) << "\n";
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        os << fmt(r.gamma.gamma(a, b)) << (a == n - 1 && b == n - 1 ? "" : " ");
    os << "\n";
  }
}

GramArchive read_gram_archive(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open gram archive: " + path);
  GramArchive archive;
  size_t count = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "#") {
      ls >> tok;
      if (tok == "config_hash") {
        std::string hex;
        ls >> hex;
        archive.config_hash = std::stoull(hex, nullptr, 16);
      } else if (tok == "n_zw") {
        ls >> archive.n_zw >> tok >> archive.n_zv;
      } else if (tok == "count") {
        ls >> count;
      }
      continue;
    }
    if (tok != "record")
      throw std::runtime_error("gram archive: malformed line: " + line);
    GramRecord r;
    size_t index;
    int n;
    ls >> index >> n >> r.omega >> r.theta >> r.dt >> r.duration;
    if (index != archive.records.size())
      throw std::runtime_error("gram archive: out-of-order record");
    if (!std::getline(is, line))
      throw std::runtime_error("gram archive: truncated record (partial "
                               "archives are invalid)");
    std::istringstream vs(line);
    r.gamma.gamma.resize(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (!(vs >> r.gamma.gamma(a, b)))
          throw std::runtime_error("gram archive: short matrix row");
    r.gamma.n_zw = archive.n_zw;
    r.gamma.n_zv = archive.n_zv;
    archive.records.push_back(std::move(r));
  }
  if (archive.records.size() != count)
    throw std::runtime_error(
        "gram archive: record count mismatch (partial archives are invalid)");
  return archive;
}

void write_solution(const ocsvm::Solution& sol, std::uint64_t cfg_hash,
                    const ocsvm::SolverConfig& config,
                    const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write solution: " + path);
  os << "# iqclearn solution v1\n";
  write_provenance(os, cfg_hash);
  os << "nu " << fmt(config.nu) << "\n";
  os << "eps_w " << fmt(config.eps_w) << " eps_v " << fmt(config.eps_v)
     << " fix_output_block " << (config.fix_output_block ? 1 : 0) << "\n";
  os << "n_zw " << sol.M.M_ww.rows() << " n_zv " << sol.M.M_vv.rows() << "\n";
  os << "M_ww\n";
  for (int i = 0; i < sol.M.M_ww.rows(); ++i) {
    for (int j = 0; j < sol.M.M_ww.cols(); ++j)
      os << fmt(sol.M.M_ww(i, j)) << (j + 1 < sol.M.M_ww.cols() ? " " : "\n");
  }
  os << "M_vv\n";
  for (int i = 0; i < sol.M.M_vv.rows(); ++i) {
    for (int j = 0; j < sol.M.M_vv.cols(); ++j)
      os << fmt(sol.M.M_vv(i, j)) << (j + 1 < sol.M.M_vv.cols() ? " " : "\n");
  }
  os << "rho " << fmt(sol.rho) << "\n";
  os << "objective " << fmt(sol.objective) << "\n";
  os << "iterations " << sol.iterations << " converged "
     << (sol.converged ? 1 : 0) << " primal_residual "
     << fmt(sol.primal_residual) << " dual_residual "
     << fmt(sol.dual_residual) << "\n";
  os << "xi";
  for (double x : sol.xi) os << " " << fmt(x);
  os << "\n";
}

ocsvm::Solution read_solution(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open solution: " + path);
  ocsvm::Solution sol;
  std::string line;
  int n_zw = 0, n_zv = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "n_zw") {
      ls >> n_zw;
      std::string t;
      ls >> t >> n_zv;
    } else if (key == "M_ww") {
      sol.M.M_ww.resize(n_zw, n_zw);
      for (int i = 0; i < n_zw; ++i) {
        std::getline(is, line);
        std::istringstream rs(line);
        for (int j = 0; j < n_zw; ++j) rs >> sol.M.M_ww(i, j);
      }
    } else if (key == "M_vv") {
      sol.M.M_vv.resize(n_zv, n_zv);
      for (int i = 0; i < n_zv; ++i) {
        std::getline(is, line);
        std::istringstream rs(line);
        for (int j = 0; j < n_zv; ++j) rs >> sol.M.M_vv(i, j);
      }
    } else if (key == "rho") {
      ls >> sol.rho;
    } else if (key == "objective") {
      ls >> sol.objective;
    } else if (key == "iterations") {
      std::string t;
      int conv = 0;
      ls >> sol.iterations >> t >> conv >> t >> sol.primal_residual >> t >>
          sol.dual_residual;
      sol.converged = conv != 0;
    } else if (key == "xi") {
      double x;
      while (ls >> x) {
        sol.xi.push_back(x);
        sol.rho_star.push_back(sol.rho - x);
      }
    }
  }
  return sol;
}

GramArchive cmd_generate(const PipelineConfig& cfg, bool dump_trajectories) {
  const lti::FilterBank bank = build_bank(cfg);
  fs::create_directories(cfg.out_dir);
  GramArchive archive;
  archive.config_hash = config_hash(cfg);
  archive.n_zw = bank.n_zw();
  archive.n_zv = bank.n_zv();
  archive.records.resize(cfg.trajectory_count);

  const long m = cfg.trajectory_count;
  std::vector<std::string> errors(m);
  bool failed = false;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < m; ++i) {
    try {
      const plant::Trajectory traj =
          make_trajectory(cfg, static_cast<std::uint64_t>(i));
      auto z = lti::filter_bank_apply(bank, traj.w, traj.v, traj.dt);
      GramRecord rec;
      rec.gamma = gram::compute_gram(z, traj.dt, bank.n_zw());
      rec.omega = traj.omega;
      rec.theta = traj.theta;
      rec.dt = traj.dt;
      rec.duration = traj.dt * (traj.v.size() - 1);
      archive.records[i] = std::move(rec);
      if (dump_trajectories) {
        std::ofstream ts(fs::path(cfg.out_dir) /
                         ("trajectory_" + std::to_string(i) + ".txt"));
        ts << "# t v w\n";
        for (size_t k = 0; k < traj.v.size(); ++k)
          ts << fmt(k * traj.dt) << " " << fmt(traj.v[k]) << " "
             << fmt(traj.w[k]) << "\n";
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) {
    std::ostringstream msg;
    msg << "cmd_generate failed:";
    for (long i = 0; i < m; ++i)
      if (!errors[i].empty()) msg << " [trajectory " << i << ": " << errors[i]
                                  << "]";
    throw std::runtime_error(msg.str());
  }
  write_gram_archive(archive, (fs::path(cfg.out_dir) / "grams.txt").string());
  std::ofstream meta(fs::path(cfg.out_dir) / "generate_meta.txt");
  meta << "# iqclearn generate metadata\n";
  write_provenance(meta, archive.config_hash);
  meta << "trajectories " << m << "\n";
  meta << "# index omega theta dt duration\n";
  for (long i = 0; i < m; ++i) {
    const auto& r = archive.records[i];
    meta << i << " " << fmt(r.omega) << " " << fmt(r.theta) << " "
         << fmt(r.dt) << " " << fmt(r.duration) << "\n";
  }
  return archive;
}

ocsvm::Solution cmd_learn(const PipelineConfig& cfg,
                          const GramArchive& archive) {
  std::vector<gram::GramMatrix> grams;
  grams.reserve(archive.records.size());
  for (const auto& r : archive.records) grams.push_back(r.gamma);
  ocsvm::Solution sol = ocsvm::solve(grams, cfg.solver);
  fs::create_directories(cfg.out_dir);
  write_solution(sol, config_hash(cfg), cfg.solver,
                 (fs::path(cfg.out_dir) / "solution.txt").string());
  const auto st = ocsvm::margin_violation_stats(sol);
  std::ofstream os(fs::path(cfg.out_dir) / "learn_summary.txt");
  write_provenance(os, config_hash(cfg));
  os << "mean_violation " << fmt(st.mean_violation) << "\n";
  os << "violating_count " << st.violating_count << "\n";
  os << "rho " << fmt(st.rho) << "\n";
  os << "rho_star_min " << fmt(st.rho_star_min) << "\n";
  os << "objective " << fmt(sol.objective) << "\n";
  os << "iterations " << sol.iterations << "\n";
  os << "converged " << (sol.converged ? 1 : 0) << "\n";
  return sol;
}

EvalResult cmd_eval(const PipelineConfig& cfg, const ocsvm::Solution& sol) {
  const lti::FilterBank bank = build_bank(cfg);
  if (sol.M.M_vv.rows() != bank.n_zv())
    throw std::invalid_argument("cmd_eval: solution/bank dimension mismatch");
  EvalResult res;
  res.learned = iqc::curve_over_grid(bank, sol.M.M_vv, cfg.grid);
  res.learned.provenance = cfg.name;

  const double theta0 = cfg.plant.kind == PlantKind::kDelayMismatch
                            ? cfg.plant.theta0
                            : cfg.nominal.theta0;
  auto ell0 = [theta0](double w) { return plant::ell0_delay(w, theta0); };
  res.vs_ell0 = iqc::compare_with_reference(res.learned, ell0);
  res.vs_megretski =
      iqc::compare_with_reference(res.learned, plant::ell_megretski);

  fs::create_directories(cfg.out_dir);
  const std::uint64_t h = config_hash(cfg);
  auto emit = [&](const std::string& name,
                  const std::function<double(double)>& f) {
    std::ofstream os(fs::path(cfg.out_dir) / (name + ".txt"));
    os << "# iqclearn curve " << name << "\n";
    write_provenance(os, h);
    os << "# omega ell\n";
    for (size_t i = 0; i < res.learned.omega.size(); ++i)
      os << fmt(res.learned.omega[i]) << " " << fmt(f(res.learned.omega[i]))
         << "\n";
  };
  {
    std::ofstream os(fs::path(cfg.out_dir) / "curve_learned.txt");
    os << "# iqclearn curve learned\n";
    write_provenance(os, h);
    os << "# bank n_zw " << bank.n_zw() << " n_zv " << bank.n_zv() << "\n";
    os << "# omega ell\n";
    for (size_t i = 0; i < res.learned.omega.size(); ++i)
      os << fmt(res.learned.omega[i]) << " " << fmt(res.learned.ell[i]) << "\n";
  }
  emit("curve_ell0", ell0);
  emit("curve_megretski", plant::ell_megretski);

  std::ofstream os(fs::path(cfg.out_dir) / "eval_summary.txt");
  write_provenance(os, h);
  auto dump_cmp = [&](const std::string& tag, const iqc::CurveComparison& c) {
    os << tag << "_overestimation_fraction " << fmt(c.overestimation_fraction)
       << "\n"
       << tag << "_learned_lo " << fmt(c.learned_lo) << "\n"
       << tag << "_learned_hi " << fmt(c.learned_hi) << "\n"
       << tag << "_reference_lo " << fmt(c.reference_lo) << "\n"
       << tag << "_reference_hi " << fmt(c.reference_hi) << "\n"
       << tag << "_max_ratio " << fmt(c.max_ratio) << "\n"
       << tag << "_argmax_omega " << fmt(c.argmax_omega) << "\n";
  };
  dump_cmp("ell0", res.vs_ell0);
  dump_cmp("megretski", res.vs_megretski);
  try {
    os << "half_rise_frequency " << fmt(iqc::half_rise_frequency(res.learned))
       << "\n";
  } catch (const std::exception&) {
    os << "half_rise_frequency nan\n";
  }
  return res;
}

void cmd_verify(const PipelineConfig& cfg, const std::vector<double>& omegas) {
  fs::create_directories(cfg.out_dir);
  const std::uint64_t h = config_hash(cfg);
  for (size_t i = 0; i < omegas.size(); ++i) {
    const double omega = omegas[i];
    try {
      const double dt =
          std::min(cfg.excitation.dt, 2.0 * M_PI / (200.0 * omega));
      const double T = cfg.excitation.duration > 0.0
                           ? cfg.excitation.duration
                           : std::min(std::max(20.0 * 2.0 * M_PI / omega, 50.0),
                                      200.0);
      const auto u = cosine_signal(cfg.excitation.amplitude, omega, dt, T);
      const auto y = actual_response(cfg, u, dt, cfg.plant.theta0);
      const auto y0 = nominal_response(cfg, u, dt);
      std::ofstream os(fs::path(cfg.out_dir) /
                       ("verify_" + std::to_string(i) + ".txt"));
      os << "# iqclearn verify omega " << fmt(omega) << "\n";
      write_provenance(os, h);
      os << "# t u y y0 w\n";
      for (size_t k = 0; k < u.size(); ++k)
        os << fmt(k * dt) << " " << fmt(u[k]) << " " << fmt(y[k]) << " "
           << fmt(y0[k]) << " " << fmt(y[k] - y0[k]) << "\n";
    } catch (const std::exception& e) {
      throw std::runtime_error("cmd_verify: omega " + fmt(omega) + ": " +
                               e.what());
    }
  }
}

void run_all(const PipelineConfig& cfg) {
  const GramArchive archive = cmd_generate(cfg);
  const ocsvm::Solution sol = cmd_learn(cfg, archive);
  cmd_eval(cfg, sol);
}

}  // namespace iqclearn::pipeline
