#include "nullsteer/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "nullsteer/charge.hpp"
#include "nullsteer/csv.hpp"
#include "nullsteer/evolution.hpp"
#include "nullsteer/perturbation.hpp"
#include "nullsteer/survival.hpp"
#include "nullsteer/svg.hpp"

#ifndef NULLSTEER_VERSION
#define NULLSTEER_VERSION "0.0.0"
#endif

namespace nullsteer {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version() { return NULLSTEER_VERSION; }

unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NULLSTEER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(std::min(v, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first;
  std::mutex mu;
  auto work = [&] {
    while (!stop) {
      const std::size_t i = next++;
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
        stop = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

namespace {

json vector_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

json model_json(const ModelSpec& m) {
  json j{{"type", m.type}};
  if (m.type == "two_level" || m.type == "three_level_chain" || m.type == "exceptional_three_level") {
    j["gamma"] = m.gamma;
  } else if (m.type == "v_atom") {
    j.update({{"E_G", m.e_g}, {"E_D", m.e_d}, {"E_B", m.e_b}, {"gamma1", m.gamma1}, {"gamma2", m.gamma2}});
  } else if (m.type == "glued_tree") {
    j["d"] = m.depth;
  } else if (m.type == "custom") {
    j["dim"] = m.matrix.rows();
  }
  return j;
}

struct Context {
  const ExperimentConfig& cfg;
  fs::path out;
  RunOptions opts;
  HermitianModel model;
  SpectralDecomposition decomp;
  DetectionState psi_d;
  std::optional<CVector> psi_in;
  double tie_tol = 1e-6;
  SpectrumOptions spec_opts;
  RegimeOptions regime_opts;
  RunResult result;
  json extra = json::object();

  fs::path file(const std::string& name) {
    result.files.push_back(out / name);
    return out / name;
  }
};

void require_single_tau(const Context& c) {
  if (c.cfg.tau.sweep) c.cfg.reject("/tau", "experiment '" + c.cfg.experiment + "' takes a single tau");
}

void run_spectrum(Context& c, bool full) {
  require_single_tau(c);
  const double tau = c.cfg.tau.value;
  const auto cfg = charges(c.decomp, c.psi_d, tau, c.spec_opts.zero_threshold);
  const auto roots = stationary_points(cfg, c.tie_tol);
  if (full) {
    const auto sp = full_spectrum(c.decomp, c.psi_d, tau, c.spec_opts);
    write_spectrum_csv(c.file("spectrum.csv"), sp);
    c.extra["counts"] = {{"zero", sp.n_zero}, {"disk", sp.n_disk}, {"circle", sp.n_circle}};
    c.extra["exceptional"] = sp.exceptional_flag;
    c.extra["aliased"] = sp.aliased;
    c.extra["min_biorthogonal_overlap"] = sp.min_biorthogonal_overlap;
    if (!sp.exceptional_flag) c.extra["completeness_deviation"] = completeness_check(sp);
  }
  write_charges_csv(c.file("charges.csv"), cfg);
  write_roots_csv(c.file("roots.csv"), roots);
  write_text(c.file("charges.svg"), disk_plot_svg("charges and stationary points, tau = " + format_double(tau), cfg,
                                                  roots.roots));
  try {
    const auto z = zeno_bound(c.decomp, tau);
    c.extra["zeno_bound"] = {{"bound", z.bound}, {"t_b", z.t_b}, {"n_b", z.n_b}, {"delta_e", z.delta_e}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::bound_not_applicable) throw;
    c.extra["zeno_bound"] = "not applicable";
  }
}

void run_evolve(Context& c) {
  require_single_tau(c);
  const double tau = c.cfg.tau.value;
  const auto s = build_survival(propagator(c.decomp, tau), c.psi_d, tau);
  const bool dump = c.opts.dump_states || c.cfg.dump_states;
  Trajectory traj;
  try {
    traj = evolve(s, *c.psi_in, c.cfg.n_steps, c.model.hamiltonian, dump);
  } catch (const CertainDetection& e) {
    // Keep the record up to the last successful null measurement.
    traj = evolve(s, *c.psi_in, e.step() - 1, c.model.hamiltonian, dump);
    write_trajectory_csv(c.file("trajectory.csv"), traj, c.model.basis_labels, dump);
    c.result.exit_code = exit_certain_detection;
    c.result.detection_step = e.step();
    c.result.message = e.what();
    return;
  }
  write_trajectory_csv(c.file("trajectory.csv"), traj, c.model.basis_labels, dump);
  Series energy{{}, {}, "mean energy", "#d62728", false};
  for (const auto& r : traj.records) {
    energy.x.push_back(static_cast<double>(r.n));
    energy.y.push_back(r.mean_energy);
  }
  write_text(c.file("energy.svg"),
             line_plot_svg({"mean energy under null measurements", "n", "<E>", false, 640, 400}, {energy}));
}

struct RegimeRow {
  double tau = 0.0;
  std::string kind;
  double max_abs_xi = 0.0;
  std::int64_t n_argmax = 0;
  double predicted_energy = 0.0;
  double dark_weight = 0.0;
  double relative_phase = 0.0;
  double energy_1 = 0.0, energy_2 = 0.0;
  cplx xi_1{0.0, 0.0}, xi_2{0.0, 0.0};
  std::int64_t crossover = 0;
  bool exceptional = false;
  bool aliased = false;
  double zeno = 0.0;
};

RegimeRow regime_row(const Context& c, double tau) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  RegimeRow row;
  row.tau = tau;
  row.predicted_energy = row.relative_phase = row.energy_1 = row.energy_2 = nan;
  row.xi_1 = row.xi_2 = cplx(nan, nan);
  row.zeno = nan;
  const auto sp = full_spectrum(c.decomp, c.psi_d, tau, c.spec_opts);
  row.max_abs_xi = sp.roots.max_abs;
  row.exceptional = sp.exceptional_flag;
  row.aliased = sp.aliased;
  const auto reg = classify_regime(sp, *c.psi_in, c.model.hamiltonian, c.regime_opts);
  row.kind = std::string(to_string(reg.kind));
  row.dark_weight = reg.dark_weight;
  if (reg.predicted_energy) row.predicted_energy = *reg.predicted_energy;
  if (reg.kind == RegimeKind::FixedPoint || reg.kind == RegimeKind::Oscillatory) {
    row.n_argmax = static_cast<std::int64_t>(reg.dominant.size());
    if (!reg.dominant.empty()) row.xi_1 = sp.triples[reg.dominant[0]].xi;
    if (reg.dominant.size() > 1) row.xi_2 = sp.triples[reg.dominant[1]].xi;
  }
  if (reg.kind == RegimeKind::Oscillatory) {
    row.relative_phase = reg.relative_phase;
    row.energy_1 = reg.oscillation_energies[0];
    row.energy_2 = reg.oscillation_energies[1];
  }
  if (reg.kind != RegimeKind::Exceptional) row.crossover = crossover_step(sp, reg, *c.psi_in);
  try {
    row.zeno = zeno_bound(c.decomp, tau).bound;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::bound_not_applicable) throw;
  }
  return row;
}

void run_regime(Context& c, const std::string& name) {
  const auto taus = c.cfg.tau.values();
  std::vector<RegimeRow> rows(taus.size());
  parallel_for(taus.size(), worker_count(c.opts.threads), [&](std::size_t i) { rows[i] = regime_row(c, taus[i]); });

  CsvWriter w(c.file(name + ".csv"),
              {"tau", "regime", "max_abs_xi", "n_dominant", "predicted_energy", "dark_weight", "re_xi_1", "im_xi_1",
               "re_xi_2", "im_xi_2", "relative_phase", "energy_1", "energy_2", "crossover_step", "exceptional",
               "aliased", "zeno_bound"});
  Series top{{}, {}, "max |xi|", "#1f77b4", taus.size() > 60};
  Series bound{{}, {}, "cos(dE tau/2)", "#2ca02c", false};
  for (const auto& r : rows) {
    w.row({r.tau, r.kind, r.max_abs_xi, r.n_argmax, r.predicted_energy, r.dark_weight, r.xi_1.real(), r.xi_1.imag(),
           r.xi_2.real(), r.xi_2.imag(), r.relative_phase, r.energy_1, r.energy_2, r.crossover,
           std::int64_t{r.exceptional}, std::int64_t{r.aliased}, r.zeno});
    top.x.push_back(r.tau);
    top.y.push_back(r.max_abs_xi);
    bound.x.push_back(r.tau);
    bound.y.push_back(r.zeno);
  }
  write_text(c.file(name + ".svg"), line_plot_svg({"largest disk eigenvalue modulus", "tau", "|xi|", false, 640, 400},
                                                  {top, bound}));
}

void run_perturb(Context& c) {
  require_single_tau(c);
  const double tau = c.cfg.tau.value;
  const auto cfg = charges(c.decomp, c.psi_d, tau, c.spec_opts.zero_threshold);
  const auto roots = stationary_points(cfg, c.tie_tol);
  const VectorContext vc{&c.decomp, &c.psi_d};
  std::vector<EstimateRow> rows;
  json warnings = json::array();
  for (const auto& p : c.cfg.perturbations) {
    for (std::size_t k : p.levels) {
      if (k >= cfg.charges.size()) c.cfg.reject(p.pointer + "/levels", "level index out of range");
    }
    EstimateRow row;
    try {
      if (p.scheme == "weak_charge") row.estimate = weak_charge_estimate(cfg, p.levels[0], vc);
      else if (p.scheme == "two_merge") row.estimate = two_merge_estimate(cfg, p.levels[0], p.levels[1], vc);
      else if (p.scheme == "triple_charge")
        row.estimate = triple_charge_estimate(cfg, p.levels[0], {p.levels[1], p.levels[2]}, p.delta, vc);
      else row.estimate = zeno_time_estimate(c.decomp, tau);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::not_applicable || e.code() == ErrorCode::degenerate) c.cfg.reject(p.pointer, e.what());
      throw;
    }
    for (const cplx& x : row.estimate.xi_estimates) {
      std::optional<cplx> best;
      for (const cplx& r : roots.roots) {
        if (!best || std::abs(r - x) < std::abs(*best - x)) best = r;
      }
      row.exact.push_back(best);
    }
    for (const auto& msg : row.estimate.warnings) warnings.push_back(p.scheme + ": " + msg);
    rows.push_back(std::move(row));
  }
  write_estimates_csv(c.file("estimates.csv"), rows);
  write_charges_csv(c.file("charges.csv"), cfg);
  write_roots_csv(c.file("roots.csv"), roots);
  std::vector<cplx> marks = roots.roots;
  write_text(c.file("charges.svg"), disk_plot_svg("charges and stationary points", cfg, marks));
  c.extra["warnings"] = warnings;
}

void write_manifest(const Context& c, double seconds) {
  const auto& t = c.cfg.tol;
  json m;
  m["version"] = version();
  m["config"] = c.cfg.source_name;
  m["experiment"] = c.cfg.experiment;
  m["model"] = model_json(c.cfg.model);
  m["dimension"] = c.model.dim();
  m["detection"] = vector_json(c.psi_d.vector);
  if (c.psi_in) m["initial_state"] = vector_json(*c.psi_in);
  m["tau"] = c.cfg.tau.values();
  m["n_steps"] = c.cfg.n_steps;
  m["dump_states"] = c.opts.dump_states || c.cfg.dump_states;
  m["tolerances"] = {{"grouping_tol", c.decomp.grouping_tol},
                     {"tie_tol", c.tie_tol},
                     {"zero_threshold", t.zero_threshold},
                     {"orthogonality_tol", t.orthogonality_tol},
                     {"dark_overlap_tol", t.dark_overlap_tol},
                     {"participation_tol", c.regime_opts.participation_tol},
                     {"alias_tol", alias_tol},
                     {"exceptional_coalescence_tol", 1e-8},
                     {"exceptional_biorthogonality_tol", 1e-8},
                     {"certain_detection_tol", 1e-14}};
  m["levels"] = c.decomp.w();
  m["threads"] = worker_count(c.opts.threads);
  m["exit_code"] = c.result.exit_code;
  if (!c.result.message.empty()) m["message"] = c.result.message;
  if (c.result.detection_step) m["certain_detection_step"] = *c.result.detection_step;
  json files = json::array();
  for (const auto& f : c.result.files) files.push_back(f.filename().string());
  m["files"] = files;
  m["results"] = c.extra;
  m["wall_time_seconds"] = seconds;
  write_text(c.out / "manifest.json", m.dump(2) + "\n");
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const fs::path& out_dir, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::invalid_input, "cannot create output directory " + out_dir.string());

  Context c{config, out_dir, options, build_model(config), {}, {}, {}, 1e-6, {}, {}, {}};
  c.decomp = spectral_decompose(c.model, options.grouping_tol ? options.grouping_tol : config.tol.grouping_tol);
  c.tie_tol = options.tie_tol.value_or(config.tol.tie_tol);
  c.spec_opts = {config.tol.zero_threshold, c.tie_tol, config.tol.orthogonality_tol};
  c.regime_opts = {c.tie_tol, config.tol.dark_overlap_tol, 1e-12};
  c.psi_d = make_state(resolve_state(config, config.detection, c.model, c.decomp), "detection");
  if (config.initial_state) {
    c.psi_in = resolve_state(config, *config.initial_state, c.model, c.decomp);
  } else if (config.experiment == "regime" || config.experiment == "sweep-tau") {
    c.psi_in = c.decomp.levels.front().vectors.col(0);
    c.extra["initial_state_default"] = "ground state";
  }

  const auto& ex = config.experiment;
  if (ex == "spectrum") run_spectrum(c, true);
  else if (ex == "charges") run_spectrum(c, false);
  else if (ex == "evolve") run_evolve(c);
  else if (ex == "regime") run_regime(c, config.tau.sweep ? "sweep" : "regime");
  else if (ex == "sweep-tau") run_regime(c, "sweep");
  else if (ex == "perturb") run_perturb(c);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.result.files.push_back(out_dir / "manifest.json");
  write_manifest(c, secs);
  return c.result;
}

RunResult result_from_exception(std::exception_ptr error) {
  RunResult r;
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError& e) {
    r.exit_code = exit_config;
    r.message = e.what();
  } catch (const CertainDetection& e) {
    r.exit_code = exit_certain_detection;
    r.detection_step = e.step();
    r.message = e.what();
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::invalid_parameter:
      case ErrorCode::invalid_matrix:
      case ErrorCode::invalid_input:
      case ErrorCode::config_error:
        r.exit_code = exit_config;
        break;
      default:
        r.exit_code = exit_numerical;
    }
    r.message = e.what();
  } catch (const std::exception& e) {
    r.exit_code = exit_numerical;
    r.message = e.what();
  }
  return r;
}

RunResult run_config_file(const fs::path& config_path, const fs::path& out_dir, const RunOptions& options) {
  try {
    return run_experiment(load_config(config_path), out_dir, options);
  } catch (...) {
    return result_from_exception(std::current_exception());
  }
}

}  // namespace nullsteer
