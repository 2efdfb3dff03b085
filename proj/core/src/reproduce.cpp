#include <chrono>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "nullsteer/charge.hpp"
#include "nullsteer/csv.hpp"
#include "nullsteer/evolution.hpp"
#include "nullsteer/runner.hpp"
#include "nullsteer/survival.hpp"
#include "nullsteer/svg.hpp"

namespace nullsteer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();
const char* const palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd"};

struct Figure {
  fs::path out;
  RunResult result;
  json params = json::object();

  fs::path file(const std::string& name) {
    result.files.push_back(out / name);
    return out / name;
  }
};

// Steps 0..n_max with every step up to dense, then roughly 200 per decade.
std::vector<std::int64_t> sample_steps(std::int64_t n_max, std::int64_t dense) {
  std::vector<std::int64_t> out;
  for (std::int64_t n = 0; n <= std::min(dense, n_max); ++n) out.push_back(n);
  double x = static_cast<double>(dense);
  while (true) {
    x *= std::pow(10.0, 1.0 / 200.0);
    const auto n = static_cast<std::int64_t>(std::llround(x));
    if (n > n_max) break;
    if (n > out.back()) out.push_back(n);
  }
  if (out.back() != n_max) out.push_back(n_max);
  return out;
}

// Iterates the survival operator and records f(state) at the requested steps.
template <class F>
std::vector<double> trace(const SurvivalOperator& s, CVector psi, const std::vector<std::int64_t>& at, F f) {
  std::vector<double> out;
  out.reserve(at.size());
  std::int64_t n = 0;
  for (std::int64_t target : at) {
    while (n < target) psi = step(s, psi, ++n).psi;
    out.push_back(f(psi));
  }
  return out;
}

std::vector<double> as_double(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

std::vector<double> sorted_moduli(const StationaryPoints& roots) {
  std::vector<double> m;
  for (const cplx& r : roots.roots) m.push_back(std::abs(r));
  return m;
}

void fig3(Figure& f) {
  const auto model = build_three_level_chain(1.0);
  const auto decomp = spectral_decompose(model);
  const auto psi_d = basis_state(model, "0");
  const int count = 600;
  const double t0 = 0.01, t1 = 6.0;
  f.params = {{"model", "three_level_chain"}, {"gamma", 1.0}, {"detection", "0"}, {"tau_start", t0},
              {"tau_stop", t1}, {"tau_steps", count}};

  CsvWriter w(f.file("fig3.csv"), {"tau", "abs_xi_1", "abs_xi_2", "zeno_bound"});
  Series s1{{}, {}, "|xi_1|", palette[0], false};
  Series s2{{}, {}, "|xi_2|", palette[1], false};
  Series sb{{}, {}, "cos(dE tau/2)", palette[2], false};
  for (int i = 0; i < count; ++i) {
    const double tau = t0 + (t1 - t0) * i / (count - 1);
    const auto m = sorted_moduli(stationary_points(charges(decomp, psi_d, tau)));
    double bound = nan_value;
    if (decomp.delta_e() * tau < pi) bound = zeno_bound(decomp, tau).bound;
    const double a = m.size() > 0 ? m[0] : nan_value;
    const double b = m.size() > 1 ? m[1] : nan_value;
    w.row({tau, a, b, bound});
    s1.x.push_back(tau), s1.y.push_back(a);
    s2.x.push_back(tau), s2.y.push_back(b);
    if (!std::isnan(bound)) sb.x.push_back(tau), sb.y.push_back(bound);
  }
  std::vector<std::string> panels{
      line_plot_svg({"|xi| versus tau", "tau", "|xi|", false, 420, 420}, {s1, s2, sb})};
  for (double tau : {0.1, 2.0, 4.31697, 4.0}) {
    const auto cfg = charges(decomp, psi_d, tau);
    panels.push_back(disk_plot_svg("tau = " + std::to_string(tau).substr(0, 7), cfg, stationary_points(cfg).roots));
  }
  write_text(f.file("fig3.svg"), side_by_side_svg(panels, 420, 420));
}

void fig4(Figure& f) {
  const auto model = build_three_level_chain(1.0);
  const auto decomp = spectral_decompose(model);
  const auto psi_d = basis_state(model, "0");
  const CVector psi_in = basis_state(model, "2").vector;
  const std::vector<std::pair<double, std::int64_t>> runs{{0.1, 1000000}, {2.0, 50}, {4.31697, 300}, {4.0, 300}};
  f.params = {{"model", "three_level_chain"}, {"gamma", 1.0}, {"detection", "0"}, {"initial_state", "2"}};

  CsvWriter w(f.file("fig4.csv"), {"tau", "n", "mean_energy"});
  std::vector<std::string> panels;
  std::size_t c = 0;
  for (const auto& [tau, n_max] : runs) {
    const auto s = build_survival(propagator(decomp, tau), psi_d, tau);
    const auto at = n_max > 1000 ? sample_steps(n_max, 100) : sample_steps(n_max, n_max);
    const auto e = trace(s, psi_in, at, [&](const CVector& v) { return mean_energy(model.hamiltonian, v); });
    for (std::size_t i = 0; i < at.size(); ++i) w.row({tau, at[i], e[i]});
    Series series{as_double(at), e, "tau = " + std::to_string(tau).substr(0, 7), palette[c++], true};
    if (n_max > 1000) series.x.erase(series.x.begin()), series.y.erase(series.y.begin());
    panels.push_back(line_plot_svg({series.label, "n", "<E>", n_max > 1000, 420, 320}, {series}));
    f.params["runs"].push_back({{"tau", tau}, {"n_steps", n_max}});
  }
  write_text(f.file("fig4.svg"), side_by_side_svg(panels, 420, 320));
}

void fig5(Figure& f) {
  const auto model = build_v_atom(0.0, 3.0, 5.0, 0.01, 1.0);
  const auto decomp = spectral_decompose(model);
  const auto psi_d = basis_state(model, "B");
  const CVector psi_in = basis_state(model, "G").vector;
  const Eigen::Index d = model.label_index("D");
  const double tau = 0.5;
  const std::int64_t n_max = 200;
  f.params = {{"model", "v_atom"}, {"E_G", 0.0}, {"E_D", 3.0}, {"E_B", 5.0}, {"gamma1", 0.01}, {"gamma2", 1.0},
              {"detection", "B"}, {"initial_state", "G"}, {"tau", tau}, {"n_steps", n_max}};

  const auto s = build_survival(propagator(decomp, tau), psi_d, tau);
  const auto traj = evolve(s, psi_in, n_max, model.hamiltonian, true);
  const auto sp = full_spectrum(decomp, psi_d, tau);
  const auto reg = classify_regime(sp, psi_in, model.hamiltonian);
  const double predicted = reg.predicted_energy.value_or(nan_value);
  f.params["predicted_energy"] = predicted;

  CsvWriter w(f.file("fig5.csv"), {"n", "mean_energy", "probability_D", "predicted_energy"});
  Series energy{{}, {}, "<E>", palette[0], true};
  Series pd{{}, {}, "P(D)", palette[2], true};
  Series theory{{}, {}, "large-n prediction", palette[0], false};
  for (const auto& r : traj.records) {
    const double p = std::norm(r.state[d]);
    w.row({r.n, r.mean_energy, p, predicted});
    energy.x.push_back(static_cast<double>(r.n)), energy.y.push_back(r.mean_energy);
    pd.x.push_back(static_cast<double>(r.n)), pd.y.push_back(p);
  }
  theory.x = {0.0, static_cast<double>(n_max)};
  theory.y = {predicted, predicted};
  write_text(f.file("fig5.svg"),
             side_by_side_svg({line_plot_svg({"mean energy", "n", "<E>", false, 480, 360}, {energy, theory}),
                               line_plot_svg({"probability in D", "n", "P(D)", false, 480, 360}, {pd})},
                              480, 360));
}

struct TreeSetup {
  HermitianModel model = build_glued_tree(3);
  SpectralDecomposition decomp = spectral_decompose(model);
  DetectionState psi_d = basis_state(model, glued_tree_label(0, 0));
};

void energy_traces(Figure& f, const std::string& id, const TreeSetup& t,
                   const std::vector<std::pair<std::string, CVector>>& states, const std::vector<double>& taus,
                   std::int64_t n_max, std::int64_t dense, bool theory) {
  CsvWriter w(f.file(id + ".csv"), {"series", "tau", "n", "mean_energy", "predicted_energy", "theory_energy"});
  std::vector<std::string> panels;
  std::size_t c = 0;
  for (double tau : taus) {
    const auto s = build_survival(propagator(t.decomp, tau), t.psi_d, tau);
    const auto sp = full_spectrum(t.decomp, t.psi_d, tau);
    for (const auto& [name, psi_in] : states) {
      const auto reg = classify_regime(sp, psi_in, t.model.hamiltonian);
      const double predicted = reg.predicted_energy.value_or(nan_value);
      std::optional<OscillationDescriptor> osc;
      if (theory && reg.kind == RegimeKind::Oscillatory && reg.dominant.size() == 2) {
        osc = oscillation_descriptor(sp, reg, psi_in);
      }
      const auto at = sample_steps(n_max, dense);
      const auto e = trace(s, psi_in, at, [&](const CVector& v) { return mean_energy(t.model.hamiltonian, v); });
      Series sim{{}, {}, name + ", tau = " + std::to_string(tau).substr(0, 4), palette[c % 5], true};
      Series th{{}, {}, "theory", palette[(c + 1) % 5], false};
      for (std::size_t i = 0; i < at.size(); ++i) {
        const double te = osc ? osc->energy_at(at[i], t.model.hamiltonian) : nan_value;
        w.row({name, tau, at[i], e[i], predicted, te});
        if (at[i] == 0 && n_max > dense) continue;
        sim.x.push_back(static_cast<double>(at[i])), sim.y.push_back(e[i]);
        if (osc) th.x.push_back(static_cast<double>(at[i])), th.y.push_back(te);
      }
      std::vector<Series> series{sim};
      if (osc) series.push_back(th);
      if (!std::isnan(predicted)) {
        series.push_back({{sim.x.front(), sim.x.back()}, {predicted, predicted}, "large-n prediction",
                          palette[(c + 2) % 5], false});
      }
      panels.push_back(line_plot_svg({sim.label, "n", "<E>", n_max > dense, 480, 360}, series));
      f.params["runs"].push_back({{"series", name},
                                  {"tau", tau},
                                  {"n_steps", n_max},
                                  {"regime", std::string(to_string(reg.kind))},
                                  {"predicted_energy", predicted}});
      ++c;
    }
  }
  write_text(f.file(id + ".svg"), side_by_side_svg(panels, 480, 360));
}

void fig8(Figure& f) {
  const TreeSetup t;
  f.params = {{"model", "glued_tree"}, {"d", 3}, {"detection", glued_tree_label(0, 0)}, {"initial_state", "ground"}};
  energy_traces(f, "fig8", t, {{"ground", t.decomp.levels.front().vectors.col(0)}}, {1.2, 1.25}, 400, 400, true);
}

void fig9(Figure& f) {
  const TreeSetup t;
  const auto& lv = t.decomp.levels;
  const CVector e2 = lv.at(2).vectors.col(0), e10 = lv.at(10).vectors.col(0), e5 = lv.at(5).vectors.col(0),
                e6 = lv.at(6).vectors.col(0);
  f.params = {{"model", "glued_tree"}, {"d", 3}, {"detection", glued_tree_label(0, 0)}};
  energy_traces(f, "fig9", t,
                {{"E2+E10", (e2 + e10) / std::sqrt(2.0)},
                 {"E2+E10+E5", (e2 + e10 + e5) / std::sqrt(3.0)},
                 {"E2+E10+E5+E6", (e2 + e10 + e5 + e6) / 2.0}},
                {1.2}, 200000, 200, false);
}

void fig11(Figure& f) {
  const TreeSetup t;
  f.params = {{"model", "glued_tree"}, {"d", 3}, {"detection", glued_tree_label(0, 0)}, {"initial_state", "ground"}};
  energy_traces(f, "fig11", t, {{"ground", t.decomp.levels.front().vectors.col(0)}}, {2.3, 2.35}, 400, 400, true);
}

}  // namespace

std::vector<std::string> figure_ids() { return {"fig3", "fig4", "fig5", "fig8", "fig9", "fig11"}; }

RunResult reproduce(const std::string& figure_id, const fs::path& out_dir, const RunOptions& /*options*/) {
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::invalid_input, "cannot create output directory " + out_dir.string());
  Figure f{out_dir, {}, {}};
  if (figure_id == "fig3") fig3(f);
  else if (figure_id == "fig4") fig4(f);
  else if (figure_id == "fig5") fig5(f);
  else if (figure_id == "fig8") fig8(f);
  else if (figure_id == "fig9") fig9(f);
  else if (figure_id == "fig11") fig11(f);
  else fail(ErrorCode::invalid_parameter, "unknown figure id '" + figure_id + "'");

  json m;
  m["version"] = version();
  m["figure"] = figure_id;
  m["parameters"] = f.params;
  m["tolerances"] = {{"zero_threshold", 1e-12}, {"tie_tol", 1e-6}, {"dark_overlap_tol", 1e-10},
                     {"participation_tol", 1e-12}, {"alias_tol", alias_tol}};
  json files = json::array();
  for (const auto& p : f.result.files) files.push_back(p.filename().string());
  files.push_back("manifest.json");
  m["files"] = files;
  m["exit_code"] = 0;
  m["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  f.result.files.push_back(out_dir / "manifest.json");
  write_text(out_dir / "manifest.json", m.dump(2) + "\n");
  return f.result;
}

}  // namespace nullsteer
