#include "nullsteer/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nullsteer/error.hpp"

namespace nullsteer {

std::string_view to_string(RegimeKind k) noexcept {
  switch (k) {
    case RegimeKind::DarkDominated: return "DarkDominated";
    case RegimeKind::FixedPoint: return "FixedPoint";
    case RegimeKind::Oscillatory: return "Oscillatory";
    case RegimeKind::Exceptional: return "Exceptional";
  }
  return "unknown";
}

double mean_energy(const CMatrix& h, const CVector& psi) {
  return psi.dot(h * psi).real() / psi.squaredNorm();
}

StepResult step(const SurvivalOperator& s, const CVector& psi, std::int64_t step_index) {
  if (psi.size() != s.matrix.cols()) fail(ErrorCode::invalid_input, "state dimension mismatch");
  const CVector raw = s.matrix * psi;
  const double amp = raw.norm();
  if (amp < 1e-14) {
    throw CertainDetection(step_index, "certain-detection: null record impossible at step " +
                                           std::to_string(step_index));
  }
  StepResult r;
  r.survival_amplitude = amp;
  r.phase_increment = std::arg(psi.dot(raw));
  r.psi = raw / amp;
  return r;
}

Trajectory evolve(const SurvivalOperator& s, const CVector& psi_in, std::int64_t n_steps, const CMatrix& h,
                  bool keep_states) {
  if (n_steps < 0) fail(ErrorCode::invalid_parameter, "n_steps must be >= 0");
  if (std::abs(psi_in.norm() - 1.0) > 1e-10) fail(ErrorCode::invalid_input, "initial state must be unit-norm");
  Trajectory t;
  t.n_steps = n_steps;
  t.records.reserve(static_cast<std::size_t>(n_steps + 1));
  TrajectoryRecord rec;
  rec.mean_energy = mean_energy(h, psi_in);
  if (keep_states) rec.state = psi_in;
  t.records.push_back(rec);
  CVector psi = psi_in;
  for (std::int64_t n = 1; n <= n_steps; ++n) {
    StepResult r = step(s, psi, n);
    psi = std::move(r.psi);
    TrajectoryRecord next;
    next.n = n;
    next.survival_amplitude = r.survival_amplitude;
    next.log_no_detection = t.records.back().log_no_detection + 2.0 * std::log(r.survival_amplitude);
    next.cumulative_no_detection_probability = std::exp(next.log_no_detection);
    next.mean_energy = mean_energy(h, psi);
    next.phase = t.records.back().phase + r.phase_increment;
    if (keep_states) next.state = psi;
    t.records.push_back(std::move(next));
  }
  return t;
}

SpectralState evolve_spectral(const SurvivalSpectrum& spectrum, const CVector& psi_in, std::int64_t n,
                              const CMatrix& h) {
  if (spectrum.exceptional_flag) {
    fail(ErrorCode::exceptional_spectrum, "spectral evolution needs a diagonalizable survival operator");
  }
  if (n < 0) fail(ErrorCode::invalid_parameter, "n must be >= 0");
  if (n == 0) {
    const CVector s = psi_in.normalized();
    return {s, mean_energy(h, s)};
  }
  struct Term {
    cplx c;
    cplx xi;
    const CVector* r;
  };
  std::vector<Term> terms;
  double largest = 0.0;
  for (const auto& t : spectrum.triples) {
    if (t.cls == EigenClass::Zero) continue;
    const cplx c = t.coefficient(psi_in);
    largest = std::max(largest, std::abs(c));
    terms.push_back({c, t.xi, &t.right});
  }
  // Coefficients at rounding level carry no information but would dominate
  // once their eigenvalue outgrows the rest.
  std::erase_if(terms, [&](const Term& t) { return std::abs(t.c) <= 1e-13 * largest; });
  double top = 0.0;
  for (const auto& t : terms) top = std::max(top, std::abs(t.xi));
  CVector state = CVector::Zero(psi_in.size());
  if (top > 0.0) {
    // Scale by the largest modulus so that xi^n cannot underflow.
    for (const auto& term : terms) {
      const double mag = std::pow(std::abs(term.xi) / top, static_cast<double>(n));
      if (mag == 0.0) continue;
      state += term.c * std::polar(mag, static_cast<double>(n) * std::arg(term.xi)) * (*term.r);
    }
  }
  const double norm = state.norm();
  if (norm < 1e-14 * std::max(1.0, psi_in.norm())) {
    throw CertainDetection(1, "certain-detection: no component survives the first measurement");
  }
  state /= norm;
  return {state, mean_energy(h, state)};
}

AsymptoticRegime classify_regime(const SurvivalSpectrum& spectrum, const CVector& psi_in, const CMatrix& h,
                                 const RegimeOptions& opts) {
  AsymptoticRegime reg;
  if (spectrum.exceptional_flag) {
    reg.kind = RegimeKind::Exceptional;
    return reg;
  }
  const CVector psi = psi_in.normalized();
  double weighted = 0.0;
  for (std::size_t i = 0; i < spectrum.triples.size(); ++i) {
    const auto& t = spectrum.triples[i];
    if (t.cls != EigenClass::Circle) continue;
    const double w = std::norm(t.right.dot(psi));
    if (w == 0.0) continue;
    reg.dark_weight += w;
    weighted += w * mean_energy(h, t.right);
    reg.dominant.push_back(i);
  }
  if (reg.dark_weight > opts.dark_overlap_tol) {
    reg.kind = RegimeKind::DarkDominated;
    reg.predicted_energy = weighted / reg.dark_weight;
    return reg;
  }
  reg.dominant.clear();

  std::vector<std::size_t> idx;
  std::vector<cplx> xs;
  for (std::size_t i = 0; i < spectrum.triples.size(); ++i) {
    const auto& t = spectrum.triples[i];
    if (t.cls != EigenClass::Disk) continue;
    if (std::abs(t.coefficient(psi)) <= opts.participation_tol) continue;
    idx.push_back(i);
    xs.push_back(t.xi);
  }
  reg.kind = RegimeKind::FixedPoint;
  if (idx.empty()) return reg;
  for (std::size_t a : argmax_indices(xs, opts.tie_tol)) reg.dominant.push_back(idx[a]);
  if (reg.dominant.size() == 1) {
    reg.predicted_energy = mean_energy(h, spectrum.triples[reg.dominant[0]].right);
    return reg;
  }
  reg.kind = RegimeKind::Oscillatory;
  for (std::size_t i : reg.dominant) reg.oscillation_energies.push_back(mean_energy(h, spectrum.triples[i].right));
  reg.relative_phase = wrap_angle(std::arg(spectrum.triples[reg.dominant[0]].xi) -
                                  std::arg(spectrum.triples[reg.dominant[1]].xi)) / 2.0;
  return reg;
}

namespace {

double log_sum_exp(const std::vector<double>& logs_a, const std::vector<double>& rates, double n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logs_a.size(); ++i) m = std::max(m, logs_a[i] + n * rates[i]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < logs_a.size(); ++i) s += std::exp(logs_a[i] + n * rates[i] - m);
  return m + std::log(s);
}

}  // namespace

std::int64_t crossover_step(const SurvivalSpectrum& spectrum, const AsymptoticRegime& regime,
                            const CVector& psi_in, double ratio) {
  if (regime.kind == RegimeKind::Exceptional) fail(ErrorCode::exceptional_spectrum, "no crossover at an exceptional point");
  const CVector psi = psi_in.normalized();
  std::vector<double> dom_a, dom_r, sub_a, sub_r;
  if (regime.kind == RegimeKind::DarkDominated) {
    dom_a.push_back(0.5 * std::log(regime.dark_weight));
    dom_r.push_back(0.0);
  } else {
    for (std::size_t i : regime.dominant) {
      const auto& t = spectrum.triples[i];
      dom_a.push_back(std::log(std::abs(t.coefficient(psi))));
      dom_r.push_back(std::log(std::abs(t.xi)));
    }
  }
  if (dom_a.empty()) return 0;
  for (std::size_t i = 0; i < spectrum.triples.size(); ++i) {
    const auto& t = spectrum.triples[i];
    if (t.cls != EigenClass::Disk) continue;
    if (std::find(regime.dominant.begin(), regime.dominant.end(), i) != regime.dominant.end()) continue;
    const double c = std::abs(t.coefficient(psi));
    if (c <= 1e-300) continue;
    sub_a.push_back(std::log(c));
    sub_r.push_back(std::log(std::abs(t.xi)));
  }
  if (sub_a.empty()) return 0;
  const double target = std::log(ratio);
  auto below = [&](double n) { return log_sum_exp(sub_a, sub_r, n) - log_sum_exp(dom_a, dom_r, n) < target; };
  if (below(1.0)) return 1;
  std::int64_t lo = 1;
  std::int64_t hi = 2;
  while (!below(static_cast<double>(hi))) {
    lo = hi;
    hi *= 2;
    if (hi > (std::int64_t{1} << 50)) return hi;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (below(static_cast<double>(mid)) ? hi : lo) = mid;
  }
  return hi;
}

CVector OscillationDescriptor::state_at(std::int64_t n) const {
  const double top = std::max(std::abs(xi1), std::abs(xi2));
  const double dn = static_cast<double>(n);
  CVector s = a1 * std::polar(std::pow(std::abs(xi1) / top, dn), dn * phi1) * r1 +
              a2 * std::polar(std::pow(std::abs(xi2) / top, dn), dn * phi2) * r2;
  return s.normalized();
}

double OscillationDescriptor::energy_at(std::int64_t n, const CMatrix& h) const {
  return mean_energy(h, state_at(n));
}

OscillationDescriptor oscillation_descriptor(const SurvivalSpectrum& spectrum, const AsymptoticRegime& regime,
                                             const CVector& psi_in) {
  if (regime.kind != RegimeKind::Oscillatory || regime.dominant.size() != 2) {
    fail(ErrorCode::unsupported_multiplicity,
         "oscillation descriptor needs exactly two dominant eigenvalues, got " +
             std::to_string(regime.dominant.size()));
  }
  const auto& t1 = spectrum.triples[regime.dominant[0]];
  const auto& t2 = spectrum.triples[regime.dominant[1]];
  const CVector psi = psi_in.normalized();
  OscillationDescriptor d;
  d.a1 = t1.coefficient(psi);
  d.a2 = t2.coefficient(psi);
  d.xi1 = t1.xi;
  d.xi2 = t2.xi;
  d.r1 = t1.right;
  d.r2 = t2.right;
  d.phi1 = std::arg(t1.xi);
  d.phi2 = std::arg(t2.xi);
  d.mean_phase = (d.phi1 + d.phi2) / 2.0;
  d.relative_phase = (d.phi1 - d.phi2) / 2.0;
  return d;
}

bool energy_conservation_check(const Trajectory& trajectory, double tolerance) {
  if (trajectory.records.empty()) return true;
  const double e0 = trajectory.records.front().mean_energy;
  return std::all_of(trajectory.records.begin(), trajectory.records.end(),
                     [&](const TrajectoryRecord& r) { return std::abs(r.mean_energy - e0) < tolerance; });
}

}  // namespace nullsteer
