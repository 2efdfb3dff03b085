#include "nullsteer/charge.hpp"

#include <algorithm>
#include <cmath>

#include "nullsteer/error.hpp"
#include "nullsteer/polynomial.hpp"
#include "nullsteer/survival.hpp"

namespace nullsteer {

double ChargeConfiguration::total() const {
  double s = 0.0;
  for (const auto& c : charges) s += c.p;
  return s;
}

std::vector<std::size_t> ChargeConfiguration::nonzero() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < charges.size(); ++k) {
    if (charges[k].p > zero_threshold) out.push_back(k);
  }
  return out;
}

std::vector<EffectiveCharge> effective_charges(const ChargeConfiguration& config) {
  std::vector<EffectiveCharge> out;
  for (std::size_t k : config.nonzero()) {
    const Charge& c = config.charges[k];
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const EffectiveCharge& e) { return std::abs(e.phase - c.phase) < alias_tol; });
    if (it == out.end()) {
      out.push_back({c.p, c.phase, {k}});
    } else {
      it->p += c.p;
      it->levels.push_back(k);
    }
  }
  return out;
}

ChargeConfiguration charges(const SpectralDecomposition& decomp, const DetectionState& psi_d,
                            double tau, double zero_threshold) {
  if (psi_d.vector.size() != decomp.dim) fail(ErrorCode::invalid_input, "detection state dimension mismatch");
  if (!std::isfinite(tau)) fail(ErrorCode::invalid_parameter, "tau must be finite");
  ChargeConfiguration out;
  out.tau = tau;
  out.zero_threshold = zero_threshold;
  for (const auto& lv : decomp.levels) {
    const double p = (lv.vectors.adjoint() * psi_d.vector).squaredNorm();
    out.charges.push_back({p, lv.energy, phase_of(lv.energy, tau)});
  }
  return out;
}

ChargeConfiguration make_configuration(const std::vector<double>& p, const std::vector<double>& energies,
                                       double tau, double zero_threshold) {
  if (p.size() != energies.size()) fail(ErrorCode::invalid_input, "charge and energy lists differ in length");
  ChargeConfiguration out;
  out.tau = tau;
  out.zero_threshold = zero_threshold;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] >= 0.0) || !std::isfinite(energies[k])) fail(ErrorCode::invalid_input, "charges must be finite and >= 0");
    out.charges.push_back({p[k], energies[k], phase_of(energies[k], tau)});
  }
  return out;
}

cplx field(const ChargeConfiguration& config, cplx xi) {
  cplx f{0.0, 0.0};
  for (const auto& c : config.charges) {
    if (c.p <= config.zero_threshold) continue;
    const cplx d = xi - c.phase;
    if (std::abs(d) < 1e-12) fail(ErrorCode::pole, "field evaluated on a charge");
    f += c.p / d;
  }
  return f;
}

cplx field_derivative(const ChargeConfiguration& config, cplx xi) {
  cplx f{0.0, 0.0};
  for (const auto& c : config.charges) {
    if (c.p <= config.zero_threshold) continue;
    const cplx d = xi - c.phase;
    if (std::abs(d) < 1e-12) fail(ErrorCode::pole, "field evaluated on a charge");
    f -= c.p / (d * d);
  }
  return f;
}

namespace {

// Sums over effective charges so aliased levels count once.
cplx eff_field(const std::vector<EffectiveCharge>& q, cplx xi, cplx* deriv, cplx* log_denominator) {
  cplx f{0.0, 0.0};
  cplx fp{0.0, 0.0};
  cplx ld{0.0, 0.0};
  for (const auto& c : q) {
    const cplx inv = 1.0 / (xi - c.phase);
    f += c.p * inv;
    fp -= c.p * inv * inv;
    ld += inv;
  }
  if (deriv) *deriv = fp;
  if (log_denominator) *log_denominator = ld;
  return f;
}

bool near_any_phase(const std::vector<EffectiveCharge>& q, cplx xi) {
  return std::any_of(q.begin(), q.end(), [&](const EffectiveCharge& c) { return std::abs(xi - c.phase) < 1e-14; });
}

// Newton on the numerator N(xi) = F(xi) prod(xi - z), with Maehly deflation
// against the other roots so that clustered roots do not collapse.
void polish(const std::vector<EffectiveCharge>& q, std::vector<cplx>& roots, std::size_t first) {
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool moved = false;
    for (std::size_t i = first; i < roots.size(); ++i) {
      const cplx x = roots[i];
      if (near_any_phase(q, x)) continue;
      cplx fp, ld;
      const cplx f = eff_field(q, x, &fp, &ld);
      if (f == cplx{0.0, 0.0}) continue;
      cplx logd = fp / f + ld;
      for (std::size_t j = 0; j < roots.size(); ++j) {
        if (j != i && roots[j] != x) logd -= 1.0 / (x - roots[j]);
      }
      if (logd == cplx{0.0, 0.0} || !std::isfinite(std::abs(logd))) continue;
      const cplx step = 1.0 / logd;
      const cplx candidate = x - step;
      if (near_any_phase(q, candidate)) continue;
      // Accept only steps that do not make the field worse.
      if (std::abs(eff_field(q, candidate, nullptr, nullptr)) <= std::abs(f) * (1.0 + 1e-12)) {
        roots[i] = candidate;
        if (std::abs(step) > 1e-16 * std::max(1.0, std::abs(x))) moved = true;
      }
    }
    if (!moved) break;
  }
}

}  // namespace

std::vector<std::size_t> argmax_indices(const std::vector<cplx>& values, double tie_tol) {
  std::vector<std::size_t> out;
  double m = 0.0;
  for (const cplx& v : values) m = std::max(m, std::abs(v));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i]) >= m - tie_tol) out.push_back(i);
  }
  return out;
}

StationaryPoints stationary_points(const ChargeConfiguration& config, double tie_tol) {
  const auto q = effective_charges(config);
  if (q.empty()) fail(ErrorCode::no_bright_subspace, "all charges vanish; the detection state is fully dark");

  StationaryPoints out;
  out.tie_tol = tie_tol;
  if (q.size() >= 2) {
    Poly num(q.size(), cplx{0.0, 0.0});
    for (std::size_t k = 0; k < q.size(); ++k) {
      Poly term{cplx{q[k].p, 0.0}};
      for (std::size_t j = 0; j < q.size(); ++j) {
        if (j != k) term = poly_multiply(term, Poly{-q[j].phase, cplx{1.0, 0.0}});
      }
      for (std::size_t i = 0; i < term.size(); ++i) num[i] += term[i];
    }
    out.roots = companion_roots(num);
    std::size_t zeros = 0;
    while (zeros < out.roots.size() && out.roots[zeros] == cplx{0.0, 0.0}) ++zeros;
    polish(q, out.roots, zeros);
  }

  std::sort(out.roots.begin(), out.roots.end(), [](cplx a, cplx b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return std::arg(a) < std::arg(b);
  });
  for (const cplx& r : out.roots) {
    out.residuals.push_back(near_any_phase(q, r) ? INFINITY : std::abs(eff_field(q, r, nullptr, nullptr)));
    out.max_abs = std::max(out.max_abs, std::abs(r));
  }
  out.argmax_set = argmax_indices(out.roots, tie_tol);
  return out;
}

ZenoBound zeno_bound(const SpectralDecomposition& decomp, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorCode::invalid_parameter, "tau must be positive");
  ZenoBound z;
  z.delta_e = decomp.delta_e();
  const double x = z.delta_e * tau;
  if (x >= pi) fail(ErrorCode::bound_not_applicable, "Delta E * tau >= pi");
  z.bound = std::cos(x / 2.0);
  const double lc = std::log(z.bound);
  z.t_b = lc == 0.0 ? INFINITY : -tau / lc;
  z.n_b = z.t_b / tau;
  return z;
}

bool in_charge_hull(const ChargeConfiguration& config, cplx xi, double tol) {
  std::vector<double> angles;
  for (const auto& c : effective_charges(config)) angles.push_back(std::arg(c.phase));
  if (angles.empty()) return false;
  if (angles.size() == 1) return std::abs(xi - std::polar(1.0, angles[0])) <= tol;
  std::sort(angles.begin(), angles.end());
  // Points on the circle sorted by angle form a convex polygon.
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const cplx a = std::polar(1.0, angles[i]);
    const cplx b = std::polar(1.0, angles[(i + 1) % angles.size()]);
    const cplx e = b - a;
    const cplx r = xi - a;
    const double cross = e.real() * r.imag() - e.imag() * r.real();
    if (cross < -tol * std::abs(e)) return false;
  }
  if (angles.size() == 2) {
    // Degenerate hull: the chord itself.
    const cplx a = std::polar(1.0, angles[0]);
    const cplx b = std::polar(1.0, angles[1]);
    const cplx e = b - a;
    const double t = ((xi - a) * std::conj(e)).real() / std::norm(e);
    return t >= -tol && t <= 1.0 + tol;
  }
  return true;
}

ExceptionalReport detect_exceptional(const ChargeConfiguration& config, const SurvivalSpectrum* spectrum_hint) {
  ExceptionalReport rep;
  const auto sp = stationary_points(config);
  std::vector<cplx> pts = sp.roots;
  pts.insert(pts.begin(), cplx{0.0, 0.0});
  std::vector<bool> marked(pts.size(), false);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (std::abs(pts[i] - pts[j]) < 1e-8) {
        rep.is_exceptional = true;
        if (!marked[i]) rep.coalesced_roots.push_back(pts[i]);
        if (!marked[j]) rep.coalesced_roots.push_back(pts[j]);
        marked[i] = marked[j] = true;
      }
    }
  }
  if (spectrum_hint) {
    rep.min_biorthogonality = spectrum_hint->min_biorthogonal_overlap;
    if (rep.min_biorthogonality < 1e-8) rep.is_exceptional = true;
  }
  return rep;
}

}  // namespace nullsteer
