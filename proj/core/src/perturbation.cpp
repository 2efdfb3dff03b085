#include "nullsteer/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "nullsteer/error.hpp"

namespace nullsteer {

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::WeakCharge: return "WeakCharge";
    case Scheme::TwoMerge: return "TwoMerge";
    case Scheme::TripleCharge: return "TripleCharge";
    case Scheme::ZenoBound: return "ZenoBound";
  }
  return "unknown";
}

namespace {

void check_index(const ChargeConfiguration& c, std::size_t i) {
  if (i >= c.charges.size()) fail(ErrorCode::invalid_input, "charge index out of range");
}

CVector piece(const VectorContext& ctx, std::size_t level) {
  const auto& v = ctx.decomp->levels.at(level).vectors;
  return v * (v.adjoint() * ctx.psi_d->vector);
}

bool has_vectors(const VectorContext& ctx) { return ctx.decomp != nullptr && ctx.psi_d != nullptr; }

}  // namespace

PerturbationEstimate weak_charge_estimate(const ChargeConfiguration& config, std::size_t weak_index,
                                          VectorContext ctx) {
  check_index(config, weak_index);
  const Charge& w = config.charges[weak_index];
  if (w.p <= config.zero_threshold) {
    fail(ErrorCode::degenerate, "weak charge is zero; the level is exactly dark");
  }
  cplx sum{0.0, 0.0};
  double next = INFINITY;
  for (std::size_t k : config.nonzero()) {
    if (k == weak_index) continue;
    const Charge& c = config.charges[k];
    const cplx d = w.phase - c.phase;
    if (std::abs(d) < alias_tol) fail(ErrorCode::not_applicable, "weak charge shares its phase with another level");
    sum += c.p / d;
    next = std::min(next, c.p);
  }
  if (sum == cplx{0.0, 0.0}) fail(ErrorCode::not_applicable, "no other charges to balance the weak charge");

  PerturbationEstimate e;
  e.scheme = Scheme::WeakCharge;
  e.epsilon = w.p / sum;
  e.xi_estimates = {w.phase - *e.epsilon};
  e.energy_estimate = w.energy;
  e.phase_estimate = wrap_angle(-w.energy * config.tau);
  e.small_parameter = w.p;
  e.claimed_order = "O(p_weak^2)";
  const double ratio = w.p / next;
  if (ratio >= 0.1) {
    e.warnings.push_back("weak charge is not small compared with the others (ratio " + std::to_string(ratio) + ")");
  } else if (ratio >= 1e-3) {
    e.warnings.push_back("weak charge ratio " + std::to_string(ratio) + " is marginal");
  }
  if (has_vectors(ctx)) e.state_estimate = canonical_phase(piece(ctx, weak_index));
  return e;
}

PerturbationEstimate two_merge_estimate(const ChargeConfiguration& config, std::size_t index_a,
                                        std::size_t index_b, VectorContext ctx) {
  check_index(config, index_a);
  check_index(config, index_b);
  if (index_a == index_b) fail(ErrorCode::invalid_input, "merging levels must differ");
  const Charge& a = config.charges[index_a];
  const Charge& b = config.charges[index_b];
  const double s = a.p + b.p;
  if (a.p <= config.zero_threshold || b.p <= config.zero_threshold) {
    fail(ErrorCode::degenerate, "both merging charges must be nonzero");
  }
  // Half the angular gap, measured the short way round the circle.
  const double delta = wrap_angle((b.energy - a.energy) * config.tau) / 2.0;

  PerturbationEstimate e;
  e.scheme = Scheme::TwoMerge;
  e.xi_estimates = {(a.p * b.phase + b.p * a.phase) / s};
  e.energy_estimate = (b.p * a.energy + a.p * b.energy) / s;
  const double mid = -a.energy * config.tau - delta;
  e.phase_estimate = wrap_angle(mid + delta * (b.p - a.p) / s);
  e.small_parameter = std::abs(delta);
  e.claimed_order = "O(delta^2)";
  if (std::abs(delta) >= 0.3) {
    e.warnings.push_back("delta = " + std::to_string(delta) + " is outside the merging regime");
  } else if (std::abs(delta) >= 0.1) {
    e.warnings.push_back("delta = " + std::to_string(delta) + " is marginal");
  }
  if (has_vectors(ctx)) {
    e.state_estimate = canonical_phase(piece(ctx, index_a) / a.p - piece(ctx, index_b) / b.p);
  }
  return e;
}

cplx TripleChargeDetail::d_of(std::int64_t n) const {
  const double nt = static_cast<double>(n) * theta;
  return cplx(p0 * std::cos(nt), std::sqrt(p0 * (p0 + 2.0 * p)) * std::sin(nt)) / p;
}

CVector TripleChargeDetail::right_plus() const {
  return canonical_phase(piece_upper / (a - 1.0) + piece_lower / (a + 1.0) + piece_center / a);
}

CVector TripleChargeDetail::right_minus() const {
  return canonical_phase(piece_upper / (a + 1.0) + piece_lower / (a - 1.0) + piece_center / a);
}

CVector TripleChargeDetail::final_state(std::int64_t n) const {
  const cplx d = d_of(n);
  CVector s = d * piece_upper + std::conj(d) * piece_lower -
              2.0 * std::cos(static_cast<double>(n) * theta) * piece_center;
  return s.normalized();
}

PerturbationEstimate triple_charge_estimate(const ChargeConfiguration& config, std::size_t center_index,
                                            std::pair<std::size_t, std::size_t> pair_indices,
                                            std::optional<double> delta, VectorContext ctx) {
  check_index(config, center_index);
  check_index(config, pair_indices.first);
  check_index(config, pair_indices.second);
  const Charge& c = config.charges[center_index];
  const Charge& x = config.charges[pair_indices.first];
  const Charge& y = config.charges[pair_indices.second];
  if (c.p <= config.zero_threshold || x.p <= config.zero_threshold || y.p <= config.zero_threshold) {
    fail(ErrorCode::not_applicable, "triple-charge cluster needs three nonzero charges");
  }
  const cplx rot = std::conj(c.phase);
  const double dx = std::arg(x.phase * rot);
  const double dy = std::arg(y.phase * rot);
  if (std::abs(dx + dy) > 1e-6 || std::abs(x.p - y.p) > 1e-6 * std::max(x.p, y.p)) {
    fail(ErrorCode::not_applicable, "outer charges are not symmetric about the central one");
  }

  TripleChargeDetail t;
  t.center = center_index;
  t.upper = dx >= 0.0 ? pair_indices.first : pair_indices.second;
  t.lower = dx >= 0.0 ? pair_indices.second : pair_indices.first;
  t.delta = delta.value_or(std::abs(dx));
  t.p0 = c.p;
  t.p = 0.5 * (x.p + y.p);
  const double p0 = t.p0;
  const double p = t.p;
  t.a = std::sqrt(p0 / (p0 + 2.0 * p));
  cplx background{0.0, 0.0};
  for (std::size_t k : config.nonzero()) {
    if (k == center_index || k == pair_indices.first || k == pair_indices.second) continue;
    const cplx w = config.charges[k].phase * rot;
    if (std::abs(1.0 - w) < alias_tol) fail(ErrorCode::not_applicable, "background charge sits on the cluster");
    background += config.charges[k].p / (1.0 - w);
  }
  t.b = (p0 + p) / (2.0 * p0 + 4.0 * p) + p / ((p0 + 2.0 * p) * (p0 + 2.0 * p)) * background;

  const double d = t.delta;
  const cplx plus = 1.0 + I * t.a * d - t.b * d * d;
  const cplx minus = 1.0 - I * t.a * d - t.b * d * d;
  t.theta = std::arg(plus);
  if (has_vectors(ctx)) {
    t.piece_upper = piece(ctx, t.upper);
    t.piece_lower = piece(ctx, t.lower);
    t.piece_center = piece(ctx, t.center);
  }

  PerturbationEstimate e;
  e.scheme = Scheme::TripleCharge;
  e.xi_estimates = {c.phase * plus, c.phase * minus};
  e.modulus_estimate = 1.0 - (t.b.real() - 0.5 * t.a * t.a) * d * d;
  e.small_parameter = d;
  e.claimed_order = "O(delta^3)";
  if (d >= 0.3) {
    e.warnings.push_back("delta = " + std::to_string(d) + " is outside the triple-charge regime");
  } else if (d >= 0.1) {
    e.warnings.push_back("delta = " + std::to_string(d) + " is marginal");
  }
  if (has_vectors(ctx)) e.state_estimate = t.final_state(0);
  e.triple = std::move(t);
  return e;
}

PerturbationEstimate zeno_time_estimate(const SpectralDecomposition& decomp, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorCode::invalid_parameter, "tau must be positive");
  const double de = decomp.delta_e();
  if (de * tau >= 1.0) fail(ErrorCode::not_applicable, "Delta E * tau >= 1 is outside the Zeno regime");
  if (de == 0.0) fail(ErrorCode::not_applicable, "single-level spectrum has no Zeno time");
  PerturbationEstimate e;
  e.scheme = Scheme::ZenoBound;
  e.small_parameter = de * tau;
  e.time_estimate = 8.0 / (de * de * tau);
  e.steps_estimate = 8.0 / (de * de * tau * tau);
  e.modulus_estimate = std::cos(de * tau / 2.0);
  e.claimed_order = "O((Delta E tau)^2)";
  return e;
}

}  // namespace nullsteer
