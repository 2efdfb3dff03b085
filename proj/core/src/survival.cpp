#include "nullsteer/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nullsteer/error.hpp"

namespace nullsteer {

std::string_view to_string(EigenClass c) noexcept {
  switch (c) {
    case EigenClass::Zero: return "zero";
    case EigenClass::Disk: return "disk";
    case EigenClass::Circle: return "circle";
  }
  return "unknown";
}

namespace {

EigenClass classify(cplx xi) {
  const double a = std::abs(xi);
  if (a < 1e-10) return EigenClass::Zero;
  if (std::abs(a - 1.0) < 1e-10) return EigenClass::Circle;
  return EigenClass::Disk;
}

// Gram-Schmidt combinations orthogonal to psi_d inside span(columns). The
// columns must be orthonormal and ordered so the first overlap is nonzero.
std::vector<CVector> gram_schmidt_darks(const CMatrix& cols, const CVector& alpha) {
  std::vector<CVector> out;
  double s = std::norm(alpha[0]);
  for (Eigen::Index m = 1; m < cols.cols(); ++m) {
    CVector d = s * cols.col(m);
    for (Eigen::Index j = 0; j < m; ++j) d -= std::conj(alpha[m]) * alpha[j] * cols.col(j);
    out.push_back(d.normalized());
    s += std::norm(alpha[m]);
  }
  return out;
}

// Stable order of sub-levels by descending overlap, ties by index.
std::vector<Eigen::Index> overlap_order(const CVector& alpha) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(alpha.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double x = std::abs(alpha[a]);
    const double y = std::abs(alpha[b]);
    if (std::abs(x - y) <= 1e-12 * std::max(x, y)) return false;
    return x > y;
  });
  return idx;
}

EigenTriple circle_triple(const CVector& v, cplx xi, std::optional<std::size_t> level) {
  EigenTriple t;
  t.xi = xi;
  t.right = canonical_phase(v);
  t.left = t.right;
  t.cls = EigenClass::Circle;
  t.source_level = level;
  return t;
}

}  // namespace

SurvivalOperator build_survival(const CMatrix& u, const DetectionState& psi_d, double tau) {
  if (u.rows() != u.cols() || u.rows() != psi_d.vector.size()) {
    fail(ErrorCode::invalid_input, "propagator and detection state dimensions differ");
  }
  SurvivalOperator s;
  s.matrix = u - psi_d.vector * (psi_d.vector.adjoint() * u);
  s.tau = tau;
  s.detection = psi_d;
  return s;
}

std::vector<EigenTriple> dark_states(const SpectralDecomposition& decomp, const DetectionState& psi_d,
                                     double tau, const SpectrumOptions& opts) {
  if (psi_d.vector.size() != decomp.dim) fail(ErrorCode::invalid_input, "detection state dimension mismatch");
  std::vector<EigenTriple> out;
  const double orth_cut = opts.orthogonality_tol * psi_d.vector.norm();
  for (std::size_t k = 0; k < decomp.levels.size(); ++k) {
    const auto& lv = decomp.levels[k];
    const cplx xi = phase_of(lv.energy, tau);
    const CVector alpha = lv.vectors.adjoint() * psi_d.vector;
    const bool bright = alpha.squaredNorm() > opts.zero_threshold;
    std::vector<Eigen::Index> overlapping;
    for (Eigen::Index l : overlap_order(alpha)) {
      if (!bright || std::abs(alpha[l]) < orth_cut) {
        out.push_back(circle_triple(lv.vectors.col(l), xi, k));
      } else {
        overlapping.push_back(l);
      }
    }
    if (overlapping.size() < 2) continue;
    CMatrix cols(decomp.dim, static_cast<Eigen::Index>(overlapping.size()));
    CVector a(static_cast<Eigen::Index>(overlapping.size()));
    for (std::size_t i = 0; i < overlapping.size(); ++i) {
      cols.col(static_cast<Eigen::Index>(i)) = lv.vectors.col(overlapping[i]);
      a[static_cast<Eigen::Index>(i)] = alpha[overlapping[i]];
    }
    for (const CVector& d : gram_schmidt_darks(cols, a)) out.push_back(circle_triple(d, xi, k));
  }

  // Aliased bright levels: the same construction applied to their bright
  // vectors, whose overlaps with psi_d are sqrt(p_k).
  const auto cfg = charges(decomp, psi_d, tau, opts.zero_threshold);
  for (const auto& group : effective_charges(cfg)) {
    if (group.levels.size() < 2) continue;
    std::vector<std::size_t> lv = group.levels;
    std::stable_sort(lv.begin(), lv.end(),
                     [&](std::size_t a, std::size_t b) { return cfg.charges[a].p > cfg.charges[b].p; });
    CMatrix cols(decomp.dim, static_cast<Eigen::Index>(lv.size()));
    CVector a(static_cast<Eigen::Index>(lv.size()));
    for (std::size_t i = 0; i < lv.size(); ++i) {
      const double p = cfg.charges[lv[i]].p;
      cols.col(static_cast<Eigen::Index>(i)) = decomp.levels[lv[i]].projector() * psi_d.vector / std::sqrt(p);
      a[static_cast<Eigen::Index>(i)] = std::sqrt(p);
    }
    for (const CVector& d : gram_schmidt_darks(cols, a)) out.push_back(circle_triple(d, group.phase, lv.front()));
  }
  return out;
}

std::vector<BrightState> bright_states(const SpectralDecomposition& decomp, const DetectionState& psi_d,
                                       double zero_threshold) {
  if (psi_d.vector.size() != decomp.dim) fail(ErrorCode::invalid_input, "detection state dimension mismatch");
  std::vector<BrightState> out;
  for (std::size_t k = 0; k < decomp.levels.size(); ++k) {
    const auto& v = decomp.levels[k].vectors;
    const CVector b = v * (v.adjoint() * psi_d.vector);
    const double p = b.squaredNorm();
    if (p <= zero_threshold) continue;
    out.push_back({k, b / std::sqrt(p)});
  }
  return out;
}

std::vector<EigenTriple> disk_eigenpairs(const SpectralDecomposition& decomp, const DetectionState& psi_d,
                                         double tau, const std::vector<cplx>& roots, double zero_threshold) {
  if (psi_d.vector.size() != decomp.dim) fail(ErrorCode::invalid_input, "detection state dimension mismatch");
  // Per-level pieces P_k psi_d of the resolvent.
  std::vector<CVector> pieces;
  std::vector<cplx> phases;
  for (const auto& lv : decomp.levels) {
    CVector b = lv.vectors * (lv.vectors.adjoint() * psi_d.vector);
    if (b.squaredNorm() <= zero_threshold) continue;
    pieces.push_back(std::move(b));
    phases.push_back(phase_of(lv.energy, tau));
  }
  std::vector<EigenTriple> out;
  for (const cplx& xi : roots) {
    CVector r = CVector::Zero(decomp.dim);
    CVector l = CVector::Zero(decomp.dim);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const cplx d = xi - phases[k];
      if (std::abs(d) < 1e-10) fail(ErrorCode::root_too_close_to_spectrum, "root lies on a charge phase");
      r += pieces[k] / d;
      l += std::conj(phases[k] / d) * pieces[k];
    }
    if (r.norm() == 0.0 || l.norm() == 0.0) fail(ErrorCode::numerical_failure, "resolvent vector vanished");
    EigenTriple t;
    t.xi = xi;
    t.right = canonical_phase(r);
    t.left = canonical_phase(l);
    t.cls = classify(xi);
    out.push_back(std::move(t));
  }
  return out;
}

EigenTriple zero_eigenpair(const CMatrix& u, const DetectionState& psi_d) {
  if (u.rows() != psi_d.vector.size()) fail(ErrorCode::invalid_input, "dimension mismatch");
  EigenTriple t;
  t.xi = 0.0;
  t.right = canonical_phase(u.adjoint() * psi_d.vector);
  t.left = canonical_phase(psi_d.vector);
  t.cls = EigenClass::Zero;
  return t;
}

SurvivalSpectrum full_spectrum(const SpectralDecomposition& decomp, const DetectionState& psi_d, double tau,
                               const SpectrumOptions& opts) {
  if (psi_d.vector.size() != decomp.dim) fail(ErrorCode::invalid_input, "detection state dimension mismatch");
  if (!std::isfinite(tau)) fail(ErrorCode::invalid_parameter, "tau must be finite");
  SurvivalSpectrum sp;
  sp.tau = tau;
  const auto cfg = charges(decomp, psi_d, tau, opts.zero_threshold);
  const auto eff = effective_charges(cfg);
  sp.aliased = eff.size() != cfg.nonzero().size();
  sp.roots = stationary_points(cfg, opts.tie_tol);

  sp.triples.push_back(zero_eigenpair(propagator(decomp, tau), psi_d));
  for (auto& t : disk_eigenpairs(decomp, psi_d, tau, sp.roots.roots, opts.zero_threshold)) {
    sp.triples.push_back(std::move(t));
  }
  for (auto& t : dark_states(decomp, psi_d, tau, opts)) sp.triples.push_back(std::move(t));

  std::size_t disk_zero_roots = 0;
  for (const auto& t : sp.triples) {
    switch (t.cls) {
      case EigenClass::Zero: ++sp.n_zero; break;
      case EigenClass::Disk:
        ++sp.n_disk;
        sp.min_biorthogonal_overlap = std::min(sp.min_biorthogonal_overlap, t.biorthogonal_overlap());
        break;
      case EigenClass::Circle: ++sp.n_circle; break;
    }
  }
  disk_zero_roots = sp.n_zero - 1;
  if (sp.triples.size() != static_cast<std::size_t>(decomp.dim)) {
    fail(ErrorCode::numerical_failure, "eigenvalue count does not match the dimension");
  }
  if (sp.min_biorthogonal_overlap < 1e-8 || disk_zero_roots > 0) sp.exceptional_flag = true;
  // Coalesced nonzero roots are exceptional even when their computed vectors
  // happen not to be parallel yet.
  for (std::size_t i = 0; i < sp.roots.roots.size(); ++i) {
    for (std::size_t j = i + 1; j < sp.roots.roots.size(); ++j) {
      if (std::abs(sp.roots.roots[i] - sp.roots.roots[j]) < 1e-8) sp.exceptional_flag = true;
    }
  }
  return sp;
}

SurvivalSpectrum full_spectrum(const HermitianModel& model, const DetectionState& psi_d, double tau,
                               std::optional<double> grouping_tol, const SpectrumOptions& opts) {
  return full_spectrum(spectral_decompose(model, grouping_tol), psi_d, tau, opts);
}

double completeness_check(const SurvivalSpectrum& spectrum) {
  if (spectrum.exceptional_flag) {
    fail(ErrorCode::exceptional_spectrum, "completeness does not hold at an exceptional point");
  }
  if (spectrum.triples.empty()) fail(ErrorCode::invalid_input, "empty spectrum");
  const Eigen::Index n = spectrum.triples.front().right.size();
  CMatrix sum = CMatrix::Zero(n, n);
  for (const auto& t : spectrum.triples) sum += t.right * t.left.adjoint() / t.left.dot(t.right);
  return max_abs(sum - CMatrix::Identity(n, n));
}

}  // namespace nullsteer
