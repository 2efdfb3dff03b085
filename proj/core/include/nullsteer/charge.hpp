#pragma once

#include <optional>
#include <vector>

#include "nullsteer/linalg.hpp"
#include "nullsteer/spectral.hpp"

namespace nullsteer {

struct Charge {
  double p = 0.0;
  double energy = 0.0;
  cplx phase{1.0, 0.0};
};

/// One charge per energy level, in level order (zero charges included).
struct ChargeConfiguration {
  double tau = 0.0;
  std::vector<Charge> charges;
  double zero_threshold = 1e-12;

  double total() const;
  std::vector<std::size_t> nonzero() const;
};

/// Nonzero charges sitting on the same phase (levels aliased by
/// |E_a - E_b| tau = 2 pi j) act as a single charge.
struct EffectiveCharge {
  double p = 0.0;
  cplx phase{1.0, 0.0};
  std::vector<std::size_t> levels;
};

inline constexpr double alias_tol = 1e-10;

std::vector<EffectiveCharge> effective_charges(const ChargeConfiguration& config);

ChargeConfiguration charges(const SpectralDecomposition& decomp, const DetectionState& psi_d,
                            double tau, double zero_threshold = 1e-12);

/// Configuration from raw (p, E) pairs.
ChargeConfiguration make_configuration(const std::vector<double>& p, const std::vector<double>& energies,
                                       double tau, double zero_threshold = 1e-12);

cplx field(const ChargeConfiguration& config, cplx xi);
cplx field_derivative(const ChargeConfiguration& config, cplx xi);

struct StationaryPoints {
  std::vector<cplx> roots;  // descending modulus
  std::vector<double> residuals;
  double max_abs = 0.0;
  std::vector<std::size_t> argmax_set;
  double tie_tol = 1e-6;
};

StationaryPoints stationary_points(const ChargeConfiguration& config, double tie_tol = 1e-6);

/// Indices of roots whose modulus lies within tie_tol of the largest.
std::vector<std::size_t> argmax_indices(const std::vector<cplx>& values, double tie_tol);

struct ZenoBound {
  double bound = 0.0;
  double t_b = 0.0;
  double n_b = 0.0;
  double delta_e = 0.0;
};

ZenoBound zeno_bound(const SpectralDecomposition& decomp, double tau);

/// True when xi lies in the convex hull of the nonzero-charge phases
/// (within tol). A single phase has a one-point hull.
bool in_charge_hull(const ChargeConfiguration& config, cplx xi, double tol = 1e-9);

struct ExceptionalReport {
  bool is_exceptional = false;
  std::vector<cplx> coalesced_roots;
  double min_biorthogonality = 1.0;
};

struct SurvivalSpectrum;

ExceptionalReport detect_exceptional(const ChargeConfiguration& config,
                                     const SurvivalSpectrum* spectrum_hint = nullptr);

}  // namespace nullsteer
