#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "nullsteer/charge.hpp"
#include "nullsteer/linalg.hpp"
#include "nullsteer/spectral.hpp"

namespace nullsteer {

struct SurvivalOperator {
  CMatrix matrix;
  double tau = 0.0;
  DetectionState detection;
};

enum class EigenClass { Zero, Disk, Circle };

std::string_view to_string(EigenClass c) noexcept;

struct EigenTriple {
  cplx xi{0.0, 0.0};
  CVector right;
  CVector left;
  EigenClass cls = EigenClass::Disk;
  std::optional<std::size_t> source_level;

  /// |<left|right>| with both unit-norm.
  double biorthogonal_overlap() const { return std::abs(left.dot(right)); }
  /// Expansion weight of psi on this eigenvector: <L|psi>/<L|R>.
  cplx coefficient(const CVector& psi) const { return left.dot(psi) / left.dot(right); }
};

struct SpectrumOptions {
  double zero_threshold = 1e-12;
  double tie_tol = 1e-6;
  double orthogonality_tol = 1e-10;
};

struct SurvivalSpectrum {
  std::vector<EigenTriple> triples;  // Zero, then Disk by descending |xi|, then Circle
  std::size_t n_zero = 0;
  std::size_t n_disk = 0;
  std::size_t n_circle = 0;
  bool exceptional_flag = false;
  bool aliased = false;  // two bright levels share a phase
  double min_biorthogonal_overlap = 1.0;
  double tau = 0.0;
  StationaryPoints roots;
};

/// (1 - |psi_d><psi_d|) U
SurvivalOperator build_survival(const CMatrix& u, const DetectionState& psi_d, double tau = 0.0);

/// Unit-circle eigenvectors: eigenvectors orthogonal to psi_d, the
/// Gram-Schmidt combinations inside each degenerate bright level, and the
/// combinations of aliased bright levels that cancel on psi_d.
std::vector<EigenTriple> dark_states(const SpectralDecomposition& decomp, const DetectionState& psi_d,
                                     double tau, const SpectrumOptions& opts = {});

struct BrightState {
  std::size_t level = 0;
  CVector vector;
};

std::vector<BrightState> bright_states(const SpectralDecomposition& decomp, const DetectionState& psi_d,
                                       double zero_threshold = 1e-12);

std::vector<EigenTriple> disk_eigenpairs(const SpectralDecomposition& decomp, const DetectionState& psi_d,
                                         double tau, const std::vector<cplx>& roots,
                                         double zero_threshold = 1e-12);

EigenTriple zero_eigenpair(const CMatrix& u, const DetectionState& psi_d);

SurvivalSpectrum full_spectrum(const SpectralDecomposition& decomp, const DetectionState& psi_d, double tau,
                               const SpectrumOptions& opts = {});

SurvivalSpectrum full_spectrum(const HermitianModel& model, const DetectionState& psi_d, double tau,
                               std::optional<double> grouping_tol = std::nullopt,
                               const SpectrumOptions& opts = {});

/// max-entry deviation of sum |R><L| / <L|R> from the identity.
double completeness_check(const SurvivalSpectrum& spectrum);

}  // namespace nullsteer
