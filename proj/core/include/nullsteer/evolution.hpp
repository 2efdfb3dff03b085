#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "nullsteer/linalg.hpp"
#include "nullsteer/survival.hpp"

namespace nullsteer {

struct StepResult {
  CVector psi;
  double survival_amplitude = 0.0;
  double phase_increment = 0.0;  // arg <psi_{n-1}| S |psi_{n-1}>
};

/// One null measurement. step_index is only used to label a certain
/// detection error.
StepResult step(const SurvivalOperator& s, const CVector& psi, std::int64_t step_index = 1);

struct TrajectoryRecord {
  std::int64_t n = 0;
  CVector state;  // empty unless states are kept
  double survival_amplitude = 1.0;
  double log_no_detection = 0.0;  // natural log of the cumulative probability
  double cumulative_no_detection_probability = 1.0;
  double mean_energy = 0.0;
  double phase = 0.0;
};

/// records[0] is the initial state; records[n] follows the nth measurement.
struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::int64_t n_steps = 0;
};

double mean_energy(const CMatrix& h, const CVector& psi);

Trajectory evolve(const SurvivalOperator& s, const CVector& psi_in, std::int64_t n_steps, const CMatrix& h,
                  bool keep_states = true);

struct SpectralState {
  CVector state;
  double mean_energy = 0.0;
};

SpectralState evolve_spectral(const SurvivalSpectrum& spectrum, const CVector& psi_in, std::int64_t n,
                              const CMatrix& h);

enum class RegimeKind { DarkDominated, FixedPoint, Oscillatory, Exceptional };

std::string_view to_string(RegimeKind k) noexcept;

struct AsymptoticRegime {
  RegimeKind kind = RegimeKind::FixedPoint;
  std::vector<std::size_t> dominant;  // indices into spectrum.triples
  std::optional<double> predicted_energy;
  std::vector<double> oscillation_energies;
  double relative_phase = 0.0;
  double dark_weight = 0.0;
};

struct RegimeOptions {
  double tie_tol = 1e-6;
  double dark_overlap_tol = 1e-10;
  double participation_tol = 1e-12;  // disk terms below this weight are ignored
};

AsymptoticRegime classify_regime(const SurvivalSpectrum& spectrum, const CVector& psi_in, const CMatrix& h,
                                 const RegimeOptions& opts = {});

/// First n at which the summed subdominant amplitudes fall below ratio times
/// the dominant amplitude. Returns 0 when no subdominant term participates.
std::int64_t crossover_step(const SurvivalSpectrum& spectrum, const AsymptoticRegime& regime,
                            const CVector& psi_in, double ratio = 0.01);

struct OscillationDescriptor {
  cplx a1, a2;
  cplx xi1, xi2;
  CVector r1, r2;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double mean_phase = 0.0;
  double relative_phase = 0.0;

  /// Two-term large-n state at step n (unit norm).
  CVector state_at(std::int64_t n) const;
  double energy_at(std::int64_t n, const CMatrix& h) const;
};

OscillationDescriptor oscillation_descriptor(const SurvivalSpectrum& spectrum, const AsymptoticRegime& regime,
                                             const CVector& psi_in);

bool energy_conservation_check(const Trajectory& trajectory, double tolerance);

}  // namespace nullsteer
