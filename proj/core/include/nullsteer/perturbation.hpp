#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nullsteer/charge.hpp"
#include "nullsteer/linalg.hpp"
#include "nullsteer/spectral.hpp"

namespace nullsteer {

enum class Scheme { WeakCharge, TwoMerge, TripleCharge, ZenoBound };

std::string_view to_string(Scheme s) noexcept;

/// Symmetric three-charge cluster, expressed in the frame where the central
/// charge sits at phase 1.
struct TripleChargeDetail {
  double a = 0.0;
  cplx b{0.0, 0.0};
  double delta = 0.0;
  double theta = 0.0;  // arg of xi_+ in the rotated frame
  double p0 = 0.0;
  double p = 0.0;
  std::size_t upper = 0;  // level whose rotated phase is +delta
  std::size_t lower = 0;
  std::size_t center = 0;
  // Unnormalized bright pieces P_k psi_d; empty unless vectors were supplied.
  CVector piece_upper, piece_lower, piece_center;

  cplx d_of(std::int64_t n) const;
  /// Approximate right eigenvectors near xi_+ and xi_-.
  CVector right_plus() const;
  CVector right_minus() const;
  /// Closed-form large-n state for equal weights on xi_+ and xi_-.
  CVector final_state(std::int64_t n) const;
};

struct PerturbationEstimate {
  Scheme scheme = Scheme::WeakCharge;
  std::vector<cplx> xi_estimates;
  std::optional<CVector> state_estimate;
  std::optional<double> energy_estimate;
  std::optional<double> phase_estimate;
  std::optional<double> modulus_estimate;
  std::optional<cplx> epsilon;
  std::optional<double> time_estimate;
  std::optional<double> steps_estimate;
  std::optional<TripleChargeDetail> triple;
  double small_parameter = 0.0;
  std::string claimed_order;
  std::vector<std::string> warnings;
};

/// Vectors are optional: with decomp and psi_d the state estimate is filled.
struct VectorContext {
  const SpectralDecomposition* decomp = nullptr;
  const DetectionState* psi_d = nullptr;
};

PerturbationEstimate weak_charge_estimate(const ChargeConfiguration& config, std::size_t weak_index,
                                          VectorContext ctx = {});

PerturbationEstimate two_merge_estimate(const ChargeConfiguration& config, std::size_t index_a,
                                        std::size_t index_b, VectorContext ctx = {});

/// pair holds the two outer levels in any order. delta defaults to the
/// half-opening of the pair in the rotated frame.
PerturbationEstimate triple_charge_estimate(const ChargeConfiguration& config, std::size_t center_index,
                                            std::pair<std::size_t, std::size_t> pair_indices,
                                            std::optional<double> delta = std::nullopt,
                                            VectorContext ctx = {});

PerturbationEstimate zeno_time_estimate(const SpectralDecomposition& decomp, double tau);

}  // namespace nullsteer
