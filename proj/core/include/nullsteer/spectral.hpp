#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nullsteer/linalg.hpp"

namespace nullsteer {

struct HermitianModel {
  CMatrix hamiltonian;
  std::vector<std::string> basis_labels;
  std::string kind;

  Eigen::Index dim() const { return hamiltonian.rows(); }
  /// Index of a basis label; throws invalid-input if absent.
  Eigen::Index label_index(const std::string& label) const;
};

struct EnergyLevel {
  double energy = 0.0;
  CMatrix vectors;  // one orthonormal column per degenerate sub-level

  Eigen::Index degeneracy() const { return vectors.cols(); }
  CMatrix projector() const { return vectors * vectors.adjoint(); }
};

struct SpectralDecomposition {
  std::vector<EnergyLevel> levels;  // ascending energy
  double grouping_tol = 0.0;
  double spectral_radius = 0.0;
  Eigen::Index dim = 0;

  std::size_t w() const { return levels.size(); }
  double delta_e() const {
    return levels.empty() ? 0.0 : levels.back().energy - levels.front().energy;
  }
  /// H rebuilt from the levels.
  CMatrix hamiltonian() const;
};

struct DetectionState {
  CVector vector;
  std::string description;
};

/// Normalizes v; zero or non-finite input is rejected.
DetectionState make_state(const CVector& v, std::string description = {});
DetectionState basis_state(const HermitianModel& model, const std::string& label);
DetectionState energy_state(const SpectralDecomposition& decomp, std::size_t level,
                            Eigen::Index sublevel);

HermitianModel build_two_level(double gamma);
HermitianModel build_three_level_chain(double gamma);
/// Basis order is (D, G, B).
HermitianModel build_v_atom(double e_g, double e_d, double e_b, double gamma1, double gamma2);
HermitianModel build_glued_tree(int d);
HermitianModel build_exceptional_three_level(double gamma);
HermitianModel build_custom(const CMatrix& matrix, std::vector<std::string> labels = {});

/// 1e-8 times the spectral radius (floored at 1e-14 for the zero matrix).
double default_grouping_tol(const HermitianModel& model);

SpectralDecomposition spectral_decompose(const HermitianModel& model,
                                         std::optional<double> grouping_tol = std::nullopt);

CMatrix propagator(const SpectralDecomposition& decomp, double tau);

// Glued tree G_d helpers. Sites are ordered column by column.
Eigen::Index glued_tree_column_size(int d, int j);
Eigen::Index glued_tree_index(int d, int j, Eigen::Index s);
std::string glued_tree_label(int j, Eigen::Index s);

struct TreeEigenstate {
  int v = 0;
  Eigen::Index alpha = 0;
  int k = 0;
  double energy = 0.0;
  CVector vector;
};

/// Closed-form eigenbasis of G_d: symmetric column states (v = 0) and the
/// antisymmetric subtree families (v >= 1).
std::vector<TreeEigenstate> glued_tree_analytic_eigenstates(int d);

}  // namespace nullsteer
