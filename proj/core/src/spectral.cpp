#include "nullsteer/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nullsteer/error.hpp"

namespace nullsteer {

namespace {

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) fail(ErrorCode::invalid_parameter, std::string(name) + " must be finite");
}

void require_positive(double x, const char* name) {
  require_finite(x, name);
  if (x <= 0.0) fail(ErrorCode::invalid_parameter, std::string(name) + " must be positive");
}

std::vector<std::string> numbered_labels(Eigen::Index n) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

}  // namespace

Eigen::Index HermitianModel::label_index(const std::string& label) const {
  auto it = std::find(basis_labels.begin(), basis_labels.end(), label);
  if (it == basis_labels.end()) fail(ErrorCode::invalid_input, "unknown basis label '" + label + "'");
  return it - basis_labels.begin();
}

CMatrix SpectralDecomposition::hamiltonian() const {
  CMatrix h = CMatrix::Zero(dim, dim);
  for (const auto& lv : levels) h += lv.energy * lv.projector();
  return h;
}

DetectionState make_state(const CVector& v, std::string description) {
  if (v.size() == 0 || !v.allFinite()) fail(ErrorCode::invalid_input, "state vector is empty or non-finite");
  const double n = v.norm();
  if (n < 1e-300) fail(ErrorCode::invalid_input, "state vector is zero");
  return DetectionState{v / n, std::move(description)};
}

DetectionState basis_state(const HermitianModel& model, const std::string& label) {
  CVector v = CVector::Zero(model.dim());
  v[model.label_index(label)] = 1.0;
  return DetectionState{v, "|" + label + ">"};
}

DetectionState energy_state(const SpectralDecomposition& decomp, std::size_t level,
                            Eigen::Index sublevel) {
  if (level >= decomp.levels.size()) fail(ErrorCode::invalid_input, "energy level index out of range");
  const auto& lv = decomp.levels[level];
  if (sublevel < 0 || sublevel >= lv.degeneracy()) {
    fail(ErrorCode::invalid_input, "sub-level index out of range");
  }
  return DetectionState{lv.vectors.col(sublevel),
                        "|E_" + std::to_string(level) + "," + std::to_string(sublevel) + ">"};
}

HermitianModel build_two_level(double gamma) {
  require_positive(gamma, "gamma");
  CMatrix h = CMatrix::Zero(2, 2);
  h(0, 1) = h(1, 0) = -gamma;
  return {h, {"l", "r"}, "two_level"};
}

HermitianModel build_three_level_chain(double gamma) {
  require_positive(gamma, "gamma");
  CMatrix h = CMatrix::Zero(3, 3);
  h(0, 1) = h(1, 0) = h(1, 2) = h(2, 1) = -gamma;
  // The onsite term enters with opposite sign to the hops; this is the
  // convention whose spectrum solves E^3 - E^2 - 2E + 1 = 0.
  h(0, 0) = gamma;
  return {h, {"0", "1", "2"}, "three_level_chain"};
}

HermitianModel build_v_atom(double e_g, double e_d, double e_b, double gamma1, double gamma2) {
  require_finite(e_g, "E_G");
  require_finite(e_d, "E_D");
  require_finite(e_b, "E_B");
  require_finite(gamma1, "gamma1");
  require_finite(gamma2, "gamma2");
  CMatrix h = CMatrix::Zero(3, 3);
  h(0, 0) = e_d;
  h(1, 1) = e_g;
  h(2, 2) = e_b;
  h(0, 1) = h(1, 0) = gamma1;
  h(1, 2) = h(2, 1) = gamma2;
  return {h, {"D", "G", "B"}, "v_atom"};
}

Eigen::Index glued_tree_column_size(int d, int j) {
  return Eigen::Index{1} << (j <= d ? j : 2 * d - j);
}

Eigen::Index glued_tree_index(int d, int j, Eigen::Index s) {
  Eigen::Index offset = 0;
  for (int c = 0; c < j; ++c) offset += glued_tree_column_size(d, c);
  return offset + s;
}

std::string glued_tree_label(int j, Eigen::Index s) {
  return "(" + std::to_string(j) + "," + std::to_string(s) + ")";
}

HermitianModel build_glued_tree(int d) {
  if (d < 1 || d > 10) fail(ErrorCode::invalid_parameter, "glued tree depth must be in [1, 10]");
  const Eigen::Index n = (Eigen::Index{1} << (d + 1)) + (Eigen::Index{1} << d) - 2;
  CMatrix h = CMatrix::Zero(n, n);
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j <= 2 * d; ++j) {
    for (Eigen::Index s = 0; s < glued_tree_column_size(d, j); ++s) {
      labels.push_back(glued_tree_label(j, s));
      if (j == 2 * d) continue;
      const Eigen::Index a = glued_tree_index(d, j, s);
      auto link = [&](Eigen::Index t) {
        const Eigen::Index b = glued_tree_index(d, j + 1, t);
        h(a, b) = h(b, a) = -1.0;
      };
      if (j < d) {
        link(2 * s);
        link(2 * s + 1);
      } else {
        link(s / 2);
      }
    }
  }
  return {h, std::move(labels), "glued_tree"};
}

HermitianModel build_exceptional_three_level(double gamma) {
  require_positive(gamma, "gamma");
  const double r2 = std::sqrt(2.0);
  const double r3 = std::sqrt(3.0);
  const double r6 = std::sqrt(6.0);
  CMatrix h(3, 3);
  h << 0.0, -1.0 / r2, 1.0 / r6,
       -1.0 / r2, -0.5, -1.0 / (2.0 * r3),
       1.0 / r6, -1.0 / (2.0 * r3), 0.5;
  h *= -gamma;
  return {h, {"1", "2", "3"}, "exceptional_three_level"};
}

HermitianModel build_custom(const CMatrix& matrix, std::vector<std::string> labels) {
  if (matrix.rows() != matrix.cols() || matrix.rows() < 2) {
    fail(ErrorCode::invalid_matrix, "matrix must be square with dimension >= 2");
  }
  if (!matrix.allFinite()) fail(ErrorCode::invalid_matrix, "matrix has non-finite entries");
  if (hermiticity_defect(matrix) > 1e-10) fail(ErrorCode::invalid_matrix, "matrix is not Hermitian");
  if (labels.empty()) labels = numbered_labels(matrix.rows());
  if (static_cast<Eigen::Index>(labels.size()) != matrix.rows()) {
    fail(ErrorCode::invalid_matrix, "label count does not match dimension");
  }
  CMatrix h = 0.5 * (matrix + matrix.adjoint());
  return {h, std::move(labels), "custom"};
}

double default_grouping_tol(const HermitianModel& model) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(model.hamiltonian, Eigen::EigenvaluesOnly);
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  return std::max(1e-8 * radius, 1e-14);
}

SpectralDecomposition spectral_decompose(const HermitianModel& model,
                                         std::optional<double> grouping_tol) {
  const CMatrix& h = model.hamiltonian;
  if (h.rows() != h.cols() || h.rows() < 1) fail(ErrorCode::invalid_matrix, "Hamiltonian must be square");
  if (hermiticity_defect(h) > 1e-10) fail(ErrorCode::invalid_matrix, "Hamiltonian is not Hermitian");

  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) fail(ErrorCode::numerical_failure, "Hermitian eigensolver did not converge");
  const RVector& e = es.eigenvalues();
  const CMatrix& vecs = es.eigenvectors();

  SpectralDecomposition out;
  out.dim = h.rows();
  out.spectral_radius = e.cwiseAbs().maxCoeff();
  out.grouping_tol = grouping_tol.value_or(std::max(1e-8 * out.spectral_radius, 1e-14));
  if (!(out.grouping_tol > 0.0)) fail(ErrorCode::invalid_parameter, "grouping tolerance must be positive");

  // Eigenvalues come sorted, so transitive clustering is a single sweep.
  Eigen::Index start = 0;
  while (start < e.size()) {
    Eigen::Index stop = start + 1;
    while (stop < e.size() && e[stop] - e[stop - 1] <= out.grouping_tol) ++stop;
    const Eigen::Index g = stop - start;
    EnergyLevel lv;
    lv.energy = e.segment(start, g).mean();
    lv.vectors = g == 1 ? CMatrix(vecs.middleCols(start, 1)) : orthonormalize_columns(vecs.middleCols(start, g));
    for (Eigen::Index c = 0; c < lv.vectors.cols(); ++c) lv.vectors.col(c) = canonical_phase(lv.vectors.col(c));
    if (lv.vectors.cols() != g) fail(ErrorCode::numerical_failure, "degenerate eigenvectors lost rank");
    out.levels.push_back(std::move(lv));
    start = stop;
  }
  return out;
}

CMatrix propagator(const SpectralDecomposition& decomp, double tau) {
  if (!std::isfinite(tau)) fail(ErrorCode::invalid_parameter, "tau must be finite");
  CMatrix u = CMatrix::Zero(decomp.dim, decomp.dim);
  for (const auto& lv : decomp.levels) {
    const CMatrix& v = lv.vectors;
    u.noalias() += phase_of(lv.energy, tau) * (v * v.adjoint());
  }
  return u;
}

std::vector<TreeEigenstate> glued_tree_analytic_eigenstates(int d) {
  if (d < 1 || d > 10) fail(ErrorCode::invalid_parameter, "glued tree depth must be in [1, 10]");
  const Eigen::Index n = (Eigen::Index{1} << (d + 1)) + (Eigen::Index{1} << d) - 2;
  std::vector<TreeEigenstate> out;
  for (int v = 0; v <= d; ++v) {
    const int m = d - v;  // depth of the reduced chain
    const Eigen::Index n_alpha = v == 0 ? 1 : (Eigen::Index{1} << (v - 1));
    for (Eigen::Index alpha = 0; alpha < n_alpha; ++alpha) {
      // Column states of the reduced chain, one per j = 0..2m.
      std::vector<CVector> cols;
      for (int j = 0; j <= 2 * m; ++j) {
        CVector c = CVector::Zero(n);
        const int column = j + v;
        if (v == 0) {
          const Eigen::Index nc = glued_tree_column_size(d, column);
          for (Eigen::Index s = 0; s < nc; ++s) c[glued_tree_index(d, column, s)] = 1.0 / std::sqrt(double(nc));
        } else {
          const Eigen::Index nb = glued_tree_column_size(m, j);
          const double w = 1.0 / std::sqrt(2.0 * double(nb));
          for (Eigen::Index s = 2 * alpha * nb; s < (2 * alpha + 1) * nb; ++s) {
            c[glued_tree_index(d, column, s)] = w;
            c[glued_tree_index(d, column, s + nb)] = -w;
          }
        }
        cols.push_back(std::move(c));
      }
      for (int k = 1; k <= 2 * m + 1; ++k) {
        TreeEigenstate st;
        st.v = v;
        st.alpha = alpha;
        st.k = k;
        st.energy = -2.0 * std::sqrt(2.0) * std::cos(k * pi / (2.0 * (m + 1)));
        st.vector = CVector::Zero(n);
        for (int j = 0; j <= 2 * m; ++j) {
          st.vector += std::sin(k * (j + 1) * pi / (2.0 * (m + 1))) * cols[static_cast<std::size_t>(j)];
        }
        st.vector /= std::sqrt(double(m + 1));
        out.push_back(std::move(st));
      }
    }
  }
  return out;
}

}  // namespace nullsteer
