#include "nullsteer/linalg.hpp"

#include <cmath>

namespace nullsteer {

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const CMatrix& m) {
  return max_abs(m - m.adjoint());
}

CVector canonical_phase(CVector v) {
  const double norm = v.norm();
  if (norm == 0.0) return v;
  v /= norm;
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // Ties within rounding go to the lowest index so runs are reproducible.
    const double a = std::abs(v[i]);
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = i;
    }
  }
  v *= std::conj(v[best]) / best_abs;
  v[best] = cplx(std::abs(v[best]), 0.0);
  return v;
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * pi);
  if (a <= -pi) a += 2.0 * pi;
  return a;
}

CMatrix orthonormalize_columns(const CMatrix& m, double tol) {
  CMatrix out(m.rows(), m.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    CVector v = m.col(c);
    // Two passes of MGS keep orthogonality at machine precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < kept; ++k) {
        v -= out.col(k) * out.col(k).dot(v);
      }
    }
    const double n = v.norm();
    if (n < tol) continue;
    out.col(kept++) = v / n;
  }
  out.conservativeResize(Eigen::NoChange, kept);
  return out;
}

}  // namespace nullsteer
