#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nullsteer {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

/// Largest entrywise modulus.
double max_abs(const CMatrix& m);

/// max |m - m^dagger| over entries.
double hermiticity_defect(const CMatrix& m);

/// Normalizes v and rotates it so its largest-modulus component is real
/// positive (ties resolved by lowest index). Zero vectors are left untouched.
CVector canonical_phase(CVector v);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// e^{-i E tau}
inline cplx phase_of(double energy, double tau) {
  return std::polar(1.0, -energy * tau);
}

/// Modified Gram-Schmidt on the columns of m, in order. Columns that fall
/// below tol after projection are dropped.
CMatrix orthonormalize_columns(const CMatrix& m, double tol = 1e-12);

}  // namespace nullsteer
