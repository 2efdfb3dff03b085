#pragma once

#include <vector>

#include "nullsteer/linalg.hpp"

namespace nullsteer {

// Coefficients are stored lowest degree first: c[0] + c[1] x + ...

using Poly = std::vector<cplx>;

Poly poly_multiply(const Poly& a, const Poly& b);
Poly poly_from_roots(const std::vector<cplx>& roots);
cplx poly_eval(const Poly& c, cplx x);

/// All roots via the eigenvalues of the companion matrix. Leading
/// coefficients below rel_tol * max|c| are dropped; trailing ones of that
/// size are reported as exact roots at 0.
std::vector<cplx> companion_roots(Poly c, double rel_tol = 1e-13);

}  // namespace nullsteer
