#include "nullsteer/polynomial.hpp"

#include <algorithm>

#include "nullsteer/error.hpp"

namespace nullsteer {

Poly poly_multiply(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Poly poly_from_roots(const std::vector<cplx>& roots) {
  Poly out{cplx{1.0, 0.0}};
  for (const cplx& r : roots) out = poly_multiply(out, Poly{-r, cplx{1.0, 0.0}});
  return out;
}

cplx poly_eval(const Poly& c, cplx x) {
  cplx acc{0.0, 0.0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<cplx> companion_roots(Poly c, double rel_tol) {
  double scale = 0.0;
  for (const cplx& z : c) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) fail(ErrorCode::invalid_input, "zero polynomial has no well-defined roots");
  const double cut = rel_tol * scale;
  while (!c.empty() && std::abs(c.back()) <= cut) c.pop_back();

  std::vector<cplx> roots;
  std::size_t lead_zeros = 0;
  while (lead_zeros + 1 < c.size() && std::abs(c[lead_zeros]) <= cut) ++lead_zeros;
  roots.assign(lead_zeros, cplx{0.0, 0.0});
  c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(lead_zeros));

  const Eigen::Index deg = static_cast<Eigen::Index>(c.size()) - 1;
  if (deg <= 0) return roots;
  if (deg == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }
  CMatrix comp = CMatrix::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) comp(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
  if (es.info() != Eigen::Success) fail(ErrorCode::numerical_failure, "companion eigensolver did not converge");
  for (Eigen::Index i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()[i]);
  return roots;
}

}  // namespace nullsteer
