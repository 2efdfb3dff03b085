#include <gtest/gtest.h>

#include "nullsteer/error.hpp"
#include "nullsteer/survival.hpp"
#include "support/oracles.hpp"

using namespace nullsteer;

namespace {

void expect_matches_dense(const HermitianModel& m, const DetectionState& psi, double tau) {
  const auto sp = full_spectrum(m, psi, tau);
  const auto dense = oracle::dense_eigenvalues(oracle::survival_matrix(m.hamiltonian, psi.vector, tau));
  ASSERT_EQ(sp.triples.size(), dense.size());
  for (const auto& t : sp.triples) EXPECT_LT(oracle::nearest(t.xi, dense), 1e-8) << t.xi;
  const auto s = build_survival(propagator(spectral_decompose(m), tau), psi, tau);
  for (const auto& t : sp.triples) {
    EXPECT_LT((s.matrix * t.right - t.xi * t.right).norm(), 1e-9) << to_string(t.cls);
    EXPECT_LT((s.matrix.adjoint() * t.left - std::conj(t.xi) * t.left).norm(), 1e-9) << to_string(t.cls);
  }
}

}  // namespace

TEST(Survival, ChainAgreesWithDenseSolver) {
  const auto m = build_three_level_chain(1.0);
  for (double tau : {0.1, 2.0, 4.0, 4.31697}) expect_matches_dense(m, basis_state(m, "0"), tau);
}

TEST(Survival, TreeAgreesWithDenseSolver) {
  const auto m = build_glued_tree(3);
  for (double tau : {1.2, 2.3}) expect_matches_dense(m, basis_state(m, "(0,0)"), tau);
}

TEST(Survival, VAtomAgreesWithDenseSolver) {
  const auto m = build_v_atom(0, 3, 5, 0.01, 1);
  expect_matches_dense(m, basis_state(m, "B"), 0.5);
}

TEST(Survival, TreePartition) {
  const auto m = build_glued_tree(3);
  const auto sp = full_spectrum(m, basis_state(m, "(0,0)"), 1.2);
  EXPECT_EQ(sp.n_zero, 1u);
  EXPECT_EQ(sp.n_disk, 6u);
  EXPECT_EQ(sp.n_circle, 15u);
  EXPECT_FALSE(sp.exceptional_flag);
  for (const auto& t : sp.triples) {
    if (t.cls == EigenClass::Circle) EXPECT_NEAR(std::abs(t.xi), 1.0, 1e-12);
    if (t.cls == EigenClass::Disk) EXPECT_LT(std::abs(t.xi), 1.0);
  }
}

TEST(Survival, DarkStatesAreOrthogonalToDetector) {
  const auto m = build_glued_tree(3);
  const auto d = spectral_decompose(m);
  const auto psi = basis_state(m, "(0,0)");
  const auto darks = dark_states(d, psi, 1.2);
  ASSERT_EQ(darks.size(), 15u);
  CMatrix basis(m.dim(), static_cast<Eigen::Index>(darks.size()));
  for (std::size_t i = 0; i < darks.size(); ++i) {
    EXPECT_LT(std::abs(psi.vector.dot(darks[i].right)), 1e-12);
    EXPECT_LT((m.hamiltonian * darks[i].right - darks[i].right.dot(m.hamiltonian * darks[i].right).real() * darks[i].right).norm(), 1e-10);
    basis.col(static_cast<Eigen::Index>(i)) = darks[i].right;
  }
  const auto n = static_cast<Eigen::Index>(darks.size());
  EXPECT_LT(max_abs(basis.adjoint() * basis - CMatrix::Identity(n, n)), 1e-12);
}

TEST(Survival, BrightStatesCarryTheCharge) {
  const auto m = build_glued_tree(3);
  const auto d = spectral_decompose(m);
  const auto psi = basis_state(m, "(0,0)");
  const auto bright = bright_states(d, psi);
  EXPECT_EQ(bright.size(), 7u);
  const auto cfg = charges(d, psi, 1.0);
  for (const auto& b : bright) EXPECT_NEAR(std::norm(b.vector.dot(psi.vector)), cfg.charges[b.level].p, 1e-12);
}

TEST(Survival, CompletenessOnWorkedModels) {
  const auto chain = build_three_level_chain(1.0);
  EXPECT_LT(completeness_check(full_spectrum(chain, basis_state(chain, "0"), 2.0)), 1e-8);
  const auto tree = build_glued_tree(3);
  EXPECT_LT(completeness_check(full_spectrum(tree, basis_state(tree, "(0,0)"), 1.25)), 1e-8);
}

TEST(Survival, ZeroEigenpair) {
  const auto m = build_three_level_chain(1.0);
  const auto d = spectral_decompose(m);
  const auto psi = basis_state(m, "0");
  const CMatrix u = propagator(d, 1.7);
  const auto z = zero_eigenpair(u, psi);
  EXPECT_EQ(z.cls, EigenClass::Zero);
  EXPECT_LT((build_survival(u, psi).matrix * z.right).norm(), 1e-13);
}

TEST(Survival, ExceptionalSpectrumIsFlagged) {
  const auto m = build_exceptional_three_level(1.0);
  const auto sp = full_spectrum(m, basis_state(m, "1"), 2.0 * pi / 3.0);
  EXPECT_TRUE(sp.exceptional_flag);
  EXPECT_EQ(sp.n_zero, 3u);
  for (const auto& t : sp.triples) EXPECT_LT(std::abs(t.xi), 1e-10);
  EXPECT_THROW(completeness_check(sp), Error);
}

TEST(Survival, AliasedLevelsYieldCircleCombination) {
  // Diagonal H with E = 0 and E = 2 pi: both bright, same phase at tau = 1.
  CMatrix h = CMatrix::Zero(3, 3);
  h(1, 1) = 2.0 * pi;
  h(2, 2) = 1.0;
  const auto m = build_custom(h);
  CVector v(3);
  v << 0.6, 0.6, std::sqrt(1.0 - 0.72);
  const auto psi = make_state(v);
  const auto sp = full_spectrum(m, psi, 1.0);
  EXPECT_TRUE(sp.aliased);
  EXPECT_EQ(sp.n_zero, 1u);
  EXPECT_EQ(sp.n_disk, 1u);
  EXPECT_EQ(sp.n_circle, 1u);
  expect_matches_dense(m, psi, 1.0);
}

TEST(Survival, RandomModelsPartition) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto rc = oracle::random_case(seed, 2 + static_cast<Eigen::Index>(seed % 10));
    const auto m = build_custom(rc.h);
    const auto psi = make_state(rc.psi_d);
    const auto sp = full_spectrum(m, psi, rc.tau);
    const auto dense = oracle::dense_eigenvalues(oracle::survival_matrix(rc.h, rc.psi_d, rc.tau));
    const auto p = oracle::classify(dense, 1e-8);
    EXPECT_EQ(sp.n_zero, 1u) << seed;
    EXPECT_EQ(sp.n_disk, rc.bright_levels - 1) << seed;
    EXPECT_EQ(sp.n_circle, static_cast<std::size_t>(m.dim()) - rc.bright_levels) << seed;
    EXPECT_EQ(p.zero, sp.n_zero) << seed;
    EXPECT_EQ(p.disk, sp.n_disk) << seed;
    EXPECT_EQ(p.circle, sp.n_circle) << seed;
  }
}
