#include <gtest/gtest.h>

#include "nullsteer/error.hpp"
#include "nullsteer/evolution.hpp"
#include "support/oracles.hpp"

using namespace nullsteer;

namespace {

struct Setup {
  HermitianModel model;
  SpectralDecomposition decomp;
  DetectionState psi_d;
  SurvivalOperator s;
  SurvivalSpectrum spectrum;
};

Setup setup(HermitianModel m, const std::string& detect, double tau) {
  Setup st{m, spectral_decompose(m), basis_state(m, detect), {}, {}};
  st.s = build_survival(propagator(st.decomp, tau), st.psi_d, tau);
  st.spectrum = full_spectrum(st.decomp, st.psi_d, tau);
  return st;
}

}  // namespace

TEST(Evolution, TrajectoryBookkeeping) {
  const auto st = setup(build_three_level_chain(1.0), "0", 2.0);
  const CVector psi = basis_state(st.model, "2").vector;
  const auto t = evolve(st.s, psi, 50, st.model.hamiltonian);
  ASSERT_EQ(t.records.size(), 51u);
  EXPECT_EQ(t.records[0].n, 0);
  double prob = 1.0;
  for (std::size_t n = 1; n < t.records.size(); ++n) {
    const auto& r = t.records[n];
    EXPECT_NEAR(r.state.norm(), 1.0, 1e-13);
    prob *= r.survival_amplitude * r.survival_amplitude;
    EXPECT_NEAR(r.cumulative_no_detection_probability, prob, 1e-12 * std::max(prob, 1e-300));
    EXPECT_LE(r.survival_amplitude, 1.0 + 1e-14);
  }
  // Unnormalized iteration gives the same probability.
  CVector raw = psi;
  for (int n = 0; n < 50; ++n) raw = st.s.matrix * raw;
  EXPECT_NEAR(raw.squaredNorm() / t.records.back().cumulative_no_detection_probability, 1.0, 1e-10);
}

TEST(Evolution, SpectralMatchesIterative) {
  for (const auto& [m, det, init, tau] :
       {std::tuple{build_three_level_chain(1.0), std::string("0"), std::string("2"), 2.0},
        std::tuple{build_v_atom(0, 3, 5, 0.01, 1), std::string("B"), std::string("G"), 0.5},
        std::tuple{build_glued_tree(3), std::string("(0,0)"), std::string("(3,2)"), 1.25}}) {
    const auto st = setup(m, det, tau);
    const CVector psi = basis_state(m, init).vector;
    const auto t = evolve(st.s, psi, 200, m.hamiltonian);
    for (std::int64_t n : {1, 7, 50, 200}) {
      const auto sp = evolve_spectral(st.spectrum, psi, n, m.hamiltonian);
      const double overlap = std::abs(sp.state.dot(t.records[static_cast<std::size_t>(n)].state));
      EXPECT_NEAR(overlap, 1.0, 1e-8) << m.kind << " n=" << n;
      EXPECT_NEAR(sp.mean_energy, t.records[static_cast<std::size_t>(n)].mean_energy, 1e-8);
    }
  }
}

TEST(Evolution, CertainDetectionAtExceptionalPoint) {
  const auto st = setup(build_exceptional_three_level(1.0), "1", 2.0 * pi / 3.0);
  CVector psi = CVector::Zero(3);
  psi[1] = 1.0;
  try {
    evolve(st.s, psi, 10, st.model.hamiltonian);
    FAIL() << "expected certain detection";
  } catch (const CertainDetection& e) {
    EXPECT_GE(e.step(), 1);
    EXPECT_LE(e.step(), 3);
  }
  EXPECT_THROW(evolve_spectral(st.spectrum, psi, 5, st.model.hamiltonian), Error);
  EXPECT_EQ(classify_regime(st.spectrum, psi, st.model.hamiltonian).kind, RegimeKind::Exceptional);
}

TEST(Evolution, StateMappedOntoDetectorIsAnnihilated) {
  const auto st = setup(build_three_level_chain(1.0), "0", 1.0);
  const CVector back = propagator(st.decomp, 1.0).adjoint() * st.psi_d.vector;
  EXPECT_THROW(step(st.s, back), CertainDetection);
}

TEST(Evolution, RegimeFixedPointAndOscillation) {
  const auto tree = build_glued_tree(3);
  const auto d = spectral_decompose(tree);
  const CVector ground = d.levels.front().vectors.col(0);
  const auto psi_d = basis_state(tree, "(0,0)");
  const auto fixed = classify_regime(full_spectrum(d, psi_d, 1.2), ground, tree.hamiltonian);
  EXPECT_EQ(fixed.kind, RegimeKind::FixedPoint);
  ASSERT_TRUE(fixed.predicted_energy);
  EXPECT_NEAR(*fixed.predicted_energy, 0.0, 1e-8);

  const auto sp = full_spectrum(d, psi_d, 2.3);
  const auto osc = classify_regime(sp, ground, tree.hamiltonian);
  EXPECT_EQ(osc.kind, RegimeKind::Oscillatory);
  ASSERT_EQ(osc.dominant.size(), 2u);
  EXPECT_NEAR(std::abs(sp.triples[osc.dominant[0]].xi), std::abs(sp.triples[osc.dominant[1]].xi), 1e-10);
  const auto desc = oscillation_descriptor(sp, osc, ground);
  const auto s = build_survival(propagator(d, 2.3), psi_d, 2.3);
  const auto t = evolve(s, ground, 400, tree.hamiltonian, false);
  EXPECT_NEAR(desc.energy_at(400, tree.hamiltonian), t.records.back().mean_energy, 1e-6);
}

TEST(Evolution, DarkDominatedPrediction) {
  const auto tree = build_glued_tree(3);
  const auto d = spectral_decompose(tree);
  const auto sp = full_spectrum(d, basis_state(tree, "(0,0)"), 1.2);
  const CVector psi = (d.levels[2].vectors.col(0) + d.levels[10].vectors.col(0)) / std::sqrt(2.0);
  const auto reg = classify_regime(sp, psi, tree.hamiltonian);
  EXPECT_EQ(reg.kind, RegimeKind::DarkDominated);
  ASSERT_TRUE(reg.predicted_energy);
  EXPECT_NEAR(*reg.predicted_energy, -2.0, 1e-10);
  EXPECT_GT(reg.dark_weight, 0.1);
}

TEST(Evolution, CrossoverIsMonotoneInRatio) {
  const auto m = build_v_atom(0, 3, 5, 0.01, 1);
  const auto d = spectral_decompose(m);
  const auto sp = full_spectrum(d, basis_state(m, "B"), 0.5);
  const CVector g = basis_state(m, "G").vector;
  const auto reg = classify_regime(sp, g, m.hamiltonian);
  const auto a = crossover_step(sp, reg, g, 0.1);
  const auto b = crossover_step(sp, reg, g, 0.01);
  EXPECT_GT(a, 0);
  EXPECT_GT(b, a);
}

TEST(Evolution, DescriptorNeedsTwoDominantRoots) {
  const auto tree = build_glued_tree(3);
  const auto d = spectral_decompose(tree);
  const auto sp = full_spectrum(d, basis_state(tree, "(0,0)"), 1.2);
  const CVector ground = d.levels.front().vectors.col(0);
  const auto reg = classify_regime(sp, ground, tree.hamiltonian);
  EXPECT_THROW(oscillation_descriptor(sp, reg, ground), Error);
}
