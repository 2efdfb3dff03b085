#include <benchmark/benchmark.h>

#include "nullsteer/charge.hpp"
#include "nullsteer/evolution.hpp"
#include "nullsteer/polynomial.hpp"
#include "nullsteer/runner.hpp"
#include "nullsteer/survival.hpp"

using namespace nullsteer;

namespace {

struct Tree {
  HermitianModel model;
  SpectralDecomposition decomp;
  DetectionState psi_d;
};

const Tree& tree(int d) {
  static std::vector<std::unique_ptr<Tree>> cache(11);
  auto& slot = cache[static_cast<std::size_t>(d)];
  if (!slot) {
    auto m = build_glued_tree(d);
    auto dec = spectral_decompose(m);
    auto psi = basis_state(m, glued_tree_label(0, 0));
    slot = std::make_unique<Tree>(Tree{std::move(m), std::move(dec), std::move(psi)});
  }
  return *slot;
}

void BM_SpectralDecompose(benchmark::State& state) {
  const auto m = build_glued_tree(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(m));
  state.SetLabel("dim " + std::to_string(m.dim()));
}
BENCHMARK(BM_SpectralDecompose)->DenseRange(3, 7, 2);

void BM_CompanionRoots(benchmark::State& state) {
  std::vector<cplx> roots;
  for (int k = 0; k < state.range(0); ++k) roots.push_back(std::polar(0.9, 0.37 * k));
  const Poly p = poly_from_roots(roots);
  for (auto _ : state) benchmark::DoNotOptimize(companion_roots(p));
}
BENCHMARK(BM_CompanionRoots)->RangeMultiplier(2)->Range(4, 64);

void BM_StationaryPoints(benchmark::State& state) {
  const auto& t = tree(static_cast<int>(state.range(0)));
  const auto cfg = charges(t.decomp, t.psi_d, 1.2);
  for (auto _ : state) benchmark::DoNotOptimize(stationary_points(cfg));
}
BENCHMARK(BM_StationaryPoints)->DenseRange(3, 7, 2);

void BM_FullSpectrum(benchmark::State& state) {
  const auto& t = tree(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(full_spectrum(t.decomp, t.psi_d, 1.2));
}
BENCHMARK(BM_FullSpectrum)->DenseRange(3, 7, 2);

void BM_Evolve(benchmark::State& state) {
  const auto& t = tree(3);
  const auto s = build_survival(propagator(t.decomp, 1.25), t.psi_d, 1.25);
  const CVector ground = t.decomp.levels.front().vectors.col(0);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(s, ground, state.range(0), t.model.hamiltonian, false));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Evolve)->Arg(1000)->Arg(10000);

void BM_EvolveSpectral(benchmark::State& state) {
  const auto& t = tree(3);
  const auto sp = full_spectrum(t.decomp, t.psi_d, 1.25);
  const CVector ground = t.decomp.levels.front().vectors.col(0);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_spectral(sp, ground, 10000, t.model.hamiltonian));
}
BENCHMARK(BM_EvolveSpectral);

void BM_RegimeSweep(benchmark::State& state) {
  const auto& t = tree(3);
  const CVector ground = t.decomp.levels.front().vectors.col(0);
  const auto workers = static_cast<unsigned>(state.range(0));
  std::vector<int> kinds(256);
  for (auto _ : state) {
    parallel_for(kinds.size(), workers, [&](std::size_t i) {
      const double tau = 0.05 + 3.0 * static_cast<double>(i) / 255.0;
      const auto sp = full_spectrum(t.decomp, t.psi_d, tau);
      kinds[i] = static_cast<int>(classify_regime(sp, ground, t.model.hamiltonian).kind);
    });
    benchmark::DoNotOptimize(kinds.data());
  }
}
BENCHMARK(BM_RegimeSweep)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
