#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <sstream>

#include "nullsteer/csv.hpp"
#include "nullsteer/runner.hpp"

using namespace nullsteer;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "nullsteer_runner_test" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_text(const std::string& text, const fs::path& out) {
  try {
    return run_experiment(parse_config(text), out);
  } catch (...) {
    return result_from_exception(std::current_exception());
  }
}

const std::string kTree = R"J("model": {"type": "glued_tree", "d": 3}, "detection": {"site": "(0,0)"}, )J";

}  // namespace

TEST(Csv, SeventeenSignificantDigits) {
  EXPECT_EQ(format_double(0.1), "1.0000000000000001e-01");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Runner, ParallelForCoversRangeAndRethrows) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
               std::runtime_error);
}

TEST(Runner, SpectrumWritesFilesAndManifest) {
  const auto out = scratch("spectrum");
  const auto r = run_text("{" + kTree + R"J("tau": 1.2, "experiment": "spectrum"})J", out);
  ASSERT_EQ(r.exit_code, exit_ok) << r.message;
  for (const char* f : {"spectrum.csv", "charges.csv", "roots.csv", "charges.svg", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const std::string manifest = slurp(out / "manifest.json");
  for (const char* key : {"grouping_tol", "tie_tol", "zero_threshold", "dark_overlap_tol", "version", "wall_time"}) {
    EXPECT_NE(manifest.find(key), std::string::npos) << key;
  }
}

TEST(Runner, RegimeSweepFlipsToOscillatory) {
  const auto out = scratch("regime");
  const auto r = run_text("{" + kTree + R"J("tau": {"start": 1.15, "stop": 1.30, "steps": 16}, "experiment": "regime"})J",
                          out);
  ASSERT_EQ(r.exit_code, exit_ok) << r.message;
  std::ifstream in(out / "sweep.csv");
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<double, std::string>> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string tau, kind;
    std::getline(ss, tau, ',');
    std::getline(ss, kind, ',');
    rows.emplace_back(std::stod(tau), kind);
  }
  ASSERT_EQ(rows.size(), 16u);
  for (const auto& [tau, kind] : rows) {
    if (std::abs(tau - 1.2) < 1e-9) EXPECT_EQ(kind, "FixedPoint");
    if (std::abs(tau - 1.25) < 1e-9) EXPECT_EQ(kind, "Oscillatory");
  }
}

TEST(Runner, SweepIsDeterministicAcrossThreadCounts) {
  const std::string text = "{" + kTree + R"J("tau": {"start": 0.5, "stop": 3.0, "steps": 40}, "experiment": "sweep-tau"})J";
  const auto a = scratch("sweep_a");
  const auto b = scratch("sweep_b");
  RunOptions one;
  one.threads = 1;
  RunOptions many;
  many.threads = 6;
  ASSERT_EQ(run_experiment(parse_config(text), a, one).exit_code, exit_ok);
  ASSERT_EQ(run_experiment(parse_config(text), b, many).exit_code, exit_ok);
  EXPECT_EQ(slurp(a / "sweep.csv"), slurp(b / "sweep.csv"));
}

TEST(Runner, CertainDetectionExitsThree) {
  const auto out = scratch("exceptional");
  const auto r = run_text(R"J({"model": {"type": "exceptional_three_level", "gamma": 1},
    "detection": {"site": "1"}, "tau": 2.0943951023931957, "initial_state": {"site": "2"},
    "n_steps": 20, "experiment": "evolve"})J",
                          out);
  EXPECT_EQ(r.exit_code, exit_certain_detection);
  ASSERT_TRUE(r.detection_step);
  EXPECT_GE(*r.detection_step, 1);
  EXPECT_TRUE(fs::exists(out / "trajectory.csv"));
  EXPECT_NE(slurp(out / "manifest.json").find("certain_detection_step"), std::string::npos);
}

TEST(Runner, ConfigErrorsExitTwo) {
  const auto out = scratch("bad");
  EXPECT_EQ(run_text("{" + kTree + R"J("tau": 1.2, "experiment": "spectrum", "extra": 1})J", out).exit_code,
            exit_config);
  EXPECT_EQ(run_text("{" + kTree + R"J("tau": {"start": 1, "stop": 2, "steps": 3}, "experiment": "charges"})J", out)
                .exit_code,
            exit_config);
  EXPECT_EQ(run_config_file(out / "missing.json", out).exit_code, exit_config);
}

TEST(Runner, PerturbWritesEstimates) {
  const auto out = scratch("perturb");
  const auto r = run_text("{" + kTree + R"J("tau": 2.3, "experiment": "perturb",
    "perturbations": [{"scheme": "triple_charge", "levels": [1, 0, 2]}]})J",
                          out);
  // Level indices that do not form a symmetric cluster are a config problem.
  EXPECT_EQ(r.exit_code, exit_config) << r.message;
  const auto ok = run_text(R"J({"model": {"type": "three_level_chain", "gamma": 1}, "detection": {"site": "0"},
    "tau": 2.0, "experiment": "perturb",
    "perturbations": [{"scheme": "two_merge", "levels": [0, 2]}, {"scheme": "zeno"}]})J",
                           out);
  EXPECT_EQ(ok.exit_code, exit_config) << "zeno needs Delta E tau < 1";
  const auto good = run_text(R"J({"model": {"type": "three_level_chain", "gamma": 1}, "detection": {"site": "0"},
    "tau": 2.0, "experiment": "perturb", "perturbations": [{"scheme": "two_merge", "levels": [0, 2]}]})J",
                             out);
  ASSERT_EQ(good.exit_code, exit_ok) << good.message;
  EXPECT_TRUE(fs::exists(out / "estimates.csv"));
}

TEST(Runner, EvolveIsByteIdentical) {
  const std::string text = R"J({"model": {"type": "three_level_chain", "gamma": 1}, "detection": {"site": "0"},
    "tau": 4.31697, "initial_state": {"site": "2"}, "n_steps": 300, "experiment": "evolve"})J";
  const auto a = scratch("evolve_a");
  const auto b = scratch("evolve_b");
  ASSERT_EQ(run_text(text, a).exit_code, exit_ok);
  ASSERT_EQ(run_text(text, b).exit_code, exit_ok);
  EXPECT_EQ(slurp(a / "trajectory.csv"), slurp(b / "trajectory.csv"));
}

TEST(Runner, ReproduceEmitsCsvAndSvg) {
  for (const auto& id : {"fig3", "fig5"}) {
    const auto out = scratch(id);
    const auto r = reproduce(id, out);
    EXPECT_TRUE(fs::exists(out / (std::string(id) + ".csv")));
    EXPECT_TRUE(fs::exists(out / (std::string(id) + ".svg")));
    EXPECT_EQ(r.exit_code, exit_ok);
  }
  EXPECT_EQ(figure_ids().size(), 6u);
}
