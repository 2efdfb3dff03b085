#include <gtest/gtest.h>

#include "nullsteer/config.hpp"

using namespace nullsteer;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Config, ParsesEvolve) {
  const auto cfg = parse_config(R"J({
    "model": {"type": "three_level_chain", "gamma": 1.0},
    "detection": {"site": "0"},
    "tau": 4.31697,
    "initial_state": {"site": "2"},
    "n_steps": 300,
    "experiment": "evolve"
  })J");
  EXPECT_EQ(cfg.model.type, "three_level_chain");
  EXPECT_FALSE(cfg.tau.sweep);
  EXPECT_DOUBLE_EQ(cfg.tau.value, 4.31697);
  EXPECT_EQ(cfg.n_steps, 300);
  ASSERT_TRUE(cfg.initial_state);
  const auto m = build_model(cfg);
  EXPECT_EQ(m.dim(), 3);
}

TEST(Config, SweepValuesAreInclusive) {
  const auto cfg = parse_config(R"J({
    "model": {"type": "glued_tree", "d": 3},
    "detection": {"site": "(0,0)"},
    "tau": {"start": 1.15, "stop": 1.30, "steps": 16},
    "experiment": "regime"
  })J");
  const auto v = cfg.tau.values();
  ASSERT_EQ(v.size(), 16u);
  EXPECT_DOUBLE_EQ(v.front(), 1.15);
  EXPECT_DOUBLE_EQ(v.back(), 1.30);
  EXPECT_NEAR(v[1] - v[0], 0.01, 1e-15);
}

TEST(Config, UnknownKeyReportsLine) {
  const std::string text = "{\n  \"model\": {\"type\": \"two_level\"},\n  \"detection\": {\"site\": \"l\"},\n"
                           "  \"tau\": 1.0,\n  \"experiment\": \"spectrum\",\n  \"bogus\": 3\n}";
  EXPECT_EQ(error_line(text), 6);
}

TEST(Config, MalformedJsonReportsLine) {
  EXPECT_EQ(error_line("{\n  \"model\": {\"type\": \"two_level\"},\n  \"tau\": ,\n}"), 3);
}

TEST(Config, ValidationErrors) {
  const std::string base = R"J("model": {"type": "two_level"}, "detection": {"site": "l"}, )J";
  EXPECT_THROW(parse_config("{" + base + R"J("tau": -1, "experiment": "spectrum"})J"), ConfigError);
  EXPECT_THROW(parse_config("{" + base + R"J("tau": 1, "experiment": "dance"})J"), ConfigError);
  EXPECT_THROW(parse_config("{" + base + R"J("tau": 1, "experiment": "evolve", "n_steps": 5})J"), ConfigError);
  EXPECT_THROW(parse_config("{" + base + R"J("tau": 1, "experiment": "perturb"})J"), ConfigError);
  EXPECT_THROW(parse_config("{" + base + R"J("tau": 1, "experiment": "sweep-tau"})J"), ConfigError);
  EXPECT_THROW(parse_config(R"J({"model": {"type": "glued_tree", "d": 0}, "detection": {"site": "(0,0)"},
                                "tau": 1, "experiment": "spectrum"})J"),
               ConfigError);
}

TEST(Config, StatesResolve) {
  const auto cfg = parse_config(R"J({
    "model": {"type": "glued_tree", "d": 3},
    "detection": {"site": "(0,0)"},
    "tau": 1.2,
    "initial_state": {"combination": [
      {"coefficient": 1, "state": {"energy_state": [2, 0]}},
      {"coefficient": [0, 1], "state": {"energy_state": [10, 0]}}]},
    "n_steps": 10,
    "experiment": "evolve"
  })J");
  const auto m = build_model(cfg);
  const auto d = spectral_decompose(m);
  const CVector psi = resolve_state(cfg, *cfg.initial_state, m, d);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-14);
  EXPECT_NEAR(std::norm(d.levels[2].vectors.col(0).dot(psi)), 0.5, 1e-12);
}

TEST(Config, UnknownLabelIsConfigError) {
  const auto cfg = parse_config(R"J({"model": {"type": "two_level"}, "detection": {"site": "x"},
                                    "tau": 1, "experiment": "spectrum"})J");
  const auto m = build_model(cfg);
  EXPECT_THROW(resolve_state(cfg, cfg.detection, m, spectral_decompose(m)), ConfigError);
}

TEST(Config, CustomModel) {
  const auto cfg = parse_config(R"J({
    "model": {"type": "custom", "matrix_re": [0, 1, 1, 0], "labels": ["a", "b"]},
    "detection": {"vector": [1, [0, 1]]},
    "tau": 0.5,
    "experiment": "spectrum"
  })J");
  const auto m = build_model(cfg);
  EXPECT_EQ(m.basis_labels[1], "b");
  const CVector v = resolve_state(cfg, cfg.detection, m, spectral_decompose(m));
  EXPECT_NEAR(v.norm(), 1.0, 1e-15);
}
