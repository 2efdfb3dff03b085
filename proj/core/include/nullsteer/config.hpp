#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nullsteer/error.hpp"
#include "nullsteer/linalg.hpp"
#include "nullsteer/spectral.hpp"

namespace nullsteer {

/// Invalid configuration, located by line (0 when unknown) and JSON pointer.
class ConfigError : public Error {
 public:
  ConfigError(int line, std::string pointer, const std::string& what);
  int line() const noexcept { return line_; }
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  int line_;
  std::string pointer_;
};

struct ModelSpec {
  std::string type;
  double gamma = 1.0;
  int depth = 3;
  double e_g = 0.0, e_d = 3.0, e_b = 5.0, gamma1 = 0.01, gamma2 = 1.0;
  CMatrix matrix;
  std::vector<std::string> labels;
  std::string pointer = "/model";
};

struct StateSpec {
  enum class Kind { Site, Vector, EnergyState, Combination };
  Kind kind = Kind::Site;
  std::string site;
  CVector vector;
  std::size_t level = 0;
  Eigen::Index sublevel = 0;
  std::vector<std::pair<cplx, StateSpec>> terms;
  std::string pointer;
};

struct TauSpec {
  bool sweep = false;
  double value = 0.0;
  double start = 0.0, stop = 0.0;
  int steps = 1;
  std::vector<double> values() const;
};

struct PerturbSpec {
  std::string scheme;  // weak_charge | two_merge | triple_charge | zeno
  std::vector<std::size_t> levels;
  std::optional<double> delta;
  std::string pointer;
};

struct Tolerances {
  std::optional<double> grouping_tol;
  double tie_tol = 1e-6;
  double zero_threshold = 1e-12;
  double orthogonality_tol = 1e-10;
  double dark_overlap_tol = 1e-10;
};

struct ExperimentConfig {
  ModelSpec model;
  StateSpec detection;
  TauSpec tau;
  std::optional<StateSpec> initial_state;
  std::int64_t n_steps = 0;
  std::string experiment;
  Tolerances tol;
  std::vector<PerturbSpec> perturbations;
  bool dump_states = false;

  std::map<std::string, int> lines;  // JSON pointer -> source line
  std::string source_name;

  int line_for(const std::string& pointer) const;
  [[noreturn]] void reject(const std::string& pointer, const std::string& what) const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

HermitianModel build_model(const ExperimentConfig& config);

/// Resolves a state spec to a unit vector; failures are reported as
/// ConfigError at the spec's location.
CVector resolve_state(const ExperimentConfig& config, const StateSpec& spec, const HermitianModel& model,
                      const SpectralDecomposition& decomp);

}  // namespace nullsteer
