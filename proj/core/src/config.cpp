#include "nullsteer/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "nullsteer/json_locator.hpp"

namespace nullsteer {

using nlohmann::json;

namespace {

std::string located(int line, const std::string& pointer, const std::string& what) {
  std::string out = "config-error";
  if (line > 0) out += " (line " + std::to_string(line) + ")";
  if (!pointer.empty()) out += " at " + pointer;
  return out + ": " + what;
}

const std::set<std::string> kExperiments{"spectrum", "charges", "evolve", "sweep-tau", "regime", "perturb"};

class Parser {
 public:
  explicit Parser(ExperimentConfig& cfg) : cfg_(cfg) {}

  void check_keys(const json& j, const std::string& ptr, const std::set<std::string>& allowed) {
    if (!j.is_object()) cfg_.reject(ptr, "expected an object");
    for (const auto& [k, v] : j.items()) {
      if (!allowed.count(k)) cfg_.reject(ptr + "/" + k, "unknown key '" + k + "'");
    }
  }

  const json& need(const json& j, const std::string& ptr, const std::string& key) {
    if (!j.contains(key)) cfg_.reject(ptr, "missing required key '" + key + "'");
    return j.at(key);
  }

  double number(const json& j, const std::string& ptr) {
    if (!j.is_number()) cfg_.reject(ptr, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) cfg_.reject(ptr, "expected a finite number");
    return x;
  }

  double number_or(const json& j, const std::string& ptr, const std::string& key, double fallback) {
    return j.contains(key) ? number(j.at(key), ptr + "/" + key) : fallback;
  }

  double positive(const json& j, const std::string& ptr) {
    const double x = number(j, ptr);
    if (!(x > 0.0)) cfg_.reject(ptr, "expected a positive number");
    return x;
  }

  std::int64_t integer(const json& j, const std::string& ptr) {
    if (!j.is_number_integer()) cfg_.reject(ptr, "expected an integer");
    return j.get<std::int64_t>();
  }

  cplx complex_number(const json& j, const std::string& ptr) {
    if (j.is_number()) return {number(j, ptr), 0.0};
    if (j.is_array() && j.size() == 2) return {number(j[0], ptr + "/0"), number(j[1], ptr + "/1")};
    cfg_.reject(ptr, "expected a number or a [re, im] pair");
  }

  ModelSpec model(const json& j, const std::string& ptr) {
    ModelSpec m;
    m.pointer = ptr;
    if (!j.is_object()) cfg_.reject(ptr, "expected an object");
    const json& type = need(j, ptr, "type");
    if (!type.is_string()) cfg_.reject(ptr + "/type", "expected a string");
    m.type = type.get<std::string>();
    if (m.type == "two_level" || m.type == "three_level_chain" || m.type == "exceptional_three_level") {
      check_keys(j, ptr, {"type", "gamma"});
      m.gamma = j.contains("gamma") ? positive(j.at("gamma"), ptr + "/gamma") : 1.0;
    } else if (m.type == "v_atom") {
      check_keys(j, ptr, {"type", "E_G", "E_D", "E_B", "gamma1", "gamma2"});
      m.e_g = number_or(j, ptr, "E_G", 0.0);
      m.e_d = number_or(j, ptr, "E_D", 3.0);
      m.e_b = number_or(j, ptr, "E_B", 5.0);
      m.gamma1 = number_or(j, ptr, "gamma1", 0.01);
      m.gamma2 = number_or(j, ptr, "gamma2", 1.0);
    } else if (m.type == "glued_tree") {
      check_keys(j, ptr, {"type", "d"});
      const auto d = integer(need(j, ptr, "d"), ptr + "/d");
      if (d < 1 || d > 10) cfg_.reject(ptr + "/d", "glued tree depth must be in [1, 10]");
      m.depth = static_cast<int>(d);
    } else if (m.type == "custom") {
      check_keys(j, ptr, {"type", "matrix_re", "matrix_im", "labels"});
      const json& re = need(j, ptr, "matrix_re");
      const std::string rp = ptr + "/matrix_re";
      if (!re.is_array() || re.empty()) cfg_.reject(rp, "expected a non-empty row-major array");
      const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(re.size()))));
      if (n * n != static_cast<Eigen::Index>(re.size())) cfg_.reject(rp, "length is not a perfect square");
      m.matrix = CMatrix::Zero(n, n);
      for (Eigen::Index i = 0; i < n * n; ++i) {
        m.matrix(i / n, i % n) += number(re[static_cast<std::size_t>(i)], rp + "/" + std::to_string(i));
      }
      if (j.contains("matrix_im")) {
        const json& im = j.at("matrix_im");
        const std::string ip = ptr + "/matrix_im";
        if (!im.is_array() || im.size() != re.size()) cfg_.reject(ip, "must match matrix_re in length");
        for (Eigen::Index i = 0; i < n * n; ++i) {
          m.matrix(i / n, i % n) += I * number(im[static_cast<std::size_t>(i)], ip + "/" + std::to_string(i));
        }
      }
      if (j.contains("labels")) {
        const json& l = j.at("labels");
        if (!l.is_array() || static_cast<Eigen::Index>(l.size()) != n) {
          cfg_.reject(ptr + "/labels", "expected one label per basis state");
        }
        for (std::size_t i = 0; i < l.size(); ++i) {
          if (!l[i].is_string()) cfg_.reject(ptr + "/labels/" + std::to_string(i), "expected a string");
          m.labels.push_back(l[i].get<std::string>());
        }
      }
    } else {
      cfg_.reject(ptr + "/type", "unknown model type '" + m.type + "'");
    }
    return m;
  }

  StateSpec state(const json& j, const std::string& ptr) {
    StateSpec s;
    s.pointer = ptr;
    if (!j.is_object() || j.size() != 1) {
      cfg_.reject(ptr, "expected exactly one of site, vector, energy_state, combination");
    }
    const auto& [key, v] = *j.items().begin();
    const std::string vp = ptr + "/" + key;
    if (key == "site") {
      s.kind = StateSpec::Kind::Site;
      if (!v.is_string()) cfg_.reject(vp, "expected a basis label string");
      s.site = v.get<std::string>();
    } else if (key == "vector") {
      s.kind = StateSpec::Kind::Vector;
      if (!v.is_array() || v.empty()) cfg_.reject(vp, "expected a non-empty array");
      s.vector.resize(static_cast<Eigen::Index>(v.size()));
      for (std::size_t i = 0; i < v.size(); ++i) {
        s.vector[static_cast<Eigen::Index>(i)] = complex_number(v[i], vp + "/" + std::to_string(i));
      }
    } else if (key == "energy_state") {
      s.kind = StateSpec::Kind::EnergyState;
      if (!v.is_array() || v.size() != 2) cfg_.reject(vp, "expected [level, sublevel]");
      const auto k = integer(v[0], vp + "/0");
      const auto l = integer(v[1], vp + "/1");
      if (k < 0 || l < 0) cfg_.reject(vp, "indices must be non-negative");
      s.level = static_cast<std::size_t>(k);
      s.sublevel = static_cast<Eigen::Index>(l);
    } else if (key == "combination") {
      s.kind = StateSpec::Kind::Combination;
      if (!v.is_array() || v.empty()) cfg_.reject(vp, "expected a non-empty array");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string tp = vp + "/" + std::to_string(i);
        check_keys(v[i], tp, {"coefficient", "state"});
        const cplx c = complex_number(need(v[i], tp, "coefficient"), tp + "/coefficient");
        s.terms.emplace_back(c, state(need(v[i], tp, "state"), tp + "/state"));
      }
    } else {
      cfg_.reject(vp, "unknown state form '" + key + "'");
    }
    return s;
  }

  TauSpec tau(const json& j, const std::string& ptr) {
    TauSpec t;
    if (j.is_number()) {
      t.value = positive(j, ptr);
      return t;
    }
    check_keys(j, ptr, {"start", "stop", "steps"});
    t.sweep = true;
    t.start = positive(need(j, ptr, "start"), ptr + "/start");
    t.stop = positive(need(j, ptr, "stop"), ptr + "/stop");
    const auto steps = integer(need(j, ptr, "steps"), ptr + "/steps");
    if (steps < 1 || steps > 1000000) cfg_.reject(ptr + "/steps", "steps must be in [1, 1e6]");
    if (t.stop < t.start) cfg_.reject(ptr, "stop must not be below start");
    t.steps = static_cast<int>(steps);
    t.value = t.start;
    return t;
  }

  Tolerances tolerances(const json& j, const std::string& ptr) {
    check_keys(j, ptr, {"grouping_tol", "tie_tol", "zero_threshold", "orthogonality_tol", "dark_overlap_tol"});
    Tolerances t;
    if (j.contains("grouping_tol")) t.grouping_tol = positive(j.at("grouping_tol"), ptr + "/grouping_tol");
    if (j.contains("tie_tol")) t.tie_tol = positive(j.at("tie_tol"), ptr + "/tie_tol");
    if (j.contains("zero_threshold")) t.zero_threshold = positive(j.at("zero_threshold"), ptr + "/zero_threshold");
    if (j.contains("orthogonality_tol")) {
      t.orthogonality_tol = positive(j.at("orthogonality_tol"), ptr + "/orthogonality_tol");
    }
    if (j.contains("dark_overlap_tol")) {
      t.dark_overlap_tol = positive(j.at("dark_overlap_tol"), ptr + "/dark_overlap_tol");
    }
    return t;
  }

  PerturbSpec perturbation(const json& j, const std::string& ptr) {
    check_keys(j, ptr, {"scheme", "levels", "delta"});
    PerturbSpec p;
    p.pointer = ptr;
    const json& s = need(j, ptr, "scheme");
    if (!s.is_string()) cfg_.reject(ptr + "/scheme", "expected a string");
    p.scheme = s.get<std::string>();
    static const std::map<std::string, std::size_t> arity{
        {"weak_charge", 1}, {"two_merge", 2}, {"triple_charge", 3}, {"zeno", 0}};
    const auto it = arity.find(p.scheme);
    if (it == arity.end()) cfg_.reject(ptr + "/scheme", "unknown scheme '" + p.scheme + "'");
    if (it->second > 0) {
      const json& l = need(j, ptr, "levels");
      if (!l.is_array() || l.size() != it->second) {
        cfg_.reject(ptr + "/levels", "expected " + std::to_string(it->second) + " level indices");
      }
      for (std::size_t i = 0; i < l.size(); ++i) {
        const auto k = integer(l[i], ptr + "/levels/" + std::to_string(i));
        if (k < 0) cfg_.reject(ptr + "/levels/" + std::to_string(i), "level index must be non-negative");
        p.levels.push_back(static_cast<std::size_t>(k));
      }
    }
    if (j.contains("delta")) p.delta = positive(j.at("delta"), ptr + "/delta");
    return p;
  }

 private:
  ExperimentConfig& cfg_;
};

}  // namespace

ConfigError::ConfigError(int line, std::string pointer, const std::string& what)
    : Error(ErrorCode::config_error, located(line, pointer, what)), line_(line), pointer_(std::move(pointer)) {}

std::vector<double> TauSpec::values() const {
  if (!sweep) return {value};
  std::vector<double> out;
  for (int i = 0; i < steps; ++i) out.push_back(steps == 1 ? start : start + (stop - start) * i / (steps - 1));
  return out;
}

int ExperimentConfig::line_for(const std::string& pointer) const {
  // Fall back to the closest enclosing value that was located.
  std::string p = pointer;
  while (true) {
    const auto it = lines.find(p);
    if (it != lines.end()) return it->second;
    if (p.empty()) return 0;
    p = p.substr(0, p.rfind('/'));
  }
}

void ExperimentConfig::reject(const std::string& pointer, const std::string& what) const {
  throw ConfigError(line_for(pointer), pointer.empty() ? "/" : pointer, what);
}

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  ExperimentConfig cfg;
  cfg.source_name = source_name;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), "", "malformed JSON");
  }
  cfg.lines = locate_json_values(text);
  Parser p(cfg);
  p.check_keys(root, "", {"model", "detection", "tau", "initial_state", "n_steps", "experiment", "tolerances",
                          "perturbations", "dump_states"});
  cfg.model = p.model(p.need(root, "", "model"), "/model");
  cfg.detection = p.state(p.need(root, "", "detection"), "/detection");
  cfg.tau = p.tau(p.need(root, "", "tau"), "/tau");
  const json& ex = p.need(root, "", "experiment");
  if (!ex.is_string() || !kExperiments.count(ex.get<std::string>())) {
    cfg.reject("/experiment", "experiment must be one of spectrum, charges, evolve, sweep-tau, regime, perturb");
  }
  cfg.experiment = ex.get<std::string>();
  if (root.contains("initial_state")) cfg.initial_state = p.state(root.at("initial_state"), "/initial_state");
  if (root.contains("n_steps")) {
    cfg.n_steps = p.integer(root.at("n_steps"), "/n_steps");
    if (cfg.n_steps < 0 || cfg.n_steps > 100000000) cfg.reject("/n_steps", "n_steps must be in [0, 1e8]");
  }
  if (root.contains("tolerances")) cfg.tol = p.tolerances(root.at("tolerances"), "/tolerances");
  if (root.contains("perturbations")) {
    const json& list = root.at("perturbations");
    if (!list.is_array()) cfg.reject("/perturbations", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.perturbations.push_back(p.perturbation(list[i], "/perturbations/" + std::to_string(i)));
    }
  }
  if (root.contains("dump_states")) {
    if (!root.at("dump_states").is_boolean()) cfg.reject("/dump_states", "expected true or false");
    cfg.dump_states = root.at("dump_states").get<bool>();
  }

  if (cfg.experiment == "evolve") {
    if (!cfg.initial_state) cfg.reject("", "evolve needs an initial_state");
    if (cfg.n_steps < 1) cfg.reject("/n_steps", "evolve needs n_steps >= 1");
    if (cfg.tau.sweep) cfg.reject("/tau", "evolve takes a single tau");
  }
  if (cfg.experiment == "perturb" && cfg.perturbations.empty()) {
    cfg.reject("", "perturb needs a non-empty perturbations list");
  }
  if (cfg.experiment == "sweep-tau" && !cfg.tau.sweep) cfg.reject("/tau", "sweep-tau needs {start, stop, steps}");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

HermitianModel build_model(const ExperimentConfig& config) {
  const ModelSpec& m = config.model;
  try {
    if (m.type == "two_level") return build_two_level(m.gamma);
    if (m.type == "three_level_chain") return build_three_level_chain(m.gamma);
    if (m.type == "exceptional_three_level") return build_exceptional_three_level(m.gamma);
    if (m.type == "v_atom") return build_v_atom(m.e_g, m.e_d, m.e_b, m.gamma1, m.gamma2);
    if (m.type == "glued_tree") return build_glued_tree(m.depth);
    if (m.type == "custom") return build_custom(m.matrix, m.labels);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    config.reject(m.pointer, e.what());
  }
  config.reject(m.pointer + "/type", "unknown model type '" + m.type + "'");
}

CVector resolve_state(const ExperimentConfig& config, const StateSpec& spec, const HermitianModel& model,
                      const SpectralDecomposition& decomp) {
  CVector v;
  switch (spec.kind) {
    case StateSpec::Kind::Site: {
      const auto& labels = model.basis_labels;
      const auto it = std::find(labels.begin(), labels.end(), spec.site);
      if (it == labels.end()) config.reject(spec.pointer + "/site", "unknown basis label '" + spec.site + "'");
      v = CVector::Zero(model.dim());
      v[it - labels.begin()] = 1.0;
      break;
    }
    case StateSpec::Kind::Vector:
      if (spec.vector.size() != model.dim()) {
        config.reject(spec.pointer + "/vector", "expected " + std::to_string(model.dim()) + " components");
      }
      v = spec.vector;
      break;
    case StateSpec::Kind::EnergyState:
      if (spec.level >= decomp.levels.size() || spec.sublevel >= decomp.levels[spec.level].degeneracy()) {
        config.reject(spec.pointer + "/energy_state", "energy state index out of range");
      }
      v = decomp.levels[spec.level].vectors.col(spec.sublevel);
      break;
    case StateSpec::Kind::Combination:
      v = CVector::Zero(model.dim());
      for (const auto& [c, term] : spec.terms) v += c * resolve_state(config, term, model, decomp);
      break;
  }
  const double n = v.norm();
  if (!(n > 1e-300) || !std::isfinite(n)) config.reject(spec.pointer, "state has zero norm");
  return v / n;
}

}  // namespace nullsteer
