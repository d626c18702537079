#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "darkstates/errors.hpp"
#include "darkstates/scenario.hpp"

namespace darkstates {

namespace {

int line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& what) {
  throw ConfigError(key, line_of(node), what);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, key, "expected a scalar value");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, key, "cannot read value '" + node.Scalar() + "'");
  }
}

std::vector<double> number_list(const YAML::Node& node, const std::string& key) {
  if (node.IsScalar()) return {scalar<double>(node, key)};
  if (!node.IsSequence()) fail(node, key, "expected a number or a list of numbers");
  std::vector<double> out;
  for (const auto& item : node) out.push_back(scalar<double>(item, key));
  return out;
}

Eigen::MatrixXd matrix(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() == 0) fail(node, key, "expected a list of rows");
  const auto rows = static_cast<Eigen::Index>(node.size());
  Eigen::MatrixXd m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = number_list(node[static_cast<std::size_t>(r)], key);
    if (static_cast<Eigen::Index>(row.size()) != rows) fail(node[static_cast<std::size_t>(r)], key, "matrix must be square");
    for (Eigen::Index c = 0; c < rows; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

std::vector<Eigen::MatrixXd> matrix_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) fail(node, key, "expected a list of matrices, one per transition");
  std::vector<Eigen::MatrixXd> out;
  for (const auto& item : node) out.push_back(matrix(item, key));
  return out;
}

void reject_unknown(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, prefix + key, "unknown key");
  }
}

CouplingSpec parse_coupling(const YAML::Node& node) {
  if (!node.IsMap()) fail(node, "coupling", "expected a mapping");
  reject_unknown(node, {"model", "gamma", "omega", "gamma_matrices", "omega_matrices", "omega_bar", "positions"},
                 "coupling.");
  CouplingSpec spec;
  if (!node["model"]) fail(node, "coupling.model", "missing required key");
  const auto model = scalar<std::string>(node["model"], "coupling.model");
  if (model == "dicke")
    spec.model = CouplingModel::Dicke;
  else if (model == "explicit")
    spec.model = CouplingModel::Explicit;
  else if (model == "scalar_kernel")
    spec.model = CouplingModel::ScalarKernel;
  else
    fail(node["model"], "coupling.model", "expected dicke, explicit or scalar_kernel");

  if (node["gamma"]) spec.gamma = number_list(node["gamma"], "coupling.gamma");
  if (node["omega"]) spec.omega = number_list(node["omega"], "coupling.omega");
  if (node["gamma_matrices"]) spec.gamma_matrices = matrix_list(node["gamma_matrices"], "coupling.gamma_matrices");
  if (node["omega_matrices"]) spec.omega_matrices = matrix_list(node["omega_matrices"], "coupling.omega_matrices");
  if (node["omega_bar"]) {
    const auto& ob = node["omega_bar"];
    if (!ob.IsSequence()) fail(ob, "coupling.omega_bar", "expected one list per transition");
    for (const auto& item : ob) {
      const auto v = number_list(item, "coupling.omega_bar");
      spec.omega_bar.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
  }
  if (node["positions"]) {
    const auto& pos = node["positions"];
    if (!pos.IsSequence()) fail(pos, "coupling.positions", "expected a list of [x, y, z]");
    for (const auto& item : pos) {
      const auto v = number_list(item, "coupling.positions");
      if (v.size() != 3) fail(item, "coupling.positions", "each position needs three coordinates");
      spec.positions.emplace_back(v[0], v[1], v[2]);
    }
  }
  if (spec.model == CouplingModel::Explicit && spec.gamma_matrices.empty())
    fail(node, "coupling.gamma_matrices", "explicit model needs decay matrices");
  if (spec.model == CouplingModel::ScalarKernel && spec.positions.empty())
    fail(node, "coupling.positions", "scalar_kernel model needs atom positions");
  return spec;
}

std::vector<cplx> parse_amplitudes(const YAML::Node& node) {
  if (!node.IsSequence()) fail(node, "amplitudes", "expected a list of numbers or [re, im] pairs");
  std::vector<cplx> out;
  for (const auto& item : node) {
    if (item.IsSequence()) {
      const auto v = number_list(item, "amplitudes");
      if (v.size() != 2) fail(item, "amplitudes", "complex amplitudes are written [re, im]");
      out.emplace_back(v[0], v[1]);
    } else {
      out.emplace_back(scalar<double>(item, "amplitudes"), 0.0);
    }
  }
  return out;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) throw ConfigError("", 1, "top level must be a mapping");
  reject_unknown(root,
                 {"atoms", "scheme", "levels", "coupling", "initial_state", "amplitudes", "t_max", "samples", "tol"},
                 "");

  ScenarioConfig c;
  for (const char* key : {"atoms", "scheme", "levels", "coupling", "initial_state"})
    if (!root[key]) throw ConfigError(key, 0, "missing required key");

  c.atoms = scalar<int>(root["atoms"], "atoms");
  if (c.atoms < 1) fail(root["atoms"], "atoms", "must be at least 1");
  c.levels = scalar<int>(root["levels"], "levels");
  if (c.levels < 2) fail(root["levels"], "levels", "must be at least 2");
  const auto scheme = scalar<std::string>(root["scheme"], "scheme");
  if (scheme == "lambda")
    c.scheme = SchemeKind::Lambda;
  else if (scheme == "v")
    c.scheme = SchemeKind::V;
  else
    fail(root["scheme"], "scheme", "expected lambda or v");
  c.coupling = parse_coupling(root["coupling"]);
  c.initial_state = scalar<std::string>(root["initial_state"], "initial_state");
  if (root["amplitudes"]) c.amplitudes = parse_amplitudes(root["amplitudes"]);
  if (c.initial_state == "custom" && c.amplitudes.empty())
    fail(root["initial_state"], "amplitudes", "custom initial state needs amplitudes");
  if (root["t_max"]) {
    c.t_max = scalar<double>(root["t_max"], "t_max");
    if (!(c.t_max > 0.0)) fail(root["t_max"], "t_max", "must be positive");
  }
  if (root["samples"]) {
    c.samples = scalar<int>(root["samples"], "samples");
    if (c.samples < 2) fail(root["samples"], "samples", "must be at least 2");
  }
  if (root["tol"]) {
    c.tol = scalar<double>(root["tol"], "tol");
    if (!(c.tol >= 1e-12 && c.tol <= 1e-3)) fail(root["tol"], "tol", "must lie in [1e-12, 1e-3]");
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace darkstates
