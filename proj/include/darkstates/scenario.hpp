#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "darkstates/basis.hpp"
#include "darkstates/couplings.hpp"
#include "darkstates/dynamics.hpp"

namespace darkstates {

enum class CouplingModel { Dicke, Explicit, ScalarKernel };

struct CouplingSpec {
  CouplingModel model = CouplingModel::Dicke;
  std::vector<double> gamma{1.0};  ///< per transition, or one value for all
  std::vector<double> omega{0.0};  ///< Dicke exchange shift per transition
  std::vector<Eigen::MatrixXd> gamma_matrices;
  std::vector<Eigen::MatrixXd> omega_matrices;
  std::vector<Eigen::VectorXd> omega_bar;
  std::vector<Eigen::Vector3d> positions;
};

/// Everything a simulation run needs.  Times are in units of 1/Gamma.
struct ScenarioConfig {
  int atoms = 3;
  SchemeKind scheme = SchemeKind::Lambda;
  int levels = 3;
  CouplingSpec coupling;
  /// dark, superradiant, inverted, ground, singlet_g1, singlet_g2, v_dark or custom
  std::string initial_state = "dark";
  std::vector<cplx> amplitudes;  ///< for initial_state == custom
  double t_max = 20.0;
  int samples = 400;
  double tol = 1e-8;
};

/// Named presets: fig2, fig3_g1, fig3_g2, fig5, figv.
ScenarioConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// YAML configuration.  Throws ConfigError with the line and key at fault.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

LevelScheme scheme_of(const ScenarioConfig& config);
CouplingSet couplings_of(const ScenarioConfig& config);

/// Named states shared by scenarios and the CLI.  Throws InvalidArgument for unknown names.
PureState named_state(const std::string& name, int atoms, const LevelScheme& scheme,
                      const std::vector<cplx>& amplitudes = {});
PureState initial_state(const ScenarioConfig& config);

/// psi_d^M for M == d (either scheme), otherwise none.
std::optional<PureState> dark_reference(int atoms, const LevelScheme& scheme);

Trajectory run_scenario(const ScenarioConfig& config, bool keep_states = false);

/// time_gamma,pop_e_total,pop_e_atom_1..M,pop_g_<level>_total...,dark_fraction,trace,purity
std::string csv_header(int atoms, const LevelScheme& scheme);
void write_csv(std::ostream& out, const Trajectory& trajectory, const LevelScheme& scheme);

}  // namespace darkstates
