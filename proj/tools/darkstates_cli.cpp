// Command line front end: scenario runs, figure presets, stationarity checks,
// preparation protocols and entanglement reports.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure,
// 3 the checked property does not hold (e.g. a state is not stationary).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "darkstates/circuits.hpp"
#include "darkstates/dynamics.hpp"
#include "darkstates/entanglement.hpp"
#include "darkstates/errors.hpp"
#include "darkstates/scenario.hpp"
#include "darkstates/states.hpp"

using namespace darkstates;

namespace {

constexpr int kValidation = 1;
constexpr int kNumerical = 2;
constexpr int kPropertyFails = 3;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string num(cplx z) {
  if (z.imag() == 0.0) return num(z.real());
  return num(z.real()) + (z.imag() < 0 ? "-" : "+") + num(std::abs(z.imag())) + "i";
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void write_trajectory(const ScenarioConfig& config, const std::string& out_path) {
  const Trajectory traj = run_scenario(config);
  std::ofstream out(out_path);
  if (!out) throw InvalidArgument("cannot open output file '" + out_path + "'");
  write_csv(out, traj, scheme_of(config));
  std::cerr << "wrote " << traj.times.size() << " rows to " << out_path << " (" << traj.steps << " steps)\n";
}

// Whitespace separated amplitudes: "re" or "re im" per line.
std::vector<cplx> read_amplitudes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open state file '" + path + "'");
  std::vector<cplx> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double re = 0.0, im = 0.0;
    if (!(ls >> re)) throw InvalidArgument("bad amplitude line '" + line + "' in " + path);
    ls >> im;
    out.emplace_back(re, im);
  }
  return out;
}

SchemeKind scheme_kind(const std::string& name) {
  if (name == "lambda") return SchemeKind::Lambda;
  if (name == "v") return SchemeKind::V;
  throw InvalidArgument("scheme must be lambda or v");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective dark states of multilevel atoms: simulation and analysis"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a scenario from a YAML config and write CSV");
  std::string config_path, out_path;
  simulate->add_option("--config", config_path, "Scenario config (YAML)")->required();
  simulate->add_option("--out", out_path, "Output CSV path")->required();

  // figure
  auto* figure = app.add_subcommand("figure", "Run a figure preset and write CSV");
  std::string figure_name, figure_initial;
  int figure_samples = 0;
  double figure_tmax = 0.0;
  figure->add_option("name", figure_name, "Preset name")
      ->required()
      ->check(CLI::IsMember(preset_names()));
  figure->add_option("--out", out_path, "Output CSV path")->required();
  figure->add_option("--initial", figure_initial, "Override the preset's initial state");
  figure->add_option("--samples", figure_samples, "Override the number of output times");
  figure->add_option("--t-max", figure_tmax, "Override the final time (units 1/Gamma)");

  // stationary
  auto* stationary = app.add_subcommand("stationary", "Check stationarity of a pure state (exit 0 iff stationary)");
  std::string st_state = "dark", st_file, st_scheme = "lambda", st_model = "dicke", st_config;
  int st_atoms = 3, st_levels = 0;
  double st_gamma = 1.0, st_omega = 0.0, st_tol = 1e-9;
  stationary->add_option("--state", st_state, "Named state (dark, superradiant, inverted, ground, singlet_g1, ...)");
  stationary->add_option("--file", st_file, "Read amplitudes from a file instead");
  stationary->add_option("--atoms", st_atoms, "Atom count");
  stationary->add_option("--levels", st_levels, "Levels per atom (default: atom count)");
  stationary->add_option("--scheme", st_scheme, "lambda or v");
  stationary->add_option("--model", st_model, "Coupling model (dicke)")->check(CLI::IsMember({"dicke"}));
  stationary->add_option("--config", st_config, "Take scheme and couplings from a scenario config");
  stationary->add_option("--gamma", st_gamma, "Dicke decay rate");
  stationary->add_option("--omega", st_omega, "Dicke exchange shift");
  stationary->add_option("--tol", st_tol, "Residual tolerance");

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Run a dark-state preparation protocol");
  std::string pr_method = "2";
  int pr_atoms = 3;
  bool pr_super = false;
  prepare->add_option("--method", pr_method, "1, 2 or recursive")->check(CLI::IsMember({"1", "2", "recursive"}));
  prepare->add_option("--atoms", pr_atoms, "N for the recursive protocol");
  prepare->add_flag("--superradiant", pr_super, "Prepare the symmetric state (recursive only)");

  // entangle
  auto* entangle = app.add_subcommand("entangle", "Entanglement report for a named state");
  std::string en_state = "dark", en_measures = "reductions,geometric,witness,negativity";
  int en_atoms = 3, en_restarts = 20;
  std::uint64_t en_seed = GeometricMeasureOptions{}.seed;
  std::vector<int> en_lose;
  entangle->add_option("--state", en_state, "dark or superradiant");
  entangle->add_option("--atoms", en_atoms, "N (atoms = levels)");
  entangle->add_option("--measures", en_measures, "Comma list: reductions, geometric, witness, negativity");
  entangle->add_option("--lose", en_lose, "Atoms (1-based) lost before the negativity check");
  entangle->add_option("--restarts", en_restarts, "Random restarts for the geometric measure");
  entangle->add_option("--seed", en_seed, "Seed of the restart schedule");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kValidation;
  }

  try {
    if (*simulate) {
      write_trajectory(load_config(config_path), out_path);
      return 0;
    }

    if (*figure) {
      ScenarioConfig config = preset(figure_name);
      if (!figure_initial.empty()) config.initial_state = figure_initial;
      if (figure_samples > 0) config.samples = figure_samples;
      if (figure_tmax > 0.0) config.t_max = figure_tmax;
      write_trajectory(config, out_path);
      return 0;
    }

    if (*stationary) {
      ScenarioConfig config;
      if (!st_config.empty()) {
        config = load_config(st_config);
      } else {
        config.atoms = st_atoms;
        config.levels = st_levels > 0 ? st_levels : st_atoms;
        config.scheme = scheme_kind(st_scheme);
        config.coupling.model = CouplingModel::Dicke;
        config.coupling.gamma = {st_gamma};
        config.coupling.omega = {st_omega};
      }
      const LevelScheme scheme = scheme_of(config);
      const CouplingSet couplings = couplings_of(config);
      const PureState phi = st_file.empty()
                                ? named_state(st_state, config.atoms, scheme)
                                : named_state("custom", config.atoms, scheme, read_amplitudes(st_file));
      const auto report = check_pure_stationary(phi, couplings, scheme, st_tol);
      std::cout << "state: " << (st_file.empty() ? st_state : st_file) << "\n"
                << "stationary: " << (report.is_stationary ? "true" : "false") << "\n"
                << "lambda: " << num(report.lambda) << "\n"
                << "q_residual: " << num(report.q_residual) << "\n";
      for (std::size_t l = 0; l < report.jump_residuals.size(); ++l)
        std::cout << "jump_residual_" << scheme.transitions()[l].id << ": " << num(report.jump_residuals[l]) << "\n";
      std::cout << "liouvillian_residual: " << num(report.liouvillian_residual) << "\n";
      return report.is_stationary ? 0 : kPropertyFails;
    }

    if (*prepare) {
      PreparationResult result = [&] {
        if (pr_method == "1") return prepare_dark_method1();
        if (pr_method == "2") return prepare_dark_method2();
        return pr_super ? prepare_superradiant_recursive(pr_atoms) : prepare_dark_recursive(pr_atoms);
      }();
      const int n = result.state.atoms();
      const LevelScheme scheme = LevelScheme::lambda(n);
      // Method 1 is exact only up to local phases; score the phase-corrected output.
      Ket checked = result.state.amplitudes();
      if (pr_method == "1")
        for (int a = 0; a < n; ++a)
          apply_local(checked, n, n, a, Operator(result.phases.site_phases[static_cast<std::size_t>(a)].asDiagonal()));
      double worst_jump = 0.0;
      for (const auto& s : collective_jump_operators(n, scheme)) worst_jump = std::max(worst_jump, (s * checked).norm());
      std::cout << "method: " << pr_method << (pr_super ? " (superradiant)" : "") << "\n"
                << "atoms: " << n << "\n"
                << "overlap: " << num(result.overlap) << "\n"
                << "global_phase: " << num(result.global_phase) << "\n"
                << "max_jump_residual: " << num(worst_jump) << "\n";
      if (pr_method == "1") {
        for (std::size_t s = 0; s < result.phases.site_phases.size(); ++s) {
          std::cout << "local_phase_" << s + 1 << ":";
          for (Eigen::Index l = 0; l < result.phases.site_phases[s].size(); ++l)
            std::cout << " " << num(std::arg(result.phases.site_phases[s](l)));
          std::cout << "\n";
        }
      }
      return 0;
    }

    if (*entangle) {
      const LevelScheme scheme = LevelScheme::lambda(en_atoms);
      const PureState psi = named_state(en_state, en_atoms, scheme);
      const bool dark = en_state == "dark";
      std::stringstream list(en_measures);
      std::string measure;
      std::cout << "state: " << en_state << " N=" << en_atoms << "\n";
      while (std::getline(list, measure, ',')) {
        if (measure == "reductions") {
          for (int a = 0; a < en_atoms; ++a) {
            const auto rho = partial_trace(DensityMatrix(psi), {a});
            const double dev = (rho.matrix() - Operator::Identity(en_atoms, en_atoms) / en_atoms).cwiseAbs().maxCoeff();
            std::cout << "reduction_" << a + 1 << "_deviation_from_identity_over_N: " << num(dev) << "\n";
          }
        } else if (measure == "geometric") {
          GeometricMeasureOptions opt;
          opt.restarts = en_restarts;
          opt.seed = en_seed;
          const auto g = geometric_measure(psi, opt);
          const double ref = dark ? 1.0 - 1.0 / factorial(en_atoms)
                                  : 1.0 - factorial(en_atoms) / std::pow(en_atoms, en_atoms);
          std::cout << "geometric_measure: " << num(g.value) << "\n"
                    << "geometric_measure_reference: " << num(ref) << "\n"
                    << "geometric_measure_converged: " << (g.converged ? "true" : "false") << "\n";
        } else if (measure == "witness") {
          std::cout << "witness: " << num(witness_expectation(DensityMatrix(psi), en_atoms)) << "\n";
          if (dark) std::cout << "witness_reference: " << num(1.0 / factorial(en_atoms) - 1.0) << "\n";
        } else if (measure == "negativity") {
          std::vector<int> lost;
          for (int a : en_lose) lost.push_back(a - 1);
          if (lost.empty()) lost.push_back(en_atoms - 1);
          const auto cert = persistence_under_loss(psi, lost);
          for (const auto& b : cert.bipartitions) {
            std::cout << "negativity";
            for (int a : b.subset) std::cout << "_" << a + 1;
            std::cout << ": " << num(b.negativity) << "\n";
          }
          if (dark && en_atoms == 3 && cert.remaining.size() == 2)
            std::cout << "negativity_reference: " << num(1.0 / 3.0) << "\n";
          std::cout << "entangled_after_loss: " << (cert.entangled ? "true" : "false") << "\n";
        } else if (!measure.empty()) {
          throw InvalidArgument("unknown measure '" + measure + "'");
        }
      }
      return 0;
    }
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return 0;
}
