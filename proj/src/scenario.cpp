#include "darkstates/scenario.hpp"

#include <cstdio>
#include <ostream>

#include "darkstates/errors.hpp"
#include "darkstates/states.hpp"

namespace darkstates {

namespace {

Eigen::MatrixXd uniform_offdiag(int atoms, double diagonal, double off) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(atoms, atoms, off);
  m.diagonal().setConstant(diagonal);
  return m;
}

// Three-atom chain with nearest-neighbour / next-nearest-neighbour decay couplings.
Eigen::MatrixXd chain3(double nearest, double next) {
  Eigen::MatrixXd m(3, 3);
  m << 1.0, nearest, next,  //
      nearest, 1.0, nearest,  //
      next, nearest, 1.0;
  return m;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig2", "fig3_g1", "fig3_g2", "fig5", "figv"}; }

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig c;
  c.atoms = 3;
  c.levels = 3;
  c.scheme = SchemeKind::Lambda;
  c.t_max = 20.0;
  c.samples = 400;
  c.tol = 1e-8;
  if (name == "fig2") {
    // Sub-wavelength triangle: equal mutual decay 0.95 Gamma on both transitions.
    c.coupling.model = CouplingModel::Explicit;
    c.coupling.gamma_matrices = {uniform_offdiag(3, 1.0, 0.95), uniform_offdiag(3, 1.0, 0.95)};
    c.initial_state = "dark";
  } else if (name == "fig3_g1" || name == "fig3_g2") {
    c.coupling.model = CouplingModel::Dicke;
    c.initial_state = name == "fig3_g1" ? "singlet_g1" : "singlet_g2";
  } else if (name == "fig5") {
    // Stand-in for a ~lambda/4 chain with negative off-diagonal decay rates;
    // not a reproduction of any particular dipole geometry.
    c.coupling.model = CouplingModel::Explicit;
    c.coupling.gamma_matrices = {chain3(-0.5, 0.2), chain3(-0.5, 0.2)};
    c.initial_state = "inverted";
  } else if (name == "figv") {
    c.scheme = SchemeKind::V;
    c.coupling.model = CouplingModel::Dicke;
    c.initial_state = "v_dark";
  } else {
    throw InvalidArgument("unknown preset '" + std::string(name) + "'");
  }
  return c;
}

LevelScheme scheme_of(const ScenarioConfig& config) {
  switch (config.scheme) {
    case SchemeKind::Lambda:
      return LevelScheme::lambda(config.levels);
    case SchemeKind::V:
      return LevelScheme::v(config.levels);
    case SchemeKind::Generic:
      break;
  }
  throw InvalidArgument("scenarios support only lambda and v schemes");
}

CouplingSet couplings_of(const ScenarioConfig& config) {
  const LevelScheme scheme = scheme_of(config);
  const auto& spec = config.coupling;
  CouplingSet set = [&] {
    switch (spec.model) {
      case CouplingModel::Dicke:
        return dicke_couplings(config.atoms, scheme, spec.gamma, spec.omega);
      case CouplingModel::Explicit:
        return explicit_couplings(spec.gamma_matrices, spec.omega_matrices, spec.omega_bar);
      case CouplingModel::ScalarKernel: {
        const std::size_t count = scheme.transitions().size();
        std::vector<double> g = spec.gamma;
        if (g.size() == 1) g.assign(count, g.front());
        return scalar_kernel_couplings(Geometry{spec.positions}, g);
      }
    }
    throw InvalidArgument("unknown coupling model");
  }();
  if (set.atoms() != config.atoms)
    throw InvalidArgument("coupling data describe " + std::to_string(set.atoms()) + " atoms, config has " +
                          std::to_string(config.atoms));
  if (set.transition_count() != scheme.transitions().size())
    throw InvalidArgument("coupling data describe " + std::to_string(set.transition_count()) +
                          " transitions, scheme has " + std::to_string(scheme.transitions().size()));
  return set;
}

PureState named_state(const std::string& name, int atoms, const LevelScheme& scheme,
                      const std::vector<cplx>& amplitudes) {
  const int levels = scheme.levels();
  auto need_square = [&] {
    if (atoms != levels)
      throw InvalidArgument("state '" + name + "' needs as many atoms as levels (" + std::to_string(levels) + ")");
  };
  if (name == "dark") {
    need_square();
    return scheme.kind() == SchemeKind::V ? v_system_dark_state(atoms) : antisymmetric_dark_state(atoms);
  }
  if (name == "superradiant") {
    need_square();
    return symmetric_superradiant_state(atoms);
  }
  if (name == "v_dark") {
    if (scheme.kind() != SchemeKind::V) throw InvalidArgument("state 'v_dark' needs the V scheme");
    need_square();
    return v_system_dark_state(atoms);
  }
  if (name == "inverted" || name == "ground") {
    const int level = name == "inverted" ? scheme.excited().front() : scheme.ground_levels().front();
    return PureState::basis(levels, std::vector<int>(static_cast<std::size_t>(atoms), level));
  }
  if (name == "singlet_g1" || name == "singlet_g2") {
    if (scheme.kind() != SchemeKind::Lambda) throw InvalidArgument("state '" + name + "' needs the Lambda scheme");
    const int spectator = name == "singlet_g1" ? 1 : 2;
    if (atoms < 2 || spectator >= levels) throw InvalidArgument("state '" + name + "' does not fit this register");
    PureState psi = pair_state(levels, 0, 1, -1.0);
    for (int a = 2; a < atoms; ++a) psi = tensor_product(psi, PureState::basis(levels, {spectator}));
    return psi;
  }
  if (name == "custom") {
    Ket v(static_cast<Eigen::Index>(amplitudes.size()));
    for (std::size_t n = 0; n < amplitudes.size(); ++n) v(static_cast<Eigen::Index>(n)) = amplitudes[n];
    return PureState(atoms, levels, std::move(v));
  }
  throw InvalidArgument("unknown state '" + name + "'");
}

PureState initial_state(const ScenarioConfig& config) {
  return named_state(config.initial_state, config.atoms, scheme_of(config), config.amplitudes);
}

std::optional<PureState> dark_reference(int atoms, const LevelScheme& scheme) {
  if (atoms != scheme.levels() || atoms < 2) return std::nullopt;
  if (scheme.kind() == SchemeKind::V) return v_system_dark_state(atoms);
  return antisymmetric_dark_state(atoms);
}

Trajectory run_scenario(const ScenarioConfig& config, bool keep_states) {
  const LevelScheme scheme = scheme_of(config);
  const CouplingSet couplings = couplings_of(config);
  const PureState psi0 = initial_state(config);
  if (psi0.atoms() != config.atoms) throw InvalidArgument("initial state atom count differs from config");
  EvolveOptions options;
  options.tol = config.tol;
  options.reference = dark_reference(config.atoms, scheme);
  options.keep_states = keep_states;
  const auto grid = time_grid(config.t_max, config.samples);
  return evolve(DensityMatrix(psi0), couplings, scheme, grid, options);
}

std::string csv_header(int atoms, const LevelScheme& scheme) {
  std::string h = "time_gamma,pop_e_total";
  for (int a = 1; a <= atoms; ++a) h += ",pop_e_atom_" + std::to_string(a);
  for (int g : scheme.ground_levels()) h += ",pop_g_" + std::to_string(g) + "_total";
  h += ",dark_fraction,trace,purity";
  return h;
}

void write_csv(std::ostream& out, const Trajectory& trajectory, const LevelScheme& scheme) {
  out << csv_header(trajectory.atoms, scheme) << '\n';
  for (std::size_t n = 0; n < trajectory.times.size(); ++n) {
    const auto& o = trajectory.observables[n];
    out << format_number(trajectory.times[n]) << ',' << format_number(o.excited_total);
    for (double p : o.excited_per_atom) out << ',' << format_number(p);
    for (double p : o.ground_totals) out << ',' << format_number(p);
    out << ',' << format_number(o.dark_fraction) << ',' << format_number(o.trace) << ',' << format_number(o.purity)
        << '\n';
  }
}

}  // namespace darkstates
