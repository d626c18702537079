#include "darkstates/dynamics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "darkstates/dormand_prince.hpp"
#include "darkstates/errors.hpp"

namespace darkstates {

namespace {

const cplx kI(0.0, 1.0);

void check_compatible(const CouplingSet& couplings, const LevelScheme& scheme) {
  if (couplings.transition_count() != scheme.transitions().size())
    throw InvalidArgument("coupling set has " + std::to_string(couplings.transition_count()) +
                          " transitions but the level scheme has " + std::to_string(scheme.transitions().size()));
}

SparseOperator lowering(int atoms, const LevelScheme& scheme, int atom, const Transition& t) {
  return local_transition(atoms, scheme.levels(), atom, t.upper, t.lower);
}

SparseOperator raising(int atoms, const LevelScheme& scheme, int atom, const Transition& t) {
  return local_transition(atoms, scheme.levels(), atom, t.lower, t.upper);
}

}  // namespace

std::vector<SparseOperator> collective_jump_operators(int atoms, const LevelScheme& scheme) {
  const auto dim = static_cast<Eigen::Index>(register_dimension(atoms, scheme.levels()));
  std::vector<SparseOperator> out;
  for (const auto& t : scheme.transitions()) {
    SparseOperator s(dim, dim);
    for (int i = 0; i < atoms; ++i) s += lowering(atoms, scheme, i, t);
    s.makeCompressed();
    out.push_back(std::move(s));
  }
  return out;
}

SparseOperator build_hamiltonian(const CouplingSet& couplings, const LevelScheme& scheme) {
  check_compatible(couplings, scheme);
  const int atoms = couplings.atoms();
  const auto dim = static_cast<Eigen::Index>(register_dimension(atoms, scheme.levels()));
  SparseOperator h(dim, dim);
  for (std::size_t j = 0; j < scheme.transitions().size(); ++j) {
    const auto& t = scheme.transitions()[j];
    const auto& c = couplings.transition(j);
    std::vector<SparseOperator> down, up;
    for (int i = 0; i < atoms; ++i) {
      down.push_back(lowering(atoms, scheme, i, t));
      up.push_back(raising(atoms, scheme, i, t));
    }
    for (int i = 0; i < atoms; ++i) {
      if (c.omega_bar(i) != 0.0) h += cplx(-c.omega_bar(i), 0.0) * (down[i] * up[i]);
      for (int k = 0; k < atoms; ++k)
        if (k != i && c.omega(i, k) != 0.0) h += cplx(c.omega(i, k), 0.0) * (up[i] * down[k]);
    }
  }
  h.makeCompressed();
  return h;
}

// ---------------------------------------------------------------------------

Liouvillian::Liouvillian(const CouplingSet& couplings, const LevelScheme& scheme)
    : atoms_(couplings.atoms()),
      levels_(scheme.levels()),
      dim_(static_cast<Eigen::Index>(register_dimension(couplings.atoms(), scheme.levels()))),
      hamiltonian_(build_hamiltonian(couplings, scheme)) {
  SparseOperator decay(dim_, dim_);
  for (std::size_t j = 0; j < scheme.transitions().size(); ++j) {
    const auto& t = scheme.transitions()[j];
    const auto& gamma = couplings.transition(j).gamma;
    std::vector<SparseOperator> down;
    for (int i = 0; i < atoms_; ++i) down.push_back(lowering(atoms_, scheme, i, t));
    for (int i = 0; i < atoms_; ++i) {
      SparseOperator fed(dim_, dim_);
      for (int k = 0; k < atoms_; ++k)
        if (gamma(i, k) != 0.0) fed += cplx(gamma(i, k), 0.0) * down[k];
      if (fed.nonZeros() == 0) continue;
      // sum_k Gamma^{ik} s^{i+} s^{k-} = s^{i+} fed_i
      decay += SparseOperator(down[i].adjoint()) * fed;
      lowering_.push_back(down[i]);
      fed_adjoint_.push_back(SparseOperator(fed.adjoint()));
      lowering_.back().makeCompressed();
      fed_adjoint_.back().makeCompressed();
    }
  }
  h_eff_ = hamiltonian_ - cplx(0.0, 0.5) * decay;
  h_eff_.makeCompressed();
}

void Liouvillian::apply(const Operator& rho, Operator& out) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) throw InvalidArgument("liouvillian: density matrix size mismatch");
  // -i H_eff rho + i rho H_eff^dagger, the second term as (H_eff rho^dagger)^dagger
  out.noalias() = -kI * (h_eff_ * rho);
  scratch_.noalias() = h_eff_ * rho.adjoint();
  out += kI * scratch_.adjoint();
  for (std::size_t n = 0; n < lowering_.size(); ++n) {
    scratch_.noalias() = lowering_[n] * rho;
    out.noalias() += scratch_ * fed_adjoint_[n];
  }
}

Operator Liouvillian::apply(const Operator& rho) const {
  Operator out(dim_, dim_);
  apply(rho, out);
  return out;
}

Operator liouvillian_apply(const Operator& rho, const CouplingSet& couplings, const LevelScheme& scheme) {
  return Liouvillian(couplings, scheme).apply(rho);
}

Operator liouvillian_apply(const DensityMatrix& rho, const CouplingSet& couplings, const LevelScheme& scheme) {
  if (rho.atoms() != couplings.atoms() || rho.levels() != scheme.levels())
    throw InvalidArgument("liouvillian: density matrix does not match couplings/scheme");
  return liouvillian_apply(rho.matrix(), couplings, scheme);
}

// ---------------------------------------------------------------------------

ExcitedPopulation excited_population(const Operator& rho, int atoms, const LevelScheme& scheme) {
  const int levels = scheme.levels();
  if (static_cast<std::size_t>(rho.rows()) != register_dimension(atoms, levels))
    throw InvalidArgument("excited_population: dimension mismatch");
  ExcitedPopulation out;
  out.per_atom.assign(static_cast<std::size_t>(atoms), 0.0);
  for (Eigen::Index n = 0; n < rho.rows(); ++n) {
    const double p = rho(n, n).real();
    for (int a = 0; a < atoms; ++a)
      if (scheme.is_excited(digit_of(static_cast<std::size_t>(n), a, atoms, levels)))
        out.per_atom[static_cast<std::size_t>(a)] += p;
  }
  for (double p : out.per_atom) out.total += p;
  return out;
}

std::vector<double> ground_populations(const Operator& rho, int atoms, const LevelScheme& scheme) {
  const int levels = scheme.levels();
  if (static_cast<std::size_t>(rho.rows()) != register_dimension(atoms, levels))
    throw InvalidArgument("ground_populations: dimension mismatch");
  std::vector<double> per_level(static_cast<std::size_t>(levels), 0.0);
  for (Eigen::Index n = 0; n < rho.rows(); ++n) {
    const double p = rho(n, n).real();
    for (int a = 0; a < atoms; ++a)
      per_level[static_cast<std::size_t>(digit_of(static_cast<std::size_t>(n), a, atoms, levels))] += p;
  }
  std::vector<double> out;
  for (int g : scheme.ground_levels()) out.push_back(per_level[static_cast<std::size_t>(g)]);
  return out;
}

double dark_fraction(const Operator& rho, const PureState& reference) {
  if (rho.rows() != reference.dim()) throw InvalidArgument("dark_fraction: dimension mismatch");
  const Ket& v = reference.amplitudes();
  return v.dot(rho * v).real();
}

cplx total_dipole(const DensityMatrix& rho, const LevelScheme& scheme, int transition) {
  const auto& t = scheme.transitions()[scheme.transition_index(transition)];
  if (rho.levels() != scheme.levels()) throw InvalidArgument("total_dipole: level count mismatch");
  cplx acc = 0.0;
  for (int i = 0; i < rho.atoms(); ++i) {
    const SparseOperator s = lowering(rho.atoms(), scheme, i, t);
    // tr(rho s) = sum over nonzeros s(r, c) rho(c, r)
    for (int col = 0; col < s.outerSize(); ++col)
      for (SparseOperator::InnerIterator it(s, col); it; ++it) acc += it.value() * rho.matrix()(col, it.row());
  }
  return acc;
}

Observables observe(const Operator& rho, int atoms, const LevelScheme& scheme, const PureState* reference) {
  Observables o;
  auto excited = excited_population(rho, atoms, scheme);
  o.excited_per_atom = std::move(excited.per_atom);
  o.excited_total = excited.total;
  o.ground_totals = ground_populations(rho, atoms, scheme);
  o.dark_fraction = reference ? dark_fraction(rho, *reference) : std::numeric_limits<double>::quiet_NaN();
  o.trace = rho.trace().real();
  o.purity = rho.cwiseProduct(rho.transpose()).sum().real();
  return o;
}

// ---------------------------------------------------------------------------

std::vector<double> time_grid(double t_max, int samples) {
  if (samples < 2) throw InvalidArgument("time grid needs at least 2 samples");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidArgument("t_max must be positive");
  std::vector<double> out(static_cast<std::size_t>(samples));
  for (int n = 0; n < samples; ++n) out[static_cast<std::size_t>(n)] = t_max * n / (samples - 1);
  return out;
}

namespace {

void check_positive(const Operator& rho, double floor, double t) {
  const auto dim = rho.rows();
  Operator shifted = 0.5 * (rho + rho.adjoint());
  shifted.diagonal().array() += -floor;
  Eigen::LLT<Operator> llt(shifted);
  if (llt.info() == Eigen::Success) return;
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo >= floor) return;
  std::ostringstream msg;
  msg << "positivity violated at t=" << t << ": minimum eigenvalue " << lo << " (dimension " << dim
      << "); check the coupling set or tighten tol";
  throw NumericalFailure(msg.str());
}

}  // namespace

Trajectory evolve(const DensityMatrix& rho0, const CouplingSet& couplings, const LevelScheme& scheme,
                  std::span<const double> times, const EvolveOptions& options) {
  if (!(options.tol >= 1e-12 && options.tol <= 1e-3)) throw InvalidArgument("evolve: tol must lie in [1e-12, 1e-3]");
  if (times.empty()) throw InvalidArgument("evolve: empty time grid");
  if (times.front() < 0.0) throw InvalidArgument("evolve: time grid must start at or after 0");
  for (std::size_t n = 1; n < times.size(); ++n)
    if (!(times[n] > times[n - 1])) throw InvalidArgument("evolve: time grid must be strictly increasing");
  if (rho0.atoms() != couplings.atoms() || rho0.levels() != scheme.levels())
    throw InvalidArgument("evolve: initial state does not match couplings/scheme");
  rho0.validate();
  const PureState* reference = options.reference ? &*options.reference : nullptr;
  if (reference && reference->dim() != rho0.dim()) throw InvalidArgument("evolve: reference state dimension mismatch");

  const Liouvillian generator(couplings, scheme);
  auto rhs = [&generator](const Operator& rho, Operator& drho) { generator.apply(rho, drho); };

  Trajectory traj;
  traj.atoms = rho0.atoms();
  traj.levels = rho0.levels();
  Operator rho = rho0.matrix();
  double t = 0.0;
  DormandPrince<Operator> stepper(options.tol);
  for (double target : times) {
    stepper.integrate(rhs, rho, t, target);
    t = target;
    check_positive(rho, options.positivity_floor, t);
    traj.times.push_back(t);
    traj.observables.push_back(observe(rho, traj.atoms, scheme, reference));
    if (options.keep_states) traj.states.push_back(rho);
  }
  traj.steps = stepper.stats().accepted;
  traj.rejected = stepper.stats().rejected;
  return traj;
}

// ---------------------------------------------------------------------------

StationarityReport check_pure_stationary(const PureState& phi, const CouplingSet& couplings,
                                         const LevelScheme& scheme, double tol) {
  check_compatible(couplings, scheme);
  if (phi.atoms() != couplings.atoms() || phi.levels() != scheme.levels())
    throw InvalidArgument("check_pure_stationary: state does not match couplings/scheme");
  if (!couplings.is_dicke())
    throw UnsupportedRegime(
        "check_pure_stationary needs uniform decay matrices (collective jump regime); "
        "use the Liouvillian residual for general couplings");

  const auto jumps = collective_jump_operators(phi.atoms(), scheme);
  const SparseOperator h = build_hamiltonian(couplings, scheme);
  const Ket& v = phi.amplitudes();

  StationarityReport report;
  Ket q_dag_phi = kI * (h * v);
  for (std::size_t l = 0; l < jumps.size(); ++l) {
    const Ket jumped = jumps[l] * v;
    report.jump_residuals.push_back(jumped.norm());
    const double g = couplings.transition(l).gamma(0, 0);
    q_dag_phi += g * (jumps[l].adjoint() * jumped);
  }
  report.lambda = v.dot(q_dag_phi);
  report.q_residual = (q_dag_phi - report.lambda * v).norm();
  report.liouvillian_residual = liouvillian_apply(DensityMatrix(phi), couplings, scheme).norm();

  bool ok = report.q_residual < tol && std::abs(report.lambda.real()) < tol;
  for (double r : report.jump_residuals) ok = ok && r < tol;
  report.is_stationary = ok;
  return report;
}

DarkSubspace dark_subspace(int atoms, const LevelScheme& scheme, double rank_tol) {
  const int levels = scheme.levels();
  const std::size_t dim = register_dimension(atoms, levels);
  if (dim > 10000) throw InvalidArgument("dark_subspace: d^M = " + std::to_string(dim) + " exceeds 10^4");

  SparseOperator k(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& s : collective_jump_operators(atoms, scheme)) k += SparseOperator(s.adjoint()) * s;
  k.makeCompressed();

  // Group basis kets by their level-occupation numbers.
  std::map<std::vector<int>, std::vector<Eigen::Index>> sectors;
  for (std::size_t n = 0; n < dim; ++n) {
    std::vector<int> counts(static_cast<std::size_t>(levels), 0);
    for (int s : digits_of(n, atoms, levels)) ++counts[static_cast<std::size_t>(s)];
    sectors[counts].push_back(static_cast<Eigen::Index>(n));
  }

  std::vector<Ket> ground, excited;
  std::vector<Eigen::Index> local(dim, -1);
  for (const auto& [counts, members] : sectors) {
    int excitations = 0;
    for (int e : scheme.excited()) excitations += counts[static_cast<std::size_t>(e)];
    if (excitations == 0) {
      for (Eigen::Index n : members) {
        Ket v = Ket::Zero(static_cast<Eigen::Index>(dim));
        v(n) = 1.0;
        ground.push_back(std::move(v));
      }
      continue;
    }
    const auto size = static_cast<Eigen::Index>(members.size());
    for (Eigen::Index m = 0; m < size; ++m) local[static_cast<std::size_t>(members[static_cast<std::size_t>(m)])] = m;
    Operator block = Operator::Zero(size, size);
    for (Eigen::Index m = 0; m < size; ++m)
      for (SparseOperator::InnerIterator it(k, members[static_cast<std::size_t>(m)]); it; ++it) {
        const Eigen::Index row = local[static_cast<std::size_t>(it.row())];
        if (row < 0) throw NumericalFailure("dark_subspace: occupation sectors are not invariant");
        block(row, m) = it.value();
      }
    for (Eigen::Index n : members) local[static_cast<std::size_t>(n)] = -1;

    Eigen::SelfAdjointEigenSolver<Operator> es(block);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (Eigen::Index c = 0; c < size; ++c) {
      if (es.eigenvalues()(c) > rank_tol * scale) continue;
      Ket v = Ket::Zero(static_cast<Eigen::Index>(dim));
      for (Eigen::Index m = 0; m < size; ++m) v(members[static_cast<std::size_t>(m)]) = es.eigenvectors()(m, c);
      excited.push_back(std::move(v));
    }
  }

  DarkSubspace out;
  const auto d = static_cast<Eigen::Index>(dim);
  out.basis.resize(d, static_cast<Eigen::Index>(ground.size() + excited.size()));
  out.excited_basis.resize(d, static_cast<Eigen::Index>(excited.size()));
  Eigen::Index col = 0;
  for (const auto& v : ground) out.basis.col(col++) = v;
  for (std::size_t n = 0; n < excited.size(); ++n) {
    out.basis.col(col++) = excited[n];
    out.excited_basis.col(static_cast<Eigen::Index>(n)) = excited[n];
  }
  return out;
}

}  // namespace darkstates
