#include "darkstates/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "darkstates/errors.hpp"

namespace darkstates {

LevelScheme::LevelScheme(SchemeKind kind, int levels, std::vector<int> excited, std::vector<Transition> transitions,
                         std::vector<std::string> labels)
    : kind_(kind),
      levels_(levels),
      excited_(std::move(excited)),
      transitions_(std::move(transitions)),
      labels_(std::move(labels)) {
  if (levels_ < 2) throw InvalidArgument("level scheme needs at least 2 levels");
  std::sort(excited_.begin(), excited_.end());
  if (std::adjacent_find(excited_.begin(), excited_.end()) != excited_.end())
    throw InvalidArgument("duplicate excited level");
  for (int e : excited_)
    if (e < 0 || e >= levels_) throw InvalidArgument("excited level out of range");
  if (excited_.empty() || static_cast<int>(excited_.size()) == levels_)
    throw InvalidArgument("scheme needs at least one excited and one non-excited level");

  std::set<int> ids;
  for (const auto& t : transitions_) {
    if (t.upper < 0 || t.upper >= levels_ || t.lower < 0 || t.lower >= levels_)
      throw InvalidArgument("transition level out of range");
    if (!is_excited(t.upper) || is_excited(t.lower))
      throw InvalidArgument("transition " + std::to_string(t.id) + " must connect an excited to a non-excited level");
    if (!ids.insert(t.id).second) throw InvalidArgument("duplicate transition id " + std::to_string(t.id));
  }
  if (transitions_.empty()) throw InvalidArgument("scheme has no transitions");

  if (labels_.empty()) {
    for (int l = 0; l < levels_; ++l) labels_.push_back(std::to_string(l));
  } else if (static_cast<int>(labels_.size()) != levels_) {
    throw InvalidArgument("label count does not match level count");
  }
}

LevelScheme LevelScheme::lambda(int levels) {
  if (levels < 2) throw InvalidArgument("Lambda scheme needs at least 2 levels");
  std::vector<Transition> transitions;
  std::vector<std::string> labels{"e"};
  for (int j = 1; j < levels; ++j) {
    transitions.push_back({0, j, j});
    labels.push_back("g_" + std::to_string(j));
  }
  return LevelScheme(SchemeKind::Lambda, levels, {0}, std::move(transitions), std::move(labels));
}

LevelScheme LevelScheme::v(int levels) {
  if (levels < 2) throw InvalidArgument("V scheme needs at least 2 levels");
  std::vector<Transition> transitions;
  std::vector<int> excited;
  std::vector<std::string> labels{"g"};
  for (int j = 1; j < levels; ++j) {
    transitions.push_back({j, 0, j});
    excited.push_back(j);
    labels.push_back("e_" + std::to_string(j));
  }
  return LevelScheme(SchemeKind::V, levels, std::move(excited), std::move(transitions), std::move(labels));
}

LevelScheme LevelScheme::generic(int levels, std::vector<int> excited, std::vector<Transition> transitions,
                                 std::vector<std::string> labels) {
  return LevelScheme(SchemeKind::Generic, levels, std::move(excited), std::move(transitions), std::move(labels));
}

bool LevelScheme::is_excited(int level) const {
  return std::binary_search(excited_.begin(), excited_.end(), level);
}

std::vector<int> LevelScheme::ground_levels() const {
  std::vector<int> out;
  for (int l = 0; l < levels_; ++l)
    if (!is_excited(l)) out.push_back(l);
  return out;
}

std::size_t LevelScheme::transition_index(int id) const {
  for (std::size_t k = 0; k < transitions_.size(); ++k)
    if (transitions_[k].id == id) return k;
  throw InvalidArgument("unknown transition id " + std::to_string(id));
}

// ---------------------------------------------------------------------------

std::size_t register_dimension(int atoms, int levels) {
  if (atoms < 1 || levels < 1) throw InvalidArgument("register needs positive atom and level counts");
  std::size_t dim = 1;
  for (int a = 0; a < atoms; ++a) {
    if (dim > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(levels))
      throw InvalidArgument("register dimension overflows");
    dim *= static_cast<std::size_t>(levels);
  }
  return dim;
}

std::vector<int> digits_of(std::size_t index, int atoms, int levels) {
  std::vector<int> out(static_cast<std::size_t>(atoms));
  for (int a = atoms - 1; a >= 0; --a) {
    out[static_cast<std::size_t>(a)] = static_cast<int>(index % static_cast<std::size_t>(levels));
    index /= static_cast<std::size_t>(levels);
  }
  return out;
}

std::size_t index_of(std::span<const int> digits, int levels) {
  std::size_t index = 0;
  for (int s : digits) {
    if (s < 0 || s >= levels) throw InvalidArgument("level " + std::to_string(s) + " out of range");
    index = index * static_cast<std::size_t>(levels) + static_cast<std::size_t>(s);
  }
  return index;
}

std::size_t atom_stride(int atom, int atoms, int levels) {
  if (atom < 0 || atom >= atoms) throw InvalidArgument("atom index " + std::to_string(atom) + " out of range");
  std::size_t stride = 1;
  for (int a = atom + 1; a < atoms; ++a) stride *= static_cast<std::size_t>(levels);
  return stride;
}

SparseOperator local_transition(int atoms, int levels, int atom, int from, int to) {
  if (from < 0 || from >= levels || to < 0 || to >= levels) throw InvalidArgument("level out of range");
  const std::size_t dim = register_dimension(atoms, levels);
  const std::size_t stride = atom_stride(atom, atoms, levels);
  std::vector<Eigen::Triplet<cplx>> entries;
  entries.reserve(dim / static_cast<std::size_t>(levels));
  for (std::size_t i = 0; i < dim; ++i) {
    const int s = static_cast<int>((i / stride) % static_cast<std::size_t>(levels));
    if (s != from) continue;
    const std::size_t row = i + static_cast<std::size_t>(to) * stride - static_cast<std::size_t>(from) * stride;
    entries.emplace_back(static_cast<int>(row), static_cast<int>(i), cplx(1.0, 0.0));
  }
  SparseOperator op(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

// ---------------------------------------------------------------------------

PureState::PureState(int atoms, int levels, Ket amplitudes)
    : atoms_(atoms), levels_(levels), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != register_dimension(atoms, levels))
    throw InvalidArgument("amplitude vector has length " + std::to_string(amplitudes_.size()) + ", expected d^M");
  const double norm = amplitudes_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidArgument("state vector has zero or non-finite norm");
  amplitudes_ /= norm;
}

PureState PureState::basis(int levels, std::span<const int> config) {
  const int atoms = static_cast<int>(config.size());
  Ket v = Ket::Zero(static_cast<Eigen::Index>(register_dimension(atoms, levels)));
  v(static_cast<Eigen::Index>(index_of(config, levels))) = 1.0;
  return PureState(atoms, levels, std::move(v));
}

cplx PureState::amplitude(std::span<const int> config) const {
  if (static_cast<int>(config.size()) != atoms_) throw InvalidArgument("configuration length differs from atom count");
  return amplitudes_(static_cast<Eigen::Index>(index_of(config, levels_)));
}

cplx overlap(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("overlap of states with different dimension");
  return a.amplitudes().dot(b.amplitudes());
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(int atoms, int levels, Operator matrix)
    : atoms_(atoms), levels_(levels), matrix_(std::move(matrix)) {
  const auto dim = static_cast<Eigen::Index>(register_dimension(atoms, levels));
  if (matrix_.rows() != dim || matrix_.cols() != dim) throw InvalidArgument("density matrix must be d^M x d^M");
}

DensityMatrix::DensityMatrix(const PureState& psi)
    : DensityMatrix(psi.atoms(), psi.levels(), psi.amplitudes() * psi.amplitudes().adjoint()) {}

DensityMatrix DensityMatrix::maximally_mixed(int atoms, int levels) {
  const auto dim = static_cast<Eigen::Index>(register_dimension(atoms, levels));
  return DensityMatrix(atoms, levels, Operator::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::hermiticity_residual() const { return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::purity() const { return matrix_.cwiseProduct(matrix_.transpose()).sum().real(); }

double DensityMatrix::min_eigenvalue() const {
  const Operator h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double hermitian_tol, double trace_tol, double eigen_tol) const {
  const double herm = hermiticity_residual();
  if (herm > hermitian_tol) throw PhysicsError("density matrix not Hermitian (residual " + std::to_string(herm) + ")");
  if (std::abs(trace() - cplx(1.0, 0.0)) > trace_tol)
    throw PhysicsError("density matrix trace deviates from 1 by " + std::to_string(std::abs(trace() - 1.0)));
  const double lo = min_eigenvalue();
  if (lo < -eigen_tol) throw PhysicsError("density matrix has negative eigenvalue " + std::to_string(lo));
}

}  // namespace darkstates
