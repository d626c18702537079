#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace darkstates {

using cplx = std::complex<double>;
using Ket = Eigen::VectorXcd;
using Operator = Eigen::MatrixXcd;
using SparseOperator = Eigen::SparseMatrix<cplx>;

// ---------------------------------------------------------------------------
// Level structure of a single atom

enum class SchemeKind { Lambda, V, Generic };

/// One radiative transition `upper -> lower`, labelled by a distinct id.
struct Transition {
  int upper;
  int lower;
  int id;
};

/// Per-atom level structure.
///
/// Lambda with d levels: level 0 is |e>, levels 1..d-1 are |g_1>..|g_{d-1}>,
/// transition j connects e -> g_j.  V with d levels: level 0 is |g>,
/// levels 1..d-1 are |e_1>..|e_{d-1}>, transition j connects e_j -> g.
class LevelScheme {
 public:
  static LevelScheme lambda(int levels);
  static LevelScheme v(int levels);
  static LevelScheme generic(int levels, std::vector<int> excited, std::vector<Transition> transitions,
                             std::vector<std::string> labels = {});

  SchemeKind kind() const { return kind_; }
  int levels() const { return levels_; }
  const std::vector<int>& excited() const { return excited_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<std::string>& labels() const { return labels_; }

  bool is_excited(int level) const;
  /// Levels that carry no excitation, in increasing order.
  std::vector<int> ground_levels() const;
  /// Position of transition `id` in transitions(); throws InvalidArgument if unknown.
  std::size_t transition_index(int id) const;

 private:
  LevelScheme(SchemeKind kind, int levels, std::vector<int> excited, std::vector<Transition> transitions,
              std::vector<std::string> labels);

  SchemeKind kind_;
  int levels_;
  std::vector<int> excited_;
  std::vector<Transition> transitions_;
  std::vector<std::string> labels_;
};

// ---------------------------------------------------------------------------
// Register bookkeeping.  Basis kets of M atoms with d levels are ordered
// lexicographically, atom 0 being the most significant digit.

/// d^M, throwing InvalidArgument on overflow or nonpositive arguments.
std::size_t register_dimension(int atoms, int levels);

/// Level of `atom` in basis ket `index`.
inline int digit_of(std::size_t index, int atom, int atoms, int levels) {
  for (int a = atoms - 1; a > atom; --a) index /= static_cast<std::size_t>(levels);
  return static_cast<int>(index % static_cast<std::size_t>(levels));
}

std::vector<int> digits_of(std::size_t index, int atoms, int levels);
std::size_t index_of(std::span<const int> digits, int levels);
/// Stride of `atom`'s digit: d^(M-1-atom).
std::size_t atom_stride(int atom, int atoms, int levels);

/// Kronecker product of two dense expressions.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(const Eigen::MatrixBase<DerivedA>& a,
                                                                              const Eigen::MatrixBase<DerivedB>& b) {
  Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                                              a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Applies a d x d operator to one atom of a register vector, in place.
template <typename DerivedVec, typename DerivedOp>
void apply_local(Eigen::MatrixBase<DerivedVec>& vec, int atoms, int levels, int atom,
                 const Eigen::MatrixBase<DerivedOp>& op) {
  using Scalar = typename DerivedVec::Scalar;
  const std::size_t stride = atom_stride(atom, atoms, levels);
  const std::size_t block = stride * static_cast<std::size_t>(levels);
  const std::size_t dim = register_dimension(atoms, levels);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> local(levels);
  for (std::size_t outer = 0; outer < dim; outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      const std::size_t base = outer + inner;
      for (int s = 0; s < levels; ++s) local(s) = vec(static_cast<Eigen::Index>(base + s * stride));
      local = (op * local).eval();
      for (int s = 0; s < levels; ++s) vec(static_cast<Eigen::Index>(base + s * stride)) = local(s);
    }
  }
}

/// Sparse embedding of the single-atom operator |to><from| on `atom`.
SparseOperator local_transition(int atoms, int levels, int atom, int from, int to);

// ---------------------------------------------------------------------------
// States

/// Normalized pure state of `atoms` atoms with `levels` levels each.
class PureState {
 public:
  /// Normalizes `amplitudes`; throws InvalidArgument on size mismatch or zero vector.
  PureState(int atoms, int levels, Ket amplitudes);

  /// Product basis ket |s_1 ... s_M>.
  static PureState basis(int levels, std::span<const int> config);
  static PureState basis(int levels, std::initializer_list<int> config) {
    std::vector<int> v(config);
    return basis(levels, std::span<const int>(v));
  }

  int atoms() const { return atoms_; }
  int levels() const { return levels_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  const Ket& amplitudes() const { return amplitudes_; }
  cplx operator[](Eigen::Index i) const { return amplitudes_(i); }
  cplx amplitude(std::span<const int> config) const;
  cplx amplitude(std::initializer_list<int> config) const {
    std::vector<int> v(config);
    return amplitude(std::span<const int>(v));
  }

 private:
  int atoms_;
  int levels_;
  Ket amplitudes_;
};

/// <a|b>.
cplx overlap(const PureState& a, const PureState& b);

/// Density matrix over the register.  Construction checks shape only; use
/// validate() to enforce Hermiticity, unit trace and positivity.
class DensityMatrix {
 public:
  DensityMatrix(int atoms, int levels, Operator matrix);
  explicit DensityMatrix(const PureState& psi);

  static DensityMatrix maximally_mixed(int atoms, int levels);

  int atoms() const { return atoms_; }
  int levels() const { return levels_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  const Operator& matrix() const { return matrix_; }

  double hermiticity_residual() const;
  cplx trace() const { return matrix_.trace(); }
  double purity() const;
  double min_eigenvalue() const;

  /// Throws PhysicsError if any invariant is violated beyond the given tolerances.
  void validate(double hermitian_tol = 1e-10, double trace_tol = 1e-10, double eigen_tol = 1e-8) const;

 private:
  int atoms_;
  int levels_;
  Operator matrix_;
};

}  // namespace darkstates
