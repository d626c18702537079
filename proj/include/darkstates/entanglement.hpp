#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "darkstates/basis.hpp"

namespace darkstates {

/// Product state |a_1, ..., a_M> and its squared overlap with the target.
struct ProductAnsatz {
  std::vector<Ket> sites;
  double overlap = 0.0;  ///< |<a_1 ... a_M|psi>|^2
};

struct GeometricMeasureOptions {
  int restarts = 20;
  int max_iterations = 500;
  double iter_tol = 1e-12;
  std::uint64_t seed = 20160901;
};

struct GeometricMeasure {
  double value = 1.0;  ///< E_g = 1 - max overlap
  ProductAnsatz maximizer;
  bool converged = false;  ///< false if the best restart hit the iteration cap
};

/// Geometric measure of entanglement by alternating single-site updates from
/// random product starts.  Deterministic for a fixed seed.
GeometricMeasure geometric_measure(const PureState& psi, const GeometricMeasureOptions& options = {});

/// |<a_1 ... a_M|psi>|^2 for a given product state.
double product_overlap(const PureState& psi, std::span<const Ket> sites);

/// tr(W rho) for W = (1/N!) 1 - |psi_d^N><psi_d^N|; rho must be N atoms with N levels.
double witness_expectation(const DensityMatrix& rho, int n);

/// rho^{T_A}: transpose on the atoms in `subset`.
Operator partial_transpose(const DensityMatrix& rho, std::span<const int> subset);

/// Sum of |negative eigenvalues| of the partial transpose across `subset` | rest.
/// (This is not the log-negativity.)
double negativity(const DensityMatrix& rho, std::span<const int> subset);
inline double negativity(const DensityMatrix& rho, std::initializer_list<int> subset) {
  std::vector<int> v(subset);
  return negativity(rho, std::span<const int>(v));
}

struct GlInvariance {
  bool proportional = false;
  cplx factor;           ///< (S^{(x)N} psi)_k / psi_k at the largest-magnitude amplitude k
  double residual = 0.0; ///< distance between psi and the rescaled image, after phase fitting
};

/// Tests psi ~ S^{(x)N} psi.  Throws InvalidArgument if S is singular (condition >= 1e8).
GlInvariance gl_invariance_check(const PureState& psi, const Eigen::MatrixXcd& s, double threshold = 1e-9);

/// Applies the same single-site operator to every atom.
Ket apply_product_operator(const PureState& psi, const Eigen::MatrixXcd& s);

struct BipartitionNegativity {
  std::vector<int> subset;  ///< atoms (0-based, original numbering) on one side
  double negativity;
};

struct LossCertificate {
  std::vector<int> remaining;  ///< surviving atoms, original numbering
  std::vector<BipartitionNegativity> bipartitions;
  bool entangled = false;
};

/// Traces out `lost` and evaluates the negativity across every bipartition of the rest.
LossCertificate persistence_under_loss(const PureState& psi, std::span<const int> lost);

}  // namespace darkstates
