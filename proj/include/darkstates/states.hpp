#pragma once

#include <span>
#include <vector>

#include "darkstates/basis.hpp"

namespace darkstates {

/// Totally antisymmetric N-atom, N-level state
///   (1/sqrt(N!)) sum_pi sgn(pi) |s_pi(1) ... s_pi(N)>
/// with s_0 = e, s_i = g_i.  Throws InvalidArgument for N < 2.
PureState antisymmetric_dark_state(int n);

/// Same support as antisymmetric_dark_state() with every sign positive.
PureState symmetric_superradiant_state(int n);

/// Antisymmetrized state over the V basis {g, e_1, ..., e_{N-1}}.  With the
/// V level order it has the same amplitudes as antisymmetric_dark_state(n),
/// but stores N-1 excitations instead of one.
PureState v_system_dark_state(int n);

/// (|a b> + sign |b a>)/sqrt(2) on a two-atom register with `levels` levels.
PureState pair_state(int levels, int a, int b, double sign);

/// a (x) b, atoms of `a` first.  Throws InvalidArgument if level counts differ.
PureState tensor_product(const PureState& a, const PureState& b);

/// A block of a composite state: `state` placed on `atoms` (0-based, in the
/// order the block's own atoms are numbered).
struct Block {
  std::vector<int> atoms;
  PureState state;
};

/// One tensor-product term of a composite state.  Its blocks must partition
/// the register.
struct CompositeTerm {
  cplx weight;
  std::vector<Block> blocks;
};

struct CompositeState {
  PureState state;
  /// Factor applied to the raw weighted sum to reach unit norm.
  double normalization;
};

/// Weighted superposition of tensor products of block states, renormalized.
///
/// Blocks are expected to be dark states of their sub-registers or
/// single-atom ground kets; this is not checked here.
CompositeState composite_dark_state(int atoms, std::span<const CompositeTerm> terms);

/// Reduced density matrix on the atoms in `keep` (0-based; kept atoms appear
/// in increasing order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  std::vector<int> v(keep);
  return partial_trace(rho, std::span<const int>(v));
}

/// Pads every atom of `psi` from psi.levels() to `levels` levels (new levels unpopulated).
PureState embed_levels(const PureState& psi, int levels);

}  // namespace darkstates
