#include "darkstates/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "darkstates/errors.hpp"

namespace darkstates {

namespace {

int permutation_sign(const std::vector<int>& perm) {
  int inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

PureState permutation_state(int n, bool signed_terms) {
  if (n < 2) throw InvalidArgument("permutation state needs N >= 2 (got " + std::to_string(n) + ")");
  Ket v = Ket::Zero(static_cast<Eigen::Index>(register_dimension(n, n)));
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double count = 0.0;
  do {
    const double sign = signed_terms ? permutation_sign(perm) : 1.0;
    v(static_cast<Eigen::Index>(index_of(perm, n))) = sign;
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  v /= std::sqrt(count);
  return PureState(n, n, std::move(v));
}

}  // namespace

PureState antisymmetric_dark_state(int n) { return permutation_state(n, true); }

PureState symmetric_superradiant_state(int n) { return permutation_state(n, false); }

PureState v_system_dark_state(int n) { return permutation_state(n, true); }

PureState pair_state(int levels, int a, int b, double sign) {
  if (a == b) throw InvalidArgument("pair_state needs two distinct levels");
  Ket v = Ket::Zero(static_cast<Eigen::Index>(levels) * levels);
  const std::vector<int> ab{a, b}, ba{b, a};
  v(static_cast<Eigen::Index>(index_of(ab, levels))) = 1.0;
  v(static_cast<Eigen::Index>(index_of(ba, levels))) = sign;
  return PureState(2, levels, std::move(v));
}

PureState tensor_product(const PureState& a, const PureState& b) {
  if (a.levels() != b.levels())
    throw InvalidArgument("tensor_product of registers with different level counts");
  return PureState(a.atoms() + b.atoms(), a.levels(), kron(a.amplitudes(), b.amplitudes()));
}

CompositeState composite_dark_state(int atoms, std::span<const CompositeTerm> terms) {
  if (terms.empty()) throw InvalidArgument("composite state needs at least one term");
  const int levels = terms.front().blocks.empty() ? 0 : terms.front().blocks.front().state.levels();
  const std::size_t dim = register_dimension(atoms, std::max(levels, 1));

  bool any_weight = false;
  Ket sum = Ket::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& term : terms) {
    std::vector<int> owner(static_cast<std::size_t>(atoms), -1);
    for (std::size_t b = 0; b < term.blocks.size(); ++b) {
      const auto& block = term.blocks[b];
      if (block.state.levels() != levels) throw InvalidArgument("composite blocks differ in level count");
      if (static_cast<int>(block.atoms.size()) != block.state.atoms())
        throw InvalidArgument("block atom list does not match its state's atom count");
      for (int a : block.atoms) {
        if (a < 0 || a >= atoms) throw InvalidArgument("block atom " + std::to_string(a) + " out of range");
        if (owner[static_cast<std::size_t>(a)] != -1)
          throw InvalidArgument("atom " + std::to_string(a) + " appears in two blocks of one term");
        owner[static_cast<std::size_t>(a)] = static_cast<int>(b);
      }
    }
    if (std::find(owner.begin(), owner.end(), -1) != owner.end())
      throw InvalidArgument("blocks of a composite term do not cover every atom");
    if (term.weight == cplx(0.0, 0.0)) continue;
    any_weight = true;

    std::vector<int> local;
    for (std::size_t i = 0; i < dim; ++i) {
      const auto digits = digits_of(i, atoms, levels);
      cplx amp = term.weight;
      for (const auto& block : term.blocks) {
        local.clear();
        for (int a : block.atoms) local.push_back(digits[static_cast<std::size_t>(a)]);
        amp *= block.state.amplitude(local);
        if (amp == cplx(0.0, 0.0)) break;
      }
      sum(static_cast<Eigen::Index>(i)) += amp;
    }
  }
  if (!any_weight) throw InvalidArgument("all composite weights are zero");
  const double norm = sum.norm();
  if (norm < 1e-14) throw InvalidArgument("composite terms cancel to the zero vector");
  return {PureState(atoms, levels, sum), 1.0 / norm};
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep_in) {
  const int atoms = rho.atoms();
  const int levels = rho.levels();
  std::vector<int> keep(keep_in.begin(), keep_in.end());
  std::sort(keep.begin(), keep.end());
  if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw InvalidArgument("partial_trace: duplicate atom in keep set");
  if (keep.front() < 0 || keep.back() >= atoms) throw InvalidArgument("partial_trace: atom index out of range");

  std::vector<int> traced;
  for (int a = 0; a < atoms; ++a)
    if (!std::binary_search(keep.begin(), keep.end(), a)) traced.push_back(a);

  // Offsets of every configuration of the kept / traced atoms in the full index.
  auto offsets = [&](const std::vector<int>& group) {
    const std::size_t n = group.empty() ? 1 : register_dimension(static_cast<int>(group.size()), levels);
    std::vector<std::size_t> out(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t rem = k;
      for (int g = static_cast<int>(group.size()) - 1; g >= 0; --g) {
        const std::size_t s = rem % static_cast<std::size_t>(levels);
        rem /= static_cast<std::size_t>(levels);
        out[k] += s * atom_stride(group[static_cast<std::size_t>(g)], atoms, levels);
      }
    }
    return out;
  };
  const auto keep_off = offsets(keep);
  const auto trace_off = offsets(traced);

  const auto& m = rho.matrix();
  const auto kd = static_cast<Eigen::Index>(keep_off.size());
  Operator out = Operator::Zero(kd, kd);
  for (Eigen::Index r = 0; r < kd; ++r)
    for (Eigen::Index c = 0; c < kd; ++c) {
      cplx acc = 0.0;
      for (std::size_t t : trace_off)
        acc += m(static_cast<Eigen::Index>(keep_off[static_cast<std::size_t>(r)] + t),
                 static_cast<Eigen::Index>(keep_off[static_cast<std::size_t>(c)] + t));
      out(r, c) = acc;
    }
  return DensityMatrix(static_cast<int>(keep.size()), levels, std::move(out));
}

PureState embed_levels(const PureState& psi, int levels) {
  if (levels < psi.levels()) throw InvalidArgument("embed_levels cannot shrink the level count");
  Ket v = Ket::Zero(static_cast<Eigen::Index>(register_dimension(psi.atoms(), levels)));
  for (Eigen::Index i = 0; i < psi.dim(); ++i) {
    const auto digits = digits_of(static_cast<std::size_t>(i), psi.atoms(), psi.levels());
    v(static_cast<Eigen::Index>(index_of(digits, levels))) = psi[i];
  }
  return PureState(psi.atoms(), levels, std::move(v));
}

}  // namespace darkstates
