#include "darkstates/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "darkstates/errors.hpp"
#include "darkstates/states.hpp"

namespace darkstates {

namespace {

constexpr double kUnitarityTol = 1e-12;
constexpr double kOverlapTol = 1e-9;

Operator shift_matrix(int levels) {
  Operator x = Operator::Zero(levels, levels);
  for (int i = 0; i < levels; ++i) x((i + 1) % levels, i) = 1.0;
  return x;
}

double wrap_angle(double x) {
  x = std::remainder(x, 2.0 * std::numbers::pi);
  return x;
}

PreparationResult finish(PureState output, const PureState& target, const char* what) {
  const cplx ov = overlap(target, output);
  const double mod = std::abs(ov);
  if (mod < 1.0 - kOverlapTol)
    throw ProtocolRegression(std::string(what) + ": overlap with target is " + std::to_string(mod));
  PreparationResult r{std::move(output), mod, ov / mod, {}};
  return r;
}

PreparationResult recursive(int n, bool dark) {
  if (n < 3) throw InvalidArgument("recursive preparation needs N >= 3");
  PureState prev = n == 3 ? prepare_two_atom_singlet(2, dark ? -1.0 : 1.0) : recursive(n - 1, dark).state;
  prev = embed_levels(prev, n);

  Ket last(n);
  for (int i = 0; i < n; ++i) {
    const int parity = ((n - 1) * (1 + i)) % 2;
    last(i) = (dark && parity == 1) ? -1.0 : 1.0;
  }
  const PureState input = tensor_product(prev, PureState(1, n, last));

  Circuit circuit(n, n);
  for (int j = 0; j < n - 1; ++j) circuit.add(controlled_shift(n, n - 1, j));
  const PureState target = dark ? antisymmetric_dark_state(n) : symmetric_superradiant_state(n);
  return finish(circuit.run(input), target, dark ? "recursive dark preparation" : "recursive superradiant preparation");
}

}  // namespace

// ---------------------------------------------------------------------------

Gate::Gate(std::vector<int> targets, Operator unitary, int levels, std::string label)
    : targets_(std::move(targets)), unitary_(std::move(unitary)), levels_(levels), label_(std::move(label)) {
  if (targets_.empty()) throw InvalidArgument("gate needs at least one target");
  const auto dim = static_cast<Eigen::Index>(register_dimension(static_cast<int>(targets_.size()), levels_));
  if (unitary_.rows() != dim || unitary_.cols() != dim)
    throw InvalidArgument("gate matrix must be d^k x d^k for k targets");
  if (unitarity_residual() > kUnitarityTol) throw InvalidArgument("gate '" + label_ + "' is not unitary");
}

double Gate::unitarity_residual() const {
  return (unitary_.adjoint() * unitary_ - Operator::Identity(unitary_.rows(), unitary_.cols())).cwiseAbs().maxCoeff();
}

Circuit& Circuit::add(Gate gate) {
  if (gate.levels() != levels_) throw InvalidArgument("gate level count differs from register");
  auto sorted = gate.targets();
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidArgument("gate targets repeat an atom");
  if (sorted.front() < 0 || sorted.back() >= atoms_) throw InvalidArgument("gate target out of range");
  gates_.push_back(std::move(gate));
  return *this;
}

Ket Circuit::run(const Ket& input) const {
  Ket v = input;
  for (const auto& g : gates_) apply_gate(v, atoms_, levels_, g);
  return v;
}

PureState Circuit::run(const PureState& input) const {
  if (input.atoms() != atoms_ || input.levels() != levels_) throw InvalidArgument("circuit/register size mismatch");
  return PureState(atoms_, levels_, run(input.amplitudes()));
}

void apply_gate(Ket& state, int atoms, int levels, const Gate& gate) {
  const auto& targets = gate.targets();
  const int k = static_cast<int>(targets.size());
  const std::size_t dim = register_dimension(atoms, levels);
  if (static_cast<std::size_t>(state.size()) != dim) throw InvalidArgument("apply_gate: state size mismatch");

  const std::size_t sub = register_dimension(k, levels);
  std::vector<std::size_t> offset(sub, 0);
  for (std::size_t m = 0; m < sub; ++m) {
    std::size_t rem = m;
    for (int t = k - 1; t >= 0; --t) {
      offset[m] += (rem % static_cast<std::size_t>(levels)) * atom_stride(targets[static_cast<std::size_t>(t)], atoms, levels);
      rem /= static_cast<std::size_t>(levels);
    }
  }
  Ket local(static_cast<Eigen::Index>(sub));
  for (std::size_t base = 0; base < dim; ++base) {
    bool zero_targets = true;
    for (int t : targets)
      if (digit_of(base, t, atoms, levels) != 0) {
        zero_targets = false;
        break;
      }
    if (!zero_targets) continue;
    for (std::size_t m = 0; m < sub; ++m) local(static_cast<Eigen::Index>(m)) = state(static_cast<Eigen::Index>(base + offset[m]));
    local = (gate.unitary() * local).eval();
    for (std::size_t m = 0; m < sub; ++m) state(static_cast<Eigen::Index>(base + offset[m])) = local(static_cast<Eigen::Index>(m));
  }
}

Gate cyclic_shift(int levels, int target) {
  if (levels < 2) throw InvalidArgument("cyclic_shift needs d >= 2");
  return Gate({target}, shift_matrix(levels), levels, "X");
}

Gate controlled_shift(int levels, int control, int target) {
  if (levels < 2) throw InvalidArgument("controlled_shift needs d >= 2");
  const Operator x = shift_matrix(levels);
  Operator u = Operator::Zero(levels * levels, levels * levels);
  Operator power = x;
  for (int i = 0; i < levels; ++i) {
    u.block(i * levels, i * levels, levels, levels) = power;  // |i><i| (x) X^{i+1}
    power = (power * x).eval();
  }
  return Gate({control, target}, std::move(u), levels, "CX^(i+1)");
}

Gate embedded_cnot(int levels, int control, int target) {
  if (levels < 2) throw InvalidArgument("embedded_cnot needs d >= 2");
  Operator u = Operator::Identity(levels * levels, levels * levels);
  const int base = 1 * levels;
  u(base + 0, base + 0) = 0.0;
  u(base + 1, base + 1) = 0.0;
  u(base + 0, base + 1) = 1.0;
  u(base + 1, base + 0) = 1.0;
  return Gate({control, target}, std::move(u), levels, "CNOT");
}

Gate three_qutrit_exponential(double theta) {
  const Operator x = shift_matrix(3);
  const Operator xxx = kron(kron(x, x), x);
  const Operator generator = xxx + xxx.adjoint();
  Eigen::SelfAdjointEigenSolver<Operator> es(generator);
  Ket phases(es.eigenvalues().size());
  for (Eigen::Index n = 0; n < phases.size(); ++n) phases(n) = std::exp(cplx(0.0, -theta * es.eigenvalues()(n)));
  Operator u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return Gate({0, 1, 2}, std::move(u), 3, "exp(-i theta (XXX + h.c.))");
}

PureState prepare_two_atom_singlet(int levels, double sign) {
  Ket first = Ket::Zero(levels);
  first(0) = 1.0;
  first(1) = sign;
  const PureState input = tensor_product(PureState(1, levels, first), PureState::basis(levels, {1}));
  Circuit c(2, levels);
  c.add(embedded_cnot(levels, 0, 1));
  return c.run(input);
}

// ---------------------------------------------------------------------------

LocalPhaseEquivalence equal_up_to_local_phases(const PureState& a, const PureState& b, double tol) {
  if (a.atoms() != b.atoms() || a.levels() != b.levels())
    throw InvalidArgument("equal_up_to_local_phases: registers differ");
  const int atoms = a.atoms();
  const int levels = a.levels();
  LocalPhaseEquivalence out;
  out.site_phases.assign(static_cast<std::size_t>(atoms), Ket::Ones(levels));

  const Ket& va = a.amplitudes();
  const Ket& vb = b.amplitudes();
  out.residual = (va.cwiseAbs() - vb.cwiseAbs()).cwiseAbs().maxCoeff();
  if (out.residual > tol) return out;

  // Unknown angles: x_{site, level} at site*levels + level, then the global phase.
  const int unknowns = atoms * levels + 1;
  const double support_floor = 1e-8 * va.cwiseAbs().maxCoeff();
  std::vector<std::vector<std::int64_t>> rows;
  std::vector<double> rhs;
  for (Eigen::Index n = 0; n < va.size(); ++n) {
    if (std::abs(va(n)) <= support_floor) continue;
    std::vector<std::int64_t> row(static_cast<std::size_t>(unknowns), 0);
    const auto digits = digits_of(static_cast<std::size_t>(n), atoms, levels);
    for (int s = 0; s < atoms; ++s) row[static_cast<std::size_t>(s * levels + digits[static_cast<std::size_t>(s)])] = 1;
    row.back() = 1;
    rows.push_back(std::move(row));
    rhs.push_back(std::arg(vb(n) / va(n)));
  }

  // Row echelon form over the integers; right-hand sides live modulo 2 pi.
  const std::size_t m = rows.size();
  std::vector<int> pivot_col;
  std::size_t rank = 0;
  for (int c = 0; c < unknowns && rank < m; ++c) {
    while (true) {
      std::size_t best = m;
      for (std::size_t r = rank; r < m; ++r)
        if (rows[r][static_cast<std::size_t>(c)] != 0 &&
            (best == m || std::llabs(rows[r][static_cast<std::size_t>(c)]) < std::llabs(rows[best][static_cast<std::size_t>(c)])))
          best = r;
      if (best == m) break;
      std::swap(rows[rank], rows[best]);
      std::swap(rhs[rank], rhs[best]);
      bool cleared = true;
      for (std::size_t r = rank + 1; r < m; ++r) {
        const std::int64_t q = rows[r][static_cast<std::size_t>(c)] / rows[rank][static_cast<std::size_t>(c)];
        if (q != 0) {
          for (int j = 0; j < unknowns; ++j) rows[r][static_cast<std::size_t>(j)] -= q * rows[rank][static_cast<std::size_t>(j)];
          rhs[r] = wrap_angle(rhs[r] - static_cast<double>(q) * rhs[rank]);
        }
        if (rows[r][static_cast<std::size_t>(c)] != 0) cleared = false;
      }
      if (cleared) {
        pivot_col.push_back(c);
        ++rank;
        break;
      }
    }
  }
  for (std::size_t r = rank; r < m; ++r)
    if (std::abs(wrap_angle(rhs[r])) > 1e-7) return out;  // inconsistent phase cycle

  std::vector<double> x(static_cast<std::size_t>(unknowns), 0.0);
  for (std::size_t r = rank; r-- > 0;) {
    const auto c = static_cast<std::size_t>(pivot_col[r]);
    double acc = rhs[r];
    for (std::size_t j = c + 1; j < static_cast<std::size_t>(unknowns); ++j)
      acc -= static_cast<double>(rows[r][j]) * x[j];
    x[c] = acc / static_cast<double>(rows[r][c]);
  }

  Ket mapped = va;
  for (int s = 0; s < atoms; ++s) {
    for (int l = 0; l < levels; ++l)
      out.site_phases[static_cast<std::size_t>(s)](l) = std::polar(1.0, x[static_cast<std::size_t>(s * levels + l)]);
    apply_local(mapped, atoms, levels, s, out.site_phases[static_cast<std::size_t>(s)].asDiagonal().toDenseMatrix());
  }
  out.global_phase = std::polar(1.0, x.back());
  out.residual = (vb - out.global_phase * mapped).norm();
  out.equivalent = out.residual <= tol;
  return out;
}

PreparationResult prepare_dark_method1() {
  const PureState input = tensor_product(prepare_two_atom_singlet(3, -1.0), PureState::basis(3, {2}));
  Circuit circuit(3, 3);
  circuit.add(three_qutrit_exponential(2.0 * std::numbers::pi / 9.0));
  PureState output = circuit.run(input);

  const PureState target = antisymmetric_dark_state(3);
  auto phases = equal_up_to_local_phases(output, target);
  if (!phases.equivalent)
    throw ProtocolRegression("method 1 output is not local-phase equivalent to psi_d^3 (residual " +
                             std::to_string(phases.residual) + ")");
  Ket corrected = output.amplitudes();
  for (int s = 0; s < 3; ++s)
    apply_local(corrected, 3, 3, s, phases.site_phases[static_cast<std::size_t>(s)].asDiagonal().toDenseMatrix());
  const cplx ov = target.amplitudes().dot(corrected);
  const double mod = std::abs(ov);
  if (mod < 1.0 - kOverlapTol)
    throw ProtocolRegression("method 1 overlap after phase recovery is " + std::to_string(mod));
  return {std::move(output), mod, ov / mod, std::move(phases)};
}

PreparationResult prepare_dark_method2() {
  Ket plus = Ket::Ones(3) / std::sqrt(3.0);
  const PureState input = tensor_product(prepare_two_atom_singlet(3, -1.0), PureState(1, 3, plus));
  Circuit circuit(3, 3);
  circuit.add(controlled_shift(3, 2, 0)).add(controlled_shift(3, 2, 1));
  return finish(circuit.run(input), antisymmetric_dark_state(3), "method 2");
}

PreparationResult prepare_dark_recursive(int n) { return recursive(n, true); }

PreparationResult prepare_superradiant_recursive(int n) { return recursive(n, false); }

}  // namespace darkstates
