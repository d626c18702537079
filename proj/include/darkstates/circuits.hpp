#pragma once

#include <string>
#include <vector>

#include "darkstates/basis.hpp"

namespace darkstates {

/// Unitary acting on an ordered list of qudits.
class Gate {
 public:
  /// Throws InvalidArgument unless `unitary` is d^k x d^k and unitary within 1e-12.
  Gate(std::vector<int> targets, Operator unitary, int levels, std::string label = {});

  const std::vector<int>& targets() const { return targets_; }
  const Operator& unitary() const { return unitary_; }
  int levels() const { return levels_; }
  const std::string& label() const { return label_; }

  double unitarity_residual() const;

 private:
  std::vector<int> targets_;
  Operator unitary_;
  int levels_;
  std::string label_;
};

class Circuit {
 public:
  Circuit(int atoms, int levels) : atoms_(atoms), levels_(levels) {}

  /// Throws InvalidArgument on out-of-range or repeated targets, or a level-count mismatch.
  Circuit& add(Gate gate);

  int atoms() const { return atoms_; }
  int levels() const { return levels_; }
  const std::vector<Gate>& gates() const { return gates_; }

  Ket run(const Ket& input) const;
  PureState run(const PureState& input) const;

 private:
  int atoms_;
  int levels_;
  std::vector<Gate> gates_;
};

/// Applies `gate` to a register vector in place.
void apply_gate(Ket& state, int atoms, int levels, const Gate& gate);

/// X = |0><d-1| + sum_i |i+1><i|.
Gate cyclic_shift(int levels, int target = 0);

/// Two-qudit controlled shift U = sum_i |i><i| (x) X^{i+1} (control first).
Gate controlled_shift(int levels, int control, int target);

/// Qubit CNOT embedded in a d-level pair: flips target levels {0,1} when control is 1.
Gate embedded_cnot(int levels, int control, int target);

/// exp(-i theta (X(x)X(x)X + h.c.)) on three qutrits, by spectral decomposition.
Gate three_qutrit_exponential(double theta);

/// CNOT on (|0> + sign |1>)/sqrt(2) (x) |1>: gives (|01> + sign |10>)/sqrt(2) in a `levels`-level register.
PureState prepare_two_atom_singlet(int levels = 3, double sign = -1.0);

struct LocalPhaseEquivalence {
  bool equivalent = false;
  std::vector<Ket> site_phases;  ///< diagonal of D_a for every site (unit modulus)
  cplx global_phase{1.0, 0.0};
  double residual = 0.0;          ///< ||b - g (D_1 (x) ... (x) D_M) a||
};

/// Decides whether b = g (D_1 (x) ... (x) D_M) a for diagonal unitaries D_a and a phase g.
/// Moduli must agree; the phases are solved exactly over the integers
/// (row echelon form of the support incidence matrix, modulo 2 pi).
LocalPhaseEquivalence equal_up_to_local_phases(const PureState& a, const PureState& b, double tol = 1e-10);

struct PreparationResult {
  PureState state;
  double overlap = 0.0;           ///< |<target|output>| (after phase recovery for method 1)
  cplx global_phase{1.0, 0.0};    ///< <target|output>/|<target|output>|
  LocalPhaseEquivalence phases;   ///< populated by method 1
};

/// Particles 1,2 in psi_-, particle 3 in |2>, then the three-qutrit exponential
/// gate with theta = 2 pi / 9.  The output matches psi_d^3 up to local phases.
PreparationResult prepare_dark_method1();

/// Particle 3 in |+>, then the controlled shift on pairs (3,1) and (3,2).
PreparationResult prepare_dark_method2();

/// Recursive preparation of psi_d^N (N >= 3) from the two-atom singlet.
PreparationResult prepare_dark_recursive(int n);

/// Superradiant variant: psi_+ base case and no alternating signs.
PreparationResult prepare_superradiant_recursive(int n);

}  // namespace darkstates
