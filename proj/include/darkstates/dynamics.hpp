#pragma once

#include <optional>
#include <span>
#include <vector>

#include "darkstates/basis.hpp"
#include "darkstates/couplings.hpp"

namespace darkstates {

/// S_l^- = sum_i sigma_{l}^{i-}, one per transition of `scheme`, in scheme order.
std::vector<SparseOperator> collective_jump_operators(int atoms, const LevelScheme& scheme);

/// H = sum_{i,j} (-omega_bar^i_j) sigma_j^{i-} sigma_j^{i+}
///   + sum_{i != k} sum_j Omega_j^{ik} sigma_j^{i+} sigma_j^{k-}
SparseOperator build_hamiltonian(const CouplingSet& couplings, const LevelScheme& scheme);

/// Generator of the master equation
///   d rho/dt = i[rho, H] + (1/2) sum_{i,k,j} Gamma_j^{ik} (2 s^{i-} rho s^{k+} - s^{i+} s^{k-} rho - rho s^{i+} s^{k-})
/// kept in the pairwise (double atom sum) form.  Build once, apply many times.
class Liouvillian {
 public:
  Liouvillian(const CouplingSet& couplings, const LevelScheme& scheme);

  int atoms() const { return atoms_; }
  int levels() const { return levels_; }
  Eigen::Index dim() const { return dim_; }
  const SparseOperator& hamiltonian() const { return hamiltonian_; }

  Operator apply(const Operator& rho) const;
  void apply(const Operator& rho, Operator& out) const;

 private:
  int atoms_;
  int levels_;
  Eigen::Index dim_;
  SparseOperator hamiltonian_;
  SparseOperator h_eff_;  // H - (i/2) sum_j sum_{ik} Gamma_j^{ik} s^{i+} s^{k-}
  std::vector<SparseOperator> lowering_;      // s_j^{i-}
  std::vector<SparseOperator> fed_adjoint_;   // (sum_k Gamma_j^{ik} s_j^{k-})^dagger
  mutable Operator scratch_;
};

Operator liouvillian_apply(const DensityMatrix& rho, const CouplingSet& couplings, const LevelScheme& scheme);
Operator liouvillian_apply(const Operator& rho, const CouplingSet& couplings, const LevelScheme& scheme);

// ---------------------------------------------------------------------------
// Observables

struct ExcitedPopulation {
  std::vector<double> per_atom;
  double total = 0.0;
};

ExcitedPopulation excited_population(const Operator& rho, int atoms, const LevelScheme& scheme);
inline ExcitedPopulation excited_population(const DensityMatrix& rho, const LevelScheme& scheme) {
  return excited_population(rho.matrix(), rho.atoms(), scheme);
}

/// Sum over atoms of the population of each non-excited level (scheme.ground_levels() order).
std::vector<double> ground_populations(const Operator& rho, int atoms, const LevelScheme& scheme);
inline std::vector<double> ground_populations(const DensityMatrix& rho, const LevelScheme& scheme) {
  return ground_populations(rho.matrix(), rho.atoms(), scheme);
}

/// <ref| rho |ref>.
double dark_fraction(const Operator& rho, const PureState& reference);
inline double dark_fraction(const DensityMatrix& rho, const PureState& reference) {
  return dark_fraction(rho.matrix(), reference);
}

/// <sum_i sigma_j^{i-}> for transition id `transition`.
cplx total_dipole(const DensityMatrix& rho, const LevelScheme& scheme, int transition);

// ---------------------------------------------------------------------------
// Time evolution

struct Observables {
  std::vector<double> excited_per_atom;
  double excited_total = 0.0;
  std::vector<double> ground_totals;
  double dark_fraction = 0.0;  // NaN without a reference state
  double trace = 0.0;
  double purity = 0.0;
};

Observables observe(const Operator& rho, int atoms, const LevelScheme& scheme, const PureState* reference);

struct EvolveOptions {
  double tol = 1e-8;
  /// Reference for the dark_fraction observable.
  std::optional<PureState> reference;
  bool keep_states = true;
  /// Snapshots with an eigenvalue below this abort the run.
  double positivity_floor = -1e-6;
};

struct Trajectory {
  int atoms = 0;
  int levels = 0;
  std::vector<double> times;
  std::vector<Operator> states;  // empty unless keep_states
  std::vector<Observables> observables;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// Integrates the master equation, recording a snapshot at every entry of
/// `times` (strictly increasing, starting at 0).
Trajectory evolve(const DensityMatrix& rho0, const CouplingSet& couplings, const LevelScheme& scheme,
                  std::span<const double> times, const EvolveOptions& options = {});

/// `samples` evenly spaced times on [0, t_max], both ends included.
std::vector<double> time_grid(double t_max, int samples);

// ---------------------------------------------------------------------------
// Stationarity

struct StationarityReport {
  bool is_stationary = false;
  cplx lambda;                          ///< <Phi| Q^dagger |Phi>
  double q_residual = 0.0;              ///< ||Q^dagger Phi - lambda Phi||
  std::vector<double> jump_residuals;   ///< ||S_l^- Phi|| per transition
  double liouvillian_residual = 0.0;    ///< ||L[|Phi><Phi|]||_F
};

/// Pure-state stationarity in the collective-jump regime: Q^dagger Phi = lambda Phi
/// with Q = P - iH, P = sum_l g_l S_l^+ S_l^-, and S_l^- Phi = 0 for every l
/// (the jump operators are nilpotent).  Throws UnsupportedRegime unless every
/// decay matrix is uniform.
StationarityReport check_pure_stationary(const PureState& phi, const CouplingSet& couplings,
                                         const LevelScheme& scheme, double tol = 1e-9);

struct DarkSubspace {
  Eigen::MatrixXcd basis;          ///< orthonormal columns spanning the joint kernel of all S_l^-
  Eigen::MatrixXcd excited_basis;  ///< the part orthogonal to the zero-excitation subspace
};

/// Joint kernel of the collective jump operators, computed sector by sector
/// (sum_l S_l^+ S_l^- conserves every level occupation number).  d^M <= 1e4.
DarkSubspace dark_subspace(int atoms, const LevelScheme& scheme, double rank_tol = 1e-10);

}  // namespace darkstates
