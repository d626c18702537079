#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "darkstates/basis.hpp"

namespace darkstates {

/// Atom positions in units of the transition wavelength.
struct Geometry {
  std::vector<Eigen::Vector3d> positions;
};

/// Couplings of one transition j across the register.
struct TransitionCoupling {
  Eigen::MatrixXd gamma;      ///< mutual decay rates Gamma_j^{ik}; symmetric PSD, positive diagonal
  Eigen::MatrixXd omega;      ///< exchange shifts Omega_j^{ik}; symmetric, zero diagonal
  Eigen::VectorXd omega_bar;  ///< effective transition frequency per atom
};

/// Validated coupling data, one entry per transition in LevelScheme order.
/// Rates are in units of the reference single-transition rate.
class CouplingSet {
 public:
  CouplingSet(int atoms, std::vector<TransitionCoupling> transitions);

  int atoms() const { return atoms_; }
  std::size_t transition_count() const { return transitions_.size(); }
  const TransitionCoupling& transition(std::size_t k) const { return transitions_.at(k); }
  const std::vector<TransitionCoupling>& transitions() const { return transitions_; }

  /// True if every Gamma_j has all entries equal (collective-jump regime).
  bool is_dicke(double tol = 1e-12) const;

 private:
  int atoms_;
  std::vector<TransitionCoupling> transitions_;
};

/// Dicke limit: Gamma_j^{ik} = gamma_j for all i, k; Omega_j^{ik} = omega_j off the diagonal.
/// `gamma` / `omega` hold one value per transition, or a single value for all.
CouplingSet dicke_couplings(int atoms, const LevelScheme& scheme, std::span<const double> gamma,
                            std::span<const double> omega = {});
CouplingSet dicke_couplings(int atoms, const LevelScheme& scheme, double gamma = 1.0, double omega = 0.0);

/// User-supplied matrices.  `omega` and `omega_bar` may be empty (zero).
/// Rejects asymmetric input and decay matrices with an eigenvalue below -1e-10.
CouplingSet explicit_couplings(std::vector<Eigen::MatrixXd> gamma, std::vector<Eigen::MatrixXd> omega = {},
                               std::vector<Eigen::VectorXd> omega_bar = {});

/// Isotropic scalar kernel with x = 2 pi |r_i - r_k|:
///   Gamma^{ik} = gamma sin(x)/x,  Omega^{ik} = -(gamma/2) cos(x)/x.
CouplingSet scalar_kernel_couplings(const Geometry& geometry, std::span<const double> gamma);

}  // namespace darkstates
