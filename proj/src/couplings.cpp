#include "darkstates/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "darkstates/errors.hpp"

namespace darkstates {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-10;

std::string name(std::size_t k) { return "transition " + std::to_string(k + 1); }

void check_symmetric(const Eigen::MatrixXd& m, const std::string& what) {
  if (m.rows() != m.cols()) throw InvalidArgument(what + " is not square");
  if (!m.allFinite()) throw InvalidArgument(what + " has non-finite entries");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) throw InvalidArgument(what + " is not symmetric");
}

// Eigenvalues in [-kPsdTol, 0) are clamped to zero; anything lower is unphysical.
// Eigensolver rounding (a few ulps of the spectral radius) is left alone so that
// exactly uniform matrices stay exactly uniform.
void enforce_psd(Eigen::MatrixXd& gamma, std::size_t k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma);
  Eigen::VectorXd w = es.eigenvalues();
  if (w.minCoeff() < -kPsdTol)
    throw PhysicsError("decay matrix of " + name(k) + " is not positive semidefinite (eigenvalue " +
                       std::to_string(w.minCoeff()) + ")");
  const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, w.cwiseAbs().maxCoeff());
  if (w.minCoeff() < -rounding) {
    w = w.cwiseMax(0.0);
    gamma = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
    gamma = 0.5 * (gamma + gamma.transpose()).eval();
  }
}

std::vector<double> broadcast(std::span<const double> values, std::size_t count, double fallback,
                              const char* what) {
  if (values.empty()) return std::vector<double>(count, fallback);
  if (values.size() == 1) return std::vector<double>(count, values[0]);
  if (values.size() != count)
    throw InvalidArgument(std::string(what) + " needs one value per transition (" + std::to_string(count) + ")");
  return {values.begin(), values.end()};
}

}  // namespace

CouplingSet::CouplingSet(int atoms, std::vector<TransitionCoupling> transitions)
    : atoms_(atoms), transitions_(std::move(transitions)) {
  if (atoms_ < 1) throw InvalidArgument("coupling set needs at least one atom");
  if (transitions_.empty()) throw InvalidArgument("coupling set needs at least one transition");
  for (std::size_t k = 0; k < transitions_.size(); ++k) {
    auto& t = transitions_[k];
    if (t.gamma.rows() != atoms_ || t.omega.rows() != atoms_ || t.omega_bar.size() != atoms_)
      throw InvalidArgument(name(k) + ": coupling matrices must be " + std::to_string(atoms_) + "x" +
                            std::to_string(atoms_));
    check_symmetric(t.gamma, name(k) + " decay matrix");
    check_symmetric(t.omega, name(k) + " exchange matrix");
    if (!t.omega_bar.allFinite()) throw InvalidArgument(name(k) + ": non-finite transition frequency");
    if (t.gamma.diagonal().minCoeff() <= 0.0)
      throw PhysicsError(name(k) + ": single-atom decay rates must be strictly positive");
    if (t.omega.diagonal().cwiseAbs().maxCoeff() != 0.0)
      throw InvalidArgument(name(k) + ": exchange matrix diagonal must be zero (self shifts go into omega_bar)");
    enforce_psd(t.gamma, k);
  }
}

bool CouplingSet::is_dicke(double tol) const {
  for (const auto& t : transitions_) {
    const double ref = t.gamma(0, 0);
    if ((t.gamma.array() - ref).abs().maxCoeff() > tol * std::max(1.0, std::abs(ref))) return false;
  }
  return true;
}

CouplingSet dicke_couplings(int atoms, const LevelScheme& scheme, std::span<const double> gamma,
                            std::span<const double> omega) {
  if (atoms < 1) throw InvalidArgument("dicke_couplings needs at least one atom");
  const std::size_t count = scheme.transitions().size();
  const auto g = broadcast(gamma, count, 1.0, "gamma");
  const auto w = broadcast(omega, count, 0.0, "omega");
  std::vector<TransitionCoupling> out;
  for (std::size_t k = 0; k < count; ++k) {
    if (!(g[k] > 0.0)) throw PhysicsError("dicke_couplings: gamma of " + name(k) + " must be positive");
    TransitionCoupling t;
    t.gamma = Eigen::MatrixXd::Constant(atoms, atoms, g[k]);
    t.omega = Eigen::MatrixXd::Constant(atoms, atoms, w[k]);
    t.omega.diagonal().setZero();
    t.omega_bar = Eigen::VectorXd::Zero(atoms);
    out.push_back(std::move(t));
  }
  return CouplingSet(atoms, std::move(out));
}

CouplingSet dicke_couplings(int atoms, const LevelScheme& scheme, double gamma, double omega) {
  const double g[1] = {gamma};
  const double w[1] = {omega};
  return dicke_couplings(atoms, scheme, std::span<const double>(g), std::span<const double>(w));
}

CouplingSet explicit_couplings(std::vector<Eigen::MatrixXd> gamma, std::vector<Eigen::MatrixXd> omega,
                               std::vector<Eigen::VectorXd> omega_bar) {
  if (gamma.empty()) throw InvalidArgument("explicit_couplings needs at least one decay matrix");
  const auto atoms = gamma.front().rows();
  if (!omega.empty() && omega.size() != gamma.size())
    throw InvalidArgument("explicit_couplings: exchange matrix count differs from decay matrix count");
  if (!omega_bar.empty() && omega_bar.size() != gamma.size())
    throw InvalidArgument("explicit_couplings: omega_bar count differs from decay matrix count");
  std::vector<TransitionCoupling> out;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    if (gamma[k].rows() != atoms || gamma[k].cols() != atoms)
      throw InvalidArgument("explicit_couplings: decay matrices must share one square size");
    TransitionCoupling t;
    t.gamma = std::move(gamma[k]);
    t.omega = omega.empty() ? Eigen::MatrixXd::Zero(atoms, atoms) : std::move(omega[k]);
    t.omega_bar = omega_bar.empty() ? Eigen::VectorXd::Zero(atoms) : std::move(omega_bar[k]);
    if (t.omega.rows() != atoms || t.omega.cols() != atoms || t.omega_bar.size() != atoms)
      throw InvalidArgument("explicit_couplings: " + name(k) + " has mismatched matrix sizes");
    out.push_back(std::move(t));
  }
  return CouplingSet(static_cast<int>(atoms), std::move(out));
}

CouplingSet scalar_kernel_couplings(const Geometry& geometry, std::span<const double> gamma) {
  const auto atoms = static_cast<Eigen::Index>(geometry.positions.size());
  if (atoms < 1) throw InvalidArgument("geometry needs at least one atom");
  if (gamma.empty()) throw InvalidArgument("scalar_kernel_couplings needs one rate per transition");
  for (const auto& r : geometry.positions)
    if (!r.allFinite()) throw InvalidArgument("geometry has a non-finite position");

  Eigen::MatrixXd sinc = Eigen::MatrixXd::Identity(atoms, atoms);
  Eigen::MatrixXd cosc = Eigen::MatrixXd::Zero(atoms, atoms);
  for (Eigen::Index i = 0; i < atoms; ++i)
    for (Eigen::Index k = i + 1; k < atoms; ++k) {
      const double x = 2.0 * std::numbers::pi *
                       (geometry.positions[static_cast<std::size_t>(i)] - geometry.positions[static_cast<std::size_t>(k)])
                           .norm();
      if (x == 0.0)
        throw InvalidArgument("atoms " + std::to_string(i + 1) + " and " + std::to_string(k + 1) + " coincide");
      sinc(i, k) = sinc(k, i) = std::sin(x) / x;
      cosc(i, k) = cosc(k, i) = std::cos(x) / x;
    }

  std::vector<TransitionCoupling> out;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    if (!(gamma[k] > 0.0)) throw PhysicsError("scalar_kernel_couplings: gamma of " + name(k) + " must be positive");
    out.push_back({gamma[k] * sinc, -0.5 * gamma[k] * cosc, Eigen::VectorXd::Zero(atoms)});
  }
  return CouplingSet(static_cast<int>(atoms), std::move(out));
}

}  // namespace darkstates
