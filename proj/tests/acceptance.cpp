// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "darkstates/circuits.hpp"
#include "darkstates/dynamics.hpp"
#include "darkstates/entanglement.hpp"
#include "darkstates/scenario.hpp"
#include "darkstates/states.hpp"
#include "oracles.hpp"

using namespace darkstates;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2fs)\n", out.pass ? "PASS" : "FAIL", id, title, out.detail.c_str(), secs);
  std::fflush(stdout);
}

double max_jump(const Ket& v, int atoms, const LevelScheme& scheme) {
  double worst = 0.0;
  for (const auto& s : collective_jump_operators(atoms, scheme)) worst = std::max(worst, (s * v).norm());
  return worst;
}

// -sum_j sum_{ik} G_j^{ik} <s_i^+ s_k>: rate of change of the excited population at t = 0.
double analytic_slope(const Ket& psi, const CouplingSet& c, const LevelScheme& scheme) {
  const int atoms = c.atoms();
  const int levels = scheme.levels();
  double slope = 0.0;
  for (std::size_t j = 0; j < scheme.transitions().size(); ++j) {
    const auto& tr = scheme.transitions()[j];
    for (int i = 0; i < atoms; ++i)
      for (int k = 0; k < atoms; ++k) {
        const auto si = oracle::site_op(atoms, levels, i, tr.upper, tr.lower);
        const auto sk = oracle::site_op(atoms, levels, k, tr.upper, tr.lower);
        slope -= c.transition(j).gamma(i, k) * (si * psi).dot(sk * psi).real();
      }
  }
  return slope;
}

double value_at(const Trajectory& traj, double t, const std::function<double(const Observables&)>& f) {
  for (std::size_t n = 0; n < traj.times.size(); ++n)
    if (std::abs(traj.times[n] - t) < 1e-12) return f(traj.observables[n]);
  throw std::runtime_error("time " + std::to_string(t) + " not on the grid");
}

}  // namespace

int main() {
  criterion(1, "dark-state stationarity", [] {
    double worst = 0.0;
    for (int n = 2; n <= 4; ++n) {
      const auto scheme = LevelScheme::lambda(n);
      for (double omega : {0.0, 0.7}) {
        const DensityMatrix rho(antisymmetric_dark_state(n));
        worst = std::max(worst, liouvillian_apply(rho, dicke_couplings(n, scheme, 1.0, omega), scheme).norm());
      }
    }
    const auto v = LevelScheme::v(3);
    for (double omega : {0.0, 0.7})
      worst = std::max(worst, liouvillian_apply(DensityMatrix(v_system_dark_state(3)), dicke_couplings(3, v, 1.0, omega), v)
                                  .norm());
    return Outcome{worst < 1e-10, fmt("max ||L[rho_d]||_F = %.3g (limit 1e-10)", worst)};
  });

  criterion(2, "dark subspace uniqueness", [] {
    const auto scheme = LevelScheme::lambda(3);
    const auto sub3 = dark_subspace(3, scheme);
    const auto sub2 = dark_subspace(2, scheme);
    std::vector<Eigen::MatrixXcd> ops3, ops2;
    for (const auto& tr : scheme.transitions()) {
      ops3.push_back(oracle::collective_lowering(3, 3, tr.upper, tr.lower));
      ops2.push_back(oracle::collective_lowering(2, 3, tr.upper, tr.lower));
    }
    const auto k3 = oracle::joint_kernel(ops3);
    const auto k2 = oracle::joint_kernel(ops2);
    // Oracle: strip the zero-excitation part (levels 1, 2 only) from the dense kernel.
    Eigen::MatrixXcd ground = Eigen::MatrixXcd::Zero(27, 8);
    int col = 0;
    for (int a : {1, 2})
      for (int b : {1, 2})
        for (int c : {1, 2}) ground(a * 9 + b * 3 + c, col++) = 1.0;
    const Eigen::MatrixXcd rest = k3 - ground * (ground.adjoint() * k3);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rest, Eigen::ComputeThinU);
    int excited_rank = 0;
    for (Eigen::Index n = 0; n < svd.singularValues().size(); ++n) excited_rank += svd.singularValues()(n) > 1e-8;
    const Ket dark = oracle::permutation_state(3, true);
    const double lib_overlap =
        sub3.excited_basis.cols() == 1 ? std::abs(sub3.excited_basis.col(0).dot(dark)) : 0.0;
    const double oracle_overlap = std::abs(svd.matrixU().col(0).dot(dark));
    const bool ok = sub3.basis.cols() == 9 && k3.cols() == 9 && sub3.excited_basis.cols() == 1 && excited_rank == 1 &&
                    std::abs(lib_overlap - 1.0) < 1e-10 && std::abs(oracle_overlap - 1.0) < 1e-10 &&
                    sub2.basis.cols() == 4 && k2.cols() == 4 && sub2.excited_basis.cols() == 0;
    return Outcome{ok, "M=3 kernel " + std::to_string(sub3.basis.cols()) + " (dense " + std::to_string(k3.cols()) +
                           "), excited " + std::to_string(sub3.excited_basis.cols()) +
                           fmt(", |<psi_d|v>| - 1 = %.2g", lib_overlap - 1.0) + "; M=2 kernel " +
                           std::to_string(sub2.basis.cols()) + " (dense " + std::to_string(k2.cols()) + ")"};
  });

  criterion(3, "initial decay slopes", [] {
    const ScenarioConfig c = preset("fig2");
    const auto scheme = scheme_of(c);
    const auto couplings = couplings_of(c);
    const double h = 1e-3;
    const std::vector<double> grid{0.0, h, 2 * h};
    auto numeric_slope = [&](const PureState& psi) {
      const auto traj = evolve(DensityMatrix(psi), couplings, scheme, grid);
      const auto& o = traj.observables;
      return (-3 * o[0].excited_total + 4 * o[1].excited_total - o[2].excited_total) / (2 * h);
    };
    const auto dark = antisymmetric_dark_state(3);
    const auto bright = symmetric_superradiant_state(3);
    const double sd = numeric_slope(dark), ss = numeric_slope(bright);
    const double od = analytic_slope(oracle::permutation_state(3, true), couplings, scheme);
    const double os = analytic_slope(oracle::permutation_state(3, false), couplings, scheme);
    bool ok = std::abs(sd / -0.1 - 1) < 0.01 && std::abs(ss / -3.9 - 1) < 0.01 && std::abs(od / -0.1 - 1) < 0.01 &&
              std::abs(os / -3.9 - 1) < 0.01;

    // Independent atoms: single-excitation states decay as exp(-2 Gamma t).
    const auto independent = explicit_couplings({Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Identity(3, 3)});
    const auto times = time_grid(c.t_max, c.samples);
    EvolveOptions opt;
    opt.tol = c.tol;
    const auto traj = evolve(DensityMatrix(dark), independent, scheme, times, opt);
    double dev = 0.0;
    for (std::size_t n = 0; n < times.size(); ++n)
      dev = std::max(dev, std::abs(traj.observables[n].excited_total - std::exp(-2 * times[n])));
    ok = ok && dev < 10 * c.tol;
    return Outcome{ok, fmt("slope dark %.5f, superradiant %.5f", sd, ss) + fmt(" (analytic %.5f, %.5f)", od, os) +
                           fmt("; independent-atom max |p - exp(-2t)| = %.2g", dev)};
  });

  criterion(4, "long-time trapping", [] {
    auto run = [](const char* name) {
      ScenarioConfig c = preset(name);
      c.t_max = 15.0;
      c.samples = 301;
      return value_at(run_scenario(c), 15.0, [](const Observables& o) { return o.excited_total; });
    };
    const double g2 = run("fig3_g2"), g1 = run("fig3_g1");
    // Oracle: trapped population = |<psi_d|psi_0>|^2 times the single excitation of psi_d.
    const Ket d = oracle::permutation_state(3, true);
    const Ket singlet = (oracle::basis_ket(3, {0, 1}) - oracle::basis_ket(3, {1, 0})) / std::sqrt(2.0);
    const double o2 = std::norm(d.dot(Ket(oracle::kron(singlet, oracle::basis_ket(3, {2})))));
    const double o1 = std::norm(d.dot(Ket(oracle::kron(singlet, oracle::basis_ket(3, {1})))));
    const bool ok = std::abs(g2 - 1.0 / 3.0) < 0.01 && g1 < 0.01 && std::abs(o2 - 1.0 / 3.0) < 1e-14 && o1 < 1e-14;
    return Outcome{ok, fmt("pop_e(15) with g2 spectator %.6f (oracle %.6f)", g2, o2) +
                           fmt(", with g1 spectator %.3g (oracle %.3g)", g1, o1)};
  });

  criterion(5, "integrator against exact exponentiation", [] {
    double worst_ratio = 0.0;
    std::string worst_name;
    for (const auto& name : preset_names()) {
      const ScenarioConfig c = preset(name);
      const auto scheme = scheme_of(c);
      const auto couplings = couplings_of(c);
      const auto times = time_grid(c.t_max, c.samples);
      const auto psi = initial_state(c);
      EvolveOptions opt;
      opt.tol = c.tol;
      const auto traj = evolve(DensityMatrix(psi), couplings, scheme, times, opt);
      const Eigen::MatrixXcd gen = oracle::superoperator(couplings, scheme);
      const Eigen::MatrixXcd step = (gen * (times[1] - times[0])).exp();
      Ket v = oracle::vec(DensityMatrix(psi).matrix());
      for (std::size_t n = 0; n < times.size(); ++n) {
        if (n > 0) v = (step * v).eval();
        const double err = (traj.states[n] - oracle::unvec(v, psi.dim())).norm();
        if (err / (10 * c.tol) > worst_ratio) {
          worst_ratio = err / (10 * c.tol);
          worst_name = name;
        }
      }
    }
    return Outcome{worst_ratio < 1.0, fmt("worst snapshot error = %.3g x (10 tol)", worst_ratio) + " [" + worst_name + "]"};
  });

  criterion(6, "entanglement values", [] {
    double worst = 0.0;
    for (int n = 2; n <= 4; ++n)
      worst = std::max(worst, std::abs(geometric_measure(antisymmetric_dark_state(n)).value - (1 - 1 / oracle::factorial(n))));
    const double sr = geometric_measure(symmetric_superradiant_state(3)).value;
    worst = std::max(worst, std::abs(sr - 7.0 / 9.0));
    const std::vector<int> lost{2};
    const double neg = persistence_under_loss(antisymmetric_dark_state(3), lost).bipartitions.at(0).negativity;
    std::mt19937_64 rng(424242);
    std::normal_distribution<double> g;
    double min_witness = 1.0;
    for (int trial = 0; trial < 10000; ++trial) {
      Ket prod = Ket::Ones(1);
      for (int a = 0; a < 3; ++a) {
        Ket site(3);
        for (int l = 0; l < 3; ++l) site(l) = cplx(g(rng), g(rng));
        prod = oracle::kron(prod, site.normalized());
      }
      min_witness = std::min(min_witness, witness_expectation(DensityMatrix(PureState(3, 3, prod)), 3));
    }
    const double w = witness_expectation(DensityMatrix(antisymmetric_dark_state(3)), 3);
    const bool ok = worst < 1e-6 && std::abs(neg - 1.0 / 3.0) < 1e-8 && min_witness >= 0.0 &&
                    std::abs(w - (1.0 / 6.0 - 1.0)) < 1e-12;
    return Outcome{ok, fmt("max |E_g - exact| = %.2g", worst) + fmt(", negativity %.10f", neg) +
                           fmt(", min witness on products %.3g, on psi_d %.6f", min_witness, w)};
  });

  criterion(7, "GL invariance", [] {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g;
    const auto d = antisymmetric_dark_state(3);
    double worst = 0.0;
    int tested = 0;
    while (tested < 100) {
      Eigen::MatrixXcd s(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s(i, j) = cplx(g(rng), g(rng));
      if (Eigen::JacobiSVD<Eigen::MatrixXcd>(s).singularValues()(2) < 1e-3) continue;
      ++tested;
      // Oracle: explicit S (x) S (x) S acting on the amplitude vector.
      const Ket image = oracle::kron(oracle::kron(s, s), s) * d.amplitudes();
      const cplx det = s.determinant();
      const double scale = std::max(1.0, std::abs(det));
      worst = std::max(worst, (image - det * d.amplitudes()).norm() / scale);
      worst = std::max(worst, (apply_product_operator(d, s) - image).norm() / scale);
      const auto r = gl_invariance_check(d, s);
      if (!r.proportional) worst = std::max(worst, 1.0);
      worst = std::max(worst, std::abs(r.factor - det) / scale);
    }
    return Outcome{worst < 1e-9, fmt("100 random S, max |S^(x)3 psi - det(S) psi| / max(1,|det S|) = %.2g", worst)};
  });

  criterion(8, "preparation protocols", [] {
    double min_overlap = 1.0, worst_jump = 0.0;
    const auto m1 = prepare_dark_method1();
    Ket recovered = m1.state.amplitudes();
    for (int s = 0; s < 3; ++s)
      apply_local(recovered, 3, 3, s, Eigen::MatrixXcd(m1.phases.site_phases[static_cast<std::size_t>(s)].asDiagonal()));
    min_overlap = std::min(min_overlap, std::abs(oracle::permutation_state(3, true).dot(recovered)));
    worst_jump = std::max(worst_jump, max_jump(recovered, 3, LevelScheme::lambda(3)));
    std::vector<PreparationResult> others{prepare_dark_method2(), prepare_dark_recursive(3), prepare_dark_recursive(4)};
    for (const auto& r : others) {
      const int n = r.state.atoms();
      min_overlap = std::min(min_overlap, std::abs(oracle::permutation_state(n, true).dot(r.state.amplitudes())));
      worst_jump = std::max(worst_jump, max_jump(r.state.amplitudes(), n, LevelScheme::lambda(n)));
    }
    const bool ok = min_overlap >= 1 - 1e-9 && worst_jump < 1e-10;
    return Outcome{ok, fmt("min overlap 1 - %.2g, max ||S_l psi|| = %.2g", 1 - min_overlap, worst_jump)};
  });

  criterion(9, "composite states", [] {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> level(1, 2);
    const auto scheme = LevelScheme::lambda(3);
    const auto couplings = dicke_couplings(6, scheme);
    const auto d3 = antisymmetric_dark_state(3);
    std::vector<Eigen::MatrixXcd> dense;
    for (const auto& tr : scheme.transitions()) dense.push_back(oracle::collective_lowering(6, 3, tr.upper, tr.lower));
    double worst = 0.0;
    bool all = true;
    for (int trial = 0; trial < 20; ++trial) {
      const cplx alpha(g(rng), g(rng)), beta(g(rng), g(rng));
      const auto gi = PureState::basis(3, {level(rng)});
      const auto gj = PureState::basis(3, {level(rng)});
      const auto gk = PureState::basis(3, {level(rng)});
      const std::vector<CompositeTerm> terms{{alpha, {{{0, 1, 2}, d3}, {{3, 4, 5}, d3}}},
                                             {beta, {{{0}, gi}, {{1}, gj}, {{2, 3, 4}, d3}, {{5}, gk}}}};
      const auto c = composite_dark_state(6, terms);
      const auto r = check_pure_stationary(c.state, couplings, scheme, 1e-10);
      all = all && r.is_stationary;
      for (double x : r.jump_residuals) worst = std::max(worst, x);
      for (const auto& s : dense) worst = std::max(worst, (s * c.state.amplitudes()).norm());
    }
    return Outcome{all && worst < 1e-10, fmt("20 random (alpha, beta), max jump residual %.2g", worst)};
  });

  criterion(10, "structure preservation", [] {
    double drift = 0.0, herm = 0.0, min_eig = 1.0;
    for (const auto& name : preset_names()) {
      const auto traj = run_scenario(preset(name), true);
      for (const auto& rho : traj.states) {
        drift = std::max(drift, std::abs(rho.trace() - 1.0));
        herm = std::max(herm, (rho - rho.adjoint()).norm());
        min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(rho, Eigen::EigenvaluesOnly)
                                        .eigenvalues()
                                        .minCoeff());
      }
    }
    const bool ok = drift < 1e-9 && herm < 1e-9 && min_eig >= -1e-8;
    return Outcome{ok, fmt("trace drift %.2g, Hermiticity %.2g", drift, herm) + fmt(", min eigenvalue %.2g", min_eig)};
  });

  criterion(11, "negative-coupling chain", [] {
    ScenarioConfig c = preset("fig5");
    c.samples = 401;
    bool negative = false;
    for (const auto& m : c.coupling.gamma_matrices)
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) negative = negative || (i != k && m(i, k) < 0);
    const auto chain = run_scenario(c);
    ScenarioConfig dicke = c;
    dicke.coupling = CouplingSpec{};
    const auto ideal = run_scenario(dicke);
    const double start = chain.observables.front().dark_fraction;
    double peak = 0.0;
    for (const auto& o : chain.observables) peak = std::max(peak, o.dark_fraction);
    auto pop = [](const Observables& o) { return o.excited_total; };
    const double late = value_at(chain, 10.0, pop), late_ideal = value_at(ideal, 10.0, pop);
    const bool ok = negative && std::abs(start) < 1e-15 && peak > 0.0 && late > late_ideal;
    return Outcome{ok, fmt("dark_fraction %.2g -> peak %.4g", start, peak) +
                           fmt(", pop_e(10) %.3g vs ideal %.3g", late, late_ideal)};
  });

  criterion(12, "performance, N=4", [] {
    ScenarioConfig c;
    c.atoms = 4;
    c.levels = 4;
    c.coupling.model = CouplingModel::Explicit;
    Eigen::MatrixXd g = Eigen::MatrixXd::Constant(4, 4, 0.95);
    g.diagonal().setOnes();
    c.coupling.gamma_matrices = {g, g, g};
    c.initial_state = "superradiant";
    c.t_max = 20.0;
    c.samples = 400;
    c.tol = 1e-8;
    const auto start = std::chrono::steady_clock::now();
    const auto traj = run_scenario(c);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return Outcome{secs < 60.0, fmt("dimension 256 to t = 20 in %.2f s", secs) + " (" + std::to_string(traj.steps) +
                                    " steps, limit 60 s)"};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
