#include <doctest.h>

#include <random>

#include "darkstates/circuits.hpp"
#include "darkstates/dynamics.hpp"
#include "darkstates/errors.hpp"
#include "darkstates/states.hpp"
#include "oracles.hpp"

using namespace darkstates;

namespace {

double worst_jump(const PureState& psi) {
  double worst = 0.0;
  for (const auto& s : collective_jump_operators(psi.atoms(), LevelScheme::lambda(psi.levels())))
    worst = std::max(worst, (s * psi.amplitudes()).norm());
  return worst;
}

}  // namespace

TEST_CASE("gates check unitarity and targets") {
  CHECK_THROWS_AS(Gate({0}, Operator::Ones(3, 3), 3), InvalidArgument);
  CHECK_THROWS_AS(Gate({0, 1}, Operator::Identity(3, 3), 3), InvalidArgument);
  Circuit c(2, 3);
  CHECK_THROWS_AS(c.add(cyclic_shift(3, 2)), InvalidArgument);
  CHECK_THROWS_AS(c.add(Gate({1, 1}, Operator::Identity(9, 9), 3)), InvalidArgument);
  CHECK_THROWS_AS(c.add(cyclic_shift(4, 0)), InvalidArgument);
}

TEST_CASE("cyclic and controlled shifts") {
  const auto x = cyclic_shift(3);
  CHECK(x.unitary()(1, 0) == cplx(1.0));
  CHECK(x.unitary()(0, 2) == cplx(1.0));

  // U |i, j> = |i, j + i + 1 mod d>
  const auto u = controlled_shift(3, 0, 1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(u.unitary()(i * 3 + (j + i + 1) % 3, i * 3 + j) == cplx(1.0));
}

TEST_CASE("gates act on the right atoms") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  Ket v(27);
  for (Eigen::Index k = 0; k < 27; ++k) v(k) = cplx(n(rng), n(rng));
  const auto g = controlled_shift(3, 2, 0);
  Ket out = v;
  apply_gate(out, 3, 3, g);
  // Dense reference: permutation of basis states with control = atom 2, target = atom 0.
  Ket ref = Ket::Zero(27);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) ref(((a + c + 1) % 3) * 9 + b * 3 + c) = v(a * 9 + b * 3 + c);
  CHECK((out - ref).norm() < 1e-14);
}

TEST_CASE("three-qutrit exponential is unitary") {
  const auto g = three_qutrit_exponential(2 * M_PI / 9);
  CHECK(g.unitarity_residual() < 1e-12);
  CHECK(g.targets() == std::vector<int>{0, 1, 2});
  CHECK((three_qutrit_exponential(0.0).unitary() - Operator::Identity(27, 27)).norm() < 1e-12);
}

TEST_CASE("two-atom singlet from a CNOT") {
  const auto s = prepare_two_atom_singlet(3, -1.0);
  CHECK(std::abs(overlap(s, pair_state(3, 0, 1, -1.0))) == doctest::Approx(1.0));
  const auto t = prepare_two_atom_singlet(2, 1.0);
  CHECK(std::abs(overlap(t, pair_state(2, 0, 1, 1.0))) == doctest::Approx(1.0));
}

TEST_CASE("local phase equivalence") {
  const auto d = antisymmetric_dark_state(3);
  SUBCASE("recovers applied phases") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 2 * M_PI);
    Ket v = d.amplitudes();
    std::vector<Ket> phases(3, Ket(3));
    for (auto& p : phases)
      for (int l = 0; l < 3; ++l) p(l) = std::polar(1.0, u(rng));
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      const auto digits = digits_of(static_cast<std::size_t>(k), 3, 3);
      for (int a = 0; a < 3; ++a) v(k) *= phases[a](digits[a]);
    }
    const auto r = equal_up_to_local_phases(d, PureState(3, 3, v));
    CHECK(r.equivalent);
    CHECK(r.residual < 1e-10);
  }
  SUBCASE("superradiant and dark states differ by more than local phases") {
    // Moduli agree; the signs cannot be produced by site phases.
    CHECK_FALSE(equal_up_to_local_phases(d, symmetric_superradiant_state(3)).equivalent);
  }
  SUBCASE("different moduli") {
    CHECK_FALSE(equal_up_to_local_phases(d, PureState::basis(3, {0, 1, 2})).equivalent);
  }
  SUBCASE("two atoms: the singlet and triplet are locally equivalent") {
    CHECK(equal_up_to_local_phases(pair_state(3, 0, 1, -1.0), pair_state(3, 0, 1, 1.0)).equivalent);
  }
}

TEST_CASE("preparation protocols") {
  const auto m1 = prepare_dark_method1();
  CHECK(m1.overlap >= 1 - 1e-9);
  CHECK(m1.phases.equivalent);

  const auto m2 = prepare_dark_method2();
  CHECK(m2.overlap >= 1 - 1e-9);
  CHECK(worst_jump(m2.state) < 1e-10);

  for (int n = 3; n <= 5; ++n) {
    CAPTURE(n);
    const auto r = prepare_dark_recursive(n);
    CHECK(r.overlap >= 1 - 1e-9);
    CHECK(worst_jump(r.state) < 1e-10);
    const auto s = prepare_superradiant_recursive(n);
    CHECK(std::abs(overlap(symmetric_superradiant_state(n), s.state)) == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(prepare_dark_recursive(2), InvalidArgument);
}
