#include <doctest.h>

#include <sstream>

#include "darkstates/errors.hpp"
#include "darkstates/scenario.hpp"

using namespace darkstates;

TEST_CASE("CSV header") {
  CHECK(csv_header(3, LevelScheme::lambda(3)) ==
        "time_gamma,pop_e_total,pop_e_atom_1,pop_e_atom_2,pop_e_atom_3,pop_g_1_total,pop_g_2_total,dark_fraction,trace,"
        "purity");
  CHECK(csv_header(2, LevelScheme::v(3)) ==
        "time_gamma,pop_e_total,pop_e_atom_1,pop_e_atom_2,pop_g_0_total,dark_fraction,trace,purity");
}

TEST_CASE("CSV rows use 12 significant digits") {
  ScenarioConfig c = preset("fig3_g2");
  c.t_max = 0.3;
  c.samples = 4;
  const auto traj = run_scenario(c);
  std::ostringstream out;
  write_csv(out, traj, scheme_of(c));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line.rfind("0,1,0.5,0.5,0,", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("0.1,", 0) == 0);
  const auto comma = line.find(',', 4);
  CHECK(line.substr(4, comma - 4).size() <= 14);
}

TEST_CASE("presets") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto c = preset(name);
    CHECK_NOTHROW(couplings_of(c));
    CHECK_NOTHROW(initial_state(c));
  }
  CHECK_THROWS_AS(preset("fig4"), InvalidArgument);
}

TEST_CASE("named states") {
  const auto lam = LevelScheme::lambda(3);
  CHECK(named_state("inverted", 3, lam).amplitude({0, 0, 0}) == cplx(1.0));
  CHECK(named_state("ground", 2, lam).amplitude({1, 1}) == cplx(1.0));
  CHECK(named_state("singlet_g2", 3, lam).amplitude({0, 1, 2}).real() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(named_state("inverted", 2, LevelScheme::v(3)).amplitude({1, 1}) == cplx(1.0));
  CHECK_THROWS_AS(named_state("dark", 2, lam), InvalidArgument);
  CHECK_THROWS_AS(named_state("v_dark", 3, lam), InvalidArgument);
  CHECK_THROWS_AS(named_state("nonsense", 3, lam), InvalidArgument);
}

TEST_CASE("config parsing") {
  SUBCASE("complete explicit config") {
    const auto c = parse_config(R"(atoms: 2
scheme: lambda
levels: 3
coupling:
  model: explicit
  gamma_matrices:
    - [[1, 0.5], [0.5, 1]]
    - [[1, 0.2], [0.2, 1]]
  omega_matrices:
    - [[0, 0.1], [0.1, 0]]
    - [[0, 0], [0, 0]]
initial_state: custom
amplitudes: [0, 1, [0, -1], 0, 0, 0, 0, 0, 0]
t_max: 5
samples: 11
tol: 1e-9
)");
    CHECK(c.atoms == 2);
    CHECK(c.coupling.model == CouplingModel::Explicit);
    CHECK(c.coupling.gamma_matrices[1](0, 1) == 0.2);
    CHECK(c.amplitudes[2] == cplx(0, -1));
    CHECK(c.samples == 11);
    const auto psi = initial_state(c);
    CHECK(std::abs(psi.amplitude({0, 2})) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(couplings_of(c).transition(0).omega(0, 1) == 0.1);
  }
  SUBCASE("scalar kernel config") {
    const auto c = parse_config(R"(atoms: 2
scheme: v
levels: 3
coupling: {model: scalar_kernel, gamma: 1, positions: [[0, 0, 0], [0.1, 0, 0]]}
initial_state: inverted
)");
    CHECK(couplings_of(c).transition(1).gamma(0, 1) < 1.0);
  }
  SUBCASE("errors name the key and line") {
    try {
      parse_config("atoms: 3\nscheme: lambda\nlevels: 3\ncoupling:\n  model: dicke\n  gama: 1\ninitial_state: dark\n");
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(e.key() == "coupling.gama");
      CHECK(e.line() == 6);
    }
    try {
      parse_config("atoms: three\nscheme: lambda\nlevels: 3\ncoupling: {model: dicke}\ninitial_state: dark\n");
      FAIL("no error");
    } catch (const ConfigError& e) {
      CHECK(e.key() == "atoms");
      CHECK(e.line() == 1);
    }
    CHECK_THROWS_AS(parse_config("atoms: 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("atoms: 3\nscheme: x\nlevels: 3\ncoupling: {model: dicke}\ninitial_state: dark\n"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config("atoms: 3\nscheme: lambda\nlevels: 3\ncoupling: {model: dicke}\ninitial_state: dark\ntol: 1\n"),
        ConfigError);
    CHECK_THROWS_AS(parse_config("atoms: [1\n"), ConfigError);
  }
  SUBCASE("couplings must match the register") {
    const auto c = parse_config(R"(atoms: 3
scheme: lambda
levels: 3
coupling:
  model: explicit
  gamma_matrices: [[[1, 0], [0, 1]], [[1, 0], [0, 1]]]
initial_state: dark
)");
    CHECK_THROWS_AS(couplings_of(c), InvalidArgument);
  }
}
