#include "lpvp/cr3bp.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lpvp;
using cr3bp::State;

namespace {

// Random planar states away from both primaries.
std::vector<State> random_states(int count, double pi2, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-1.5, 1.5);
  std::uniform_real_distribution<double> vel(-2.0, 2.0);
  std::vector<State> out;
  while (static_cast<int>(out.size()) < count) {
    State s(pos(rng), pos(rng), vel(rng), vel(rng));
    double sigma, psi;
    cr3bp::primary_distances(s, pi2, sigma, psi);
    if (sigma < 0.1 || psi < 0.1) continue;
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("mass ratio from published masses") {
  const double pi2 = cr3bp::mass_ratio(cr3bp::kEarthMassKg, cr3bp::kMoonMassKg);
  CHECK(pi2 == doctest::Approx(0.01215).epsilon(2e-3));
  CHECK(cr3bp::default_pi2() == pi2);
}

TEST_CASE("equilateral point is an equilibrium") {
  const double pi2 = 0.3;
  const State s(0.5 - pi2, std::sqrt(3.0) / 2.0, 0.0, 0.0);
  const State ds = cr3bp::dynamics(s, pi2);
  CHECK(ds.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("planar symmetry keeps y acceleration zero on the x axis") {
  const State s(0.7, 0.0, 0.0, 0.0);
  const State ds = cr3bp::dynamics(s, cr3bp::default_pi2());
  CHECK(ds[3] == 0.0);
  CHECK(ds[1] == 0.0);
}

TEST_CASE("jacobi constant is conserved along a propagated arc") {
  cr3bp::Cr3bpConfig config;
  config.t_final = 10.0;
  config.dt = 1e-3;
  const auto traj = cr3bp::propagate(config);
  const double c0 = cr3bp::jacobi_constant(traj.front(), config.pi2);
  double worst = 0.0;
  for (const State& s : traj) {
    worst = std::max(worst,
                     std::abs(cr3bp::jacobi_constant(s, config.pi2) - c0));
  }
  CHECK(worst / std::abs(c0) < 1e-8);
}

TEST_CASE("rho consistency rho1 = rho3^3 and rho2 = rho4^3") {
  const double pi2 = cr3bp::default_pi2();
  for (const State& s : random_states(100, pi2, 11)) {
    const cr3bp::Rho rho = cr3bp::rho_of_state(s, pi2);
    CHECK(rho[0] == doctest::Approx(std::pow(rho[2], 3)).epsilon(1e-14));
    CHECK(rho[1] == doctest::Approx(std::pow(rho[3], 3)).epsilon(1e-14));
    CHECK(rho[2] > 0.0);
    CHECK(rho[3] > 0.0);
  }
}

TEST_CASE("rho at the equilateral point is all ones in the gravity terms") {
  const double pi2 = 0.0121505;
  const State s(0.5 - pi2, std::sqrt(3.0) / 2.0, 0.0, 0.0);
  const cr3bp::Rho rho = cr3bp::rho_of_state(s, pi2);
  for (int i = 0; i < 4; ++i) CHECK(rho[i] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho[4] == doctest::Approx(0.5 - pi2));
  CHECK(rho[5] == doctest::Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("collision with the secondary raises a singularity error") {
  // Contrived pi2 = 0.5 puts the secondary at (0.5, 0).
  const State s(0.5, 0.0, 0.0, 0.0);
  CHECK_THROWS_AS(cr3bp::rho_of_state(s, 0.5), std::domain_error);
  CHECK_THROWS_AS(cr3bp::dynamics(s, 0.5), std::domain_error);
}

TEST_CASE("exact LPV embedding of the dynamics") {
  const double pi2 = cr3bp::default_pi2();
  for (const State& s : random_states(1000, pi2, 21)) {
    const cr3bp::Rho rho = cr3bp::rho_of_state(s, pi2);
    Matrix A, b, C, d;
    cr3bp::lpv_matrices(rho, pi2, A, b, C, d);
    const Vector embedded = A * s + b;
    const State f = cr3bp::dynamics(s, pi2);
    CHECK((embedded - Vector(f)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("exact LPV embedding of the measurements") {
  const double pi2 = cr3bp::default_pi2();
  for (const State& s : random_states(1000, pi2, 22)) {
    const cr3bp::Rho rho = cr3bp::rho_of_state(s, pi2);
    Matrix A, b, C, d;
    cr3bp::lpv_matrices(rho, pi2, A, b, C, d);
    const Vector embedded = C * s + d;
    const cr3bp::Measurement h = cr3bp::measurement(s, pi2);
    CHECK((embedded - Vector(h)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("measurement channels satisfy the geometric identities") {
  const double pi2 = cr3bp::default_pi2();
  for (const State& s : random_states(200, pi2, 23)) {
    const cr3bp::Measurement h = cr3bp::measurement(s, pi2);
    CHECK(h[0] * h[0] + h[1] * h[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h[2] * h[2] + h[3] * h[3] == doctest::Approx(1.0).epsilon(1e-12));
    double sigma, psi;
    cr3bp::primary_distances(s, pi2, sigma, psi);
    CHECK(h[4] == doctest::Approx(sigma * sigma).epsilon(1e-12));
    CHECK(h[5] == doctest::Approx(psi * psi).epsilon(1e-12));
    CHECK(h[0] == doctest::Approx(std::sin(cr3bp::theta1(s, pi2))));
    CHECK(h[3] == doctest::Approx(std::cos(cr3bp::theta2(s, pi2))));
  }
}

TEST_CASE("extract_box margins") {
  const double pi2 = cr3bp::default_pi2();
  SUBCASE("constant trajectory inflates around the single value") {
    const State s(0.5, 0.2, 0.0, 0.0);
    const ParameterBox box = cr3bp::extract_box({s, s}, 0.1, pi2);
    const cr3bp::Rho rho = cr3bp::rho_of_state(s, pi2);
    for (int i = 0; i < 6; ++i) {
      CHECK(box.lower[i] ==
            doctest::Approx(rho[i] - 0.1 * std::abs(rho[i])));
      CHECK(box.upper[i] ==
            doctest::Approx(rho[i] + 0.1 * std::abs(rho[i])));
    }
  }
  SUBCASE("min/max over two states with zero margin") {
    const State a(0.1, 0.4, 0.0, 0.0);
    const State b(0.9, 0.4, 0.0, 0.0);
    const ParameterBox box = cr3bp::extract_box({a, b}, 0.0, pi2);
    CHECK(box.lower[4] == doctest::Approx(0.1));
    CHECK(box.upper[4] == doctest::Approx(0.9));
  }
  SUBCASE("margin widens a unit range by 10 percent each side") {
    const State a(0.4, 0.0, 0.0, 0.0);
    const State b(0.4, 1.0, 0.0, 0.0);
    const ParameterBox box = cr3bp::extract_box({a, b}, 0.1, pi2);
    CHECK(box.lower[5] == doctest::Approx(-0.1));
    CHECK(box.upper[5] == doctest::Approx(1.1));
  }
  SUBCASE("empty trajectory is rejected") {
    CHECK_THROWS_AS(cr3bp::extract_box({}, 0.1, pi2), std::invalid_argument);
  }
}

TEST_CASE("built plant passes validation and has 64 vertices") {
  const cr3bp::Cr3bpConfig config;
  const LpvPlant plant = cr3bp::build_plant(config);
  CHECK(plant.n_x == 4);
  CHECK(plant.n_y == 6);
  CHECK(plant.box.vertex_count() == 64);
  // The reference orbit stays inside its own extracted box.
  for (const State& s : cr3bp::propagate(config)) {
    CHECK(plant.box.contains(cr3bp::rho_of_state(s, config.pi2), 1e-12));
  }
}
