#include "lpvp/synthesis.hpp"

#include "lpvp/certify.hpp"
#include "lpvp/norms.hpp"

#include "util.hpp"

#include <doctest.h>

#include <cmath>

using namespace lpvp;

namespace {

SynthesisRequest request(const LpvPlant& plant, NormKind norm, double gamma) {
  SynthesisRequest req;
  req.plant = plant;
  req.norm = norm;
  req.gamma = gamma;
  return req;
}

// Frozen-parameter norm of the error system implied by a result.
double oracle_norm(const SynthesisResult& result, const LpvPlant& plant,
                   const Vector& rho, const Vector& s_n) {
  const ObserverErrorSystem sys = closed_loop(plant, result.L, s_n);
  Matrix A, B;
  sys.frozen(rho, A, B);
  if (result.norm == NormKind::H2) return h2_norm(A, B, sys.C_z);
  return hinf_norm(A, B, sys.C_z,
                   Matrix::Zero(plant.n_z, plant.n_d + plant.n_y));
}

}  // namespace

TEST_CASE("stable scalar plant is h2-feasible at a generous gamma") {
  const LpvPlant plant = testing::scalar_plant(-1.0);
  const SynthesisResult result = synth_h2(request(plant, NormKind::H2, 10.0));
  REQUIRE(result.status == SolveStatus::Optimal);
  const double norm =
      oracle_norm(result, plant, Vector(0), result.noise_scale());
  CHECK(norm <= 10.0 * (1.0 + 1e-4));
  // Loose gamma: the sensor can be nearly free, so beta sits at the floor.
  CHECK(result.beta[0] <= 1e-3);
}

TEST_CASE("stable scalar plant is hinf-feasible at a generous gamma") {
  const LpvPlant plant = testing::scalar_plant(-1.0);
  const SynthesisResult result =
      synth_hinf(request(plant, NormKind::Hinf, 10.0));
  REQUIRE(result.status == SolveStatus::Optimal);
  const double norm =
      oracle_norm(result, plant, Vector(0), result.noise_scale());
  CHECK(norm <= 10.0 * (1.0 + 1e-4));
}

TEST_CASE("h2 optimum on the unstable scalar plant matches hand analysis") {
  // A = 1, B_d = C_y = C_z = S_d = 1, D_d = 0. Eliminating Y gives
  // beta > X^2 + 2X on the feasible set, with X > 1/gamma^2 from the
  // trace constraint, so beta* = 1/gamma^4 + 2/gamma^2.
  const double gamma = 10.0;
  const LpvPlant plant = testing::scalar_plant(1.0);
  const SynthesisResult result =
      synth_h2(request(plant, NormKind::H2, gamma));
  REQUIRE(result.status == SolveStatus::Optimal);
  const double expected = std::pow(gamma, -4.0) + 2.0 * std::pow(gamma, -2.0);
  CHECK(result.beta[0] == doctest::Approx(expected).epsilon(0.02));
  CHECK(result.kappa[0] ==
        doctest::Approx(std::sqrt(expected)).epsilon(0.02));

  // The bound is tight at the optimum and certified by the oracle.
  const double norm =
      oracle_norm(result, plant, Vector(0), result.noise_scale());
  CHECK(norm <= gamma * (1.0 + 1e-4));
  CHECK(norm >= gamma * 0.98);
}

TEST_CASE("precision policy arbitration on the unstable scalar plant") {
  const double gamma = 10.0;
  const LpvPlant plant = testing::scalar_plant(1.0, 1.0, 1.0, 0.5);
  SynthesisRequest req = request(plant, NormKind::Hinf, gamma);
  const SynthesisResult result = synth_hinf(req);
  REQUIRE(result.status == SolveStatus::Optimal);

  // kappa = sqrt(beta) with S_n = diag(1/kappa) reproduces exactly the
  // noise scaling the LMI certified: the norm meets gamma and is tight.
  const Vector sn_default =
      noise_scale_from_beta(result.beta, gamma, PrecisionPolicy::SqrtBeta);
  const double norm_default = oracle_norm(result, plant, Vector(0), sn_default);
  CHECK(norm_default <= gamma * (1.0 + 1e-4));
  CHECK(norm_default >= 0.8 * gamma);

  // kappa = sqrt(beta/gamma) implies sqrt(gamma) times more noise at
  // gamma > 1; the certified bound breaks.
  const Vector sn_scaled = noise_scale_from_beta(
      result.beta, gamma, PrecisionPolicy::SqrtBetaOverGamma);
  const double norm_scaled = oracle_norm(result, plant, Vector(0), sn_scaled);
  CHECK(norm_scaled > gamma * (1.0 + 1e-4));

  // kappa = 1/sqrt(beta) gives the same S_n as the default but breaks the
  // precision identity kappa * ||n|| = 1.
  const Vector kappa_inv =
      kappa_from_beta(result.beta, gamma, PrecisionPolicy::InvSqrtBeta);
  const Vector sn_inv = noise_scale_from_beta(result.beta, gamma,
                                              PrecisionPolicy::InvSqrtBeta);
  CHECK((sn_inv - sn_default).norm() < 1e-12);
  CHECK(std::abs(kappa_inv[0] * sn_inv[0] - 1.0) > 0.1);
  const Vector kappa_default =
      kappa_from_beta(result.beta, gamma, PrecisionPolicy::SqrtBeta);
  CHECK(kappa_default[0] * sn_default[0] == doctest::Approx(1.0));
}

TEST_CASE("hinf synthesis with a feedthrough disturbance channel") {
  // D_d != 0 exercises the M12 = X B_d S_d + Y D_d S_d assembly; the
  // oracle bound only holds when that term is built correctly.
  const LpvPlant plant = testing::scalar_plant(1.0, 1.0, 1.0, 0.5);
  const double gamma = 5.0;
  const SynthesisResult result =
      synth_hinf(request(plant, NormKind::Hinf, gamma));
  REQUIRE(result.status == SolveStatus::Optimal);
  const double norm =
      oracle_norm(result, plant, Vector(0), result.noise_scale());
  CHECK(norm <= gamma * (1.0 + 1e-4));
}

TEST_CASE("h2 at vanishing gamma is infeasible with an advisory") {
  const LpvPlant plant = testing::scalar_plant(-1.0);
  SynthesisRequest req = request(plant, NormKind::H2, 1e-9);
  const SynthesisResult result = synth_h2(req);
  CHECK(result.status == SolveStatus::Infeasible);
  // The advisory bracket tops out at 1e-6 where the strictness floor on Q
  // still bites, so no feasible gamma exists inside it.
  CHECK_FALSE(std::isfinite(result.advisory_min_gamma));
}

TEST_CASE("advisory bisection finds the feasibility edge") {
  const LpvPlant plant = testing::scalar_plant(-1.0);
  SynthesisRequest req = request(plant, NormKind::H2, 0.02);
  const SynthesisResult result = synth_h2(req);
  if (result.status == SolveStatus::Infeasible) {
    CHECK(std::isfinite(result.advisory_min_gamma));
    CHECK(result.advisory_min_gamma > 0.02);
    CHECK(gamma_feasible(plant, NormKind::H2, result.advisory_min_gamma));
  } else {
    CHECK(result.status == SolveStatus::Optimal);
  }
}

TEST_CASE("gamma sweep objectives are non-increasing") {
  const LpvPlant plant = testing::scalar_plant(1.0);
  const std::vector<double> gammas{0.5, 1.0, 2.0, 5.0};
  const auto results = sweep_gamma(plant, NormKind::H2, gammas);
  REQUIRE(results.size() == 4);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective_value <= prev * (1.0 + 1e-6));
    prev = r.objective_value;
  }
}

TEST_CASE("doubling the disturbance scaling cannot cheapen the design") {
  const double gamma = 2.0;
  const SynthesisResult base =
      synth_h2(request(testing::scalar_plant(1.0, 1.0, 1.0, 0.0, 1.0, 1.0),
                       NormKind::H2, gamma));
  const SynthesisResult doubled =
      synth_h2(request(testing::scalar_plant(1.0, 1.0, 1.0, 0.0, 1.0, 2.0),
                       NormKind::H2, gamma));
  REQUIRE(base.status == SolveStatus::Optimal);
  REQUIRE(doubled.status == SolveStatus::Optimal);
  CHECK(doubled.objective_value >= base.objective_value * (1.0 - 1e-6));
}

TEST_CASE("lpv toy plant synthesis certifies across the box") {
  const LpvPlant plant = testing::lpv_toy_plant();
  SynthesisRequest req = request(plant, NormKind::H2, 2.0);
  const SynthesisResult result = synth_h2(req);
  REQUIRE(result.status == SolveStatus::Optimal);
  for (double r : result.lmi_residuals) CHECK(r <= -0.5 * result.eps);

  const CertifyReport report = certify(result, plant, 100);
  CHECK(report.pass);
  CHECK(report.worst_abscissa < 0.0);
  CHECK(report.worst_norm <= result.gamma * (1.0 + 1e-4));

  const SynthesisResult hinf_result =
      synth_hinf(request(plant, NormKind::Hinf, 2.0));
  REQUIRE(hinf_result.status == SolveStatus::Optimal);
  CHECK(certify(hinf_result, plant, 100).pass);
}

TEST_CASE("certify flags a sign-flipped gain") {
  const LpvPlant plant = testing::lpv_toy_plant();
  SynthesisResult result = synth_h2(request(plant, NormKind::H2, 2.0));
  REQUIRE(result.status == SolveStatus::Optimal);
  result.L = -result.L;
  const CertifyReport report = certify(result, plant, 20);
  CHECK_FALSE(report.pass);
}

TEST_CASE("certify names the failing vertex for an undetectable toy") {
  // A = 1 with C_y = 0: no gain stabilizes the error dynamics.
  LpvPlant plant = testing::scalar_plant(1.0, 1.0, 0.0);
  SynthesisResult fake;
  fake.status = SolveStatus::Optimal;
  fake.norm = NormKind::H2;
  fake.gamma = 1.0;
  fake.eps = 1e-8;
  fake.L = testing::m1x1(0.0);
  fake.X = testing::m1x1(1.0);
  fake.beta = Vector::Ones(1);
  fake.kappa = Vector::Ones(1);
  const CertifyReport report = certify(fake, plant, 5);
  CHECK_FALSE(report.pass);
  CHECK_FALSE(report.hurwitz_pass);
  REQUIRE_FALSE(report.rows.empty());
  CHECK(report.rows.front().at_vertex);
  CHECK(report.summary().find("FAIL") != std::string::npos);
}

TEST_CASE("fixed-beta synthesis pins the precision vector") {
  const LpvPlant plant = testing::scalar_plant(1.0);
  SynthesisRequest req = request(plant, NormKind::H2, 2.0);
  req.fixed_beta = Vector::Constant(1, 1.0);
  const SynthesisResult result = synth_h2(req);
  REQUIRE(result.status == SolveStatus::Optimal);
  CHECK(result.beta[0] == 1.0);
  const double norm =
      oracle_norm(result, plant, Vector(0), result.noise_scale());
  CHECK(norm <= 2.0 * (1.0 + 1e-4));
}

TEST_CASE("noise angle recovers the paper formulas") {
  SUBCASE("2.6 degrees round trip") {
    const double kappa = 1.0 / std::sin(2.6 * M_PI / 180.0);
    const NoiseAngle angle = noise_angle(kappa, kappa);
    CHECK(angle.from_sin_deg == doctest::Approx(2.6).epsilon(1e-12));
  }
  SUBCASE("infinite precision means zero noise") {
    const NoiseAngle angle = noise_angle(1e12, 1e12);
    CHECK(angle.from_sin_deg < 1e-9);
    CHECK(angle.from_cos_deg ==
          doctest::Approx(90.0 - 90.0).epsilon(1e-9));
  }
  SUBCASE("unit precision saturates at 90 degrees") {
    const NoiseAngle angle = noise_angle(1.0, 1.0);
    CHECK(angle.from_sin_deg == doctest::Approx(90.0));
    CHECK(angle.from_cos_deg == doctest::Approx(90.0));
  }
  SUBCASE("sub-unit precision has no angle interpretation") {
    CHECK_THROWS_AS(noise_angle(0.5, 1.5), std::domain_error);
    CHECK_THROWS_AS(noise_angle(-1.0, 1.5), std::domain_error);
  }
}

TEST_CASE("request validation") {
  const LpvPlant plant = testing::scalar_plant(-1.0);
  SynthesisRequest req = request(plant, NormKind::H2, -1.0);
  CHECK_THROWS_AS(req.validate(), std::invalid_argument);
  req.gamma = 1.0;
  req.eps = 0.0;
  CHECK_THROWS_AS(req.validate(), std::invalid_argument);
  req.eps = 1e-8;
  req.fixed_beta = Vector::Ones(3);
  CHECK_THROWS_AS(req.validate(), std::invalid_argument);
  SynthesisRequest wrong = request(plant, NormKind::Hinf, 1.0);
  CHECK_THROWS_AS(synth_h2(wrong), std::invalid_argument);
}
