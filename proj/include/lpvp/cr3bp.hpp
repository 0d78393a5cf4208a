#pragma once

#include "lpvp/plant.hpp"

#include <vector>

namespace lpvp::cr3bp {

using State = Eigen::Vector4d;                  // (x, y, xdot, ydot), rotating frame
using Rho = Eigen::Matrix<double, 6, 1>;        // (1/s^3, 1/p^3, 1/s, 1/p, x, y)
using Measurement = Eigen::Matrix<double, 6, 1>;

// NASA planetary fact sheet values, kg.
inline constexpr double kEarthMassKg = 5.9724e24;
inline constexpr double kMoonMassKg = 7.346e22;

double mass_ratio(double m1, double m2);
double default_pi2();

/// Planar CR3BP run configuration. States are normalized by the
/// Earth-Moon distance; time by the inverse mean motion.
struct Cr3bpConfig {
  double pi2 = default_pi2();
  State initial_state = default_initial_state(default_pi2());
  double t_final = 1.25;
  double dt = 1e-3;
  double box_margin = 0.05;
  double disturbance_scale = 2e-3;  // S_d = scale * I on the acceleration channels
  // Feedthrough of the disturbance into the four bearing channels; keeps
  // the gain bounded and models disturbance-correlated pointing jitter.
  double sensor_coupling = 0.1;

  /// Prograde near-circular start of radius r around Earth.
  static State default_initial_state(double pi2, double radius = 0.3);

  void validate() const;
};

/// Distances to the primaries: sigma (Earth), psi (Moon).
void primary_distances(const State& s, double pi2, double& sigma, double& psi);

/// Planar CR3BP right-hand side. Throws on near-singular distances.
State dynamics(const State& s, double pi2);

/// Conserved energy-like quantity, used as an integrator oracle.
double jacobi_constant(const State& s, double pi2);

/// Scheduling parameters at a state. Throws on singular distances.
Rho rho_of_state(const State& s, double pi2);

/// Geometric six-channel measurement:
/// (sin t1, cos t1, sin t2, cos t2, r13^2, r23^2).
Measurement measurement(const State& s, double pi2);

/// Earth-bearing and Moon-bearing angles consistent with measurement().
double theta1(const State& s, double pi2);
double theta2(const State& s, double pi2);

/// Affine pieces of the LPV embedding.
AffineMatrixFunction affine_A(double pi2);
AffineMatrixFunction affine_b(double pi2);
AffineMatrixFunction affine_C_y(double pi2);
AffineMatrixFunction affine_d(double pi2);

/// Dense LPV matrices at a parameter sample.
void lpv_matrices(const Rho& rho, double pi2, Matrix& A, Matrix& b,
                  Matrix& C_y, Matrix& d);

/// Fixed-step RK4 trajectory including the initial state,
/// length floor(t_final/dt)+1.
std::vector<State> propagate(const Cr3bpConfig& config);

/// Componentwise rho range along a trajectory, inflated by margin.
/// Degenerate coordinates are inflated by margin*|value| instead.
ParameterBox extract_box(const std::vector<State>& trajectory, double margin,
                         double pi2);

/// Full affine-LPV plant: 4 states, 6 sensors, 2 acceleration disturbances,
/// position performance output, box from the propagated reference.
LpvPlant build_plant(const Cr3bpConfig& config);

}  // namespace lpvp::cr3bp
