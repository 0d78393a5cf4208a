#include "lpvp/cr3bp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lpvp::cr3bp {

namespace {
constexpr double kSingularDistance = 1e-12;
}

double mass_ratio(double m1, double m2) { return m2 / (m1 + m2); }

double default_pi2() { return mass_ratio(kEarthMassKg, kMoonMassKg); }

State Cr3bpConfig::default_initial_state(double pi2, double radius) {
  // Circular inertial speed about Earth minus the frame rotation.
  const double v_rot = std::sqrt((1.0 - pi2) / radius) - radius;
  return State(radius - pi2, 0.0, 0.0, v_rot);
}

void Cr3bpConfig::validate() const {
  if (!(pi2 > 0.0 && pi2 < 1.0)) {
    throw std::invalid_argument("cr3bp: pi2 must be in (0, 1)");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("cr3bp: dt must be positive");
  if (!(t_final > 0.0)) {
    throw std::invalid_argument("cr3bp: t_final must be positive");
  }
  if (box_margin < 0.0) {
    throw std::invalid_argument("cr3bp: box_margin must be >= 0");
  }
  if (!(disturbance_scale > 0.0)) {
    throw std::invalid_argument("cr3bp: disturbance_scale must be positive");
  }
}

void primary_distances(const State& s, double pi2, double& sigma,
                       double& psi) {
  const double xe = s[0] + pi2;      // from Earth
  const double xm = s[0] + pi2 - 1;  // from Moon
  sigma = std::hypot(xe, s[1]);
  psi = std::hypot(xm, s[1]);
}

State dynamics(const State& s, double pi2) {
  double sigma, psi;
  primary_distances(s, pi2, sigma, psi);
  if (sigma < kSingularDistance || psi < kSingularDistance) {
    throw std::domain_error("cr3bp dynamics: state at a primary");
  }
  const double s3 = sigma * sigma * sigma;
  const double p3 = psi * psi * psi;
  State ds;
  ds[0] = s[2];
  ds[1] = s[3];
  ds[2] = 2.0 * s[3] + s[0] - (1.0 - pi2) * (s[0] + pi2) / s3 -
          pi2 * (s[0] + pi2 - 1.0) / p3;
  ds[3] = -2.0 * s[2] + s[1] - (1.0 - pi2) * s[1] / s3 - pi2 * s[1] / p3;
  return ds;
}

double jacobi_constant(const State& s, double pi2) {
  double sigma, psi;
  primary_distances(s, pi2, sigma, psi);
  return s[0] * s[0] + s[1] * s[1] + 2.0 * (1.0 - pi2) / sigma +
         2.0 * pi2 / psi - (s[2] * s[2] + s[3] * s[3]);
}

Rho rho_of_state(const State& s, double pi2) {
  double sigma, psi;
  primary_distances(s, pi2, sigma, psi);
  if (sigma < kSingularDistance || psi < kSingularDistance) {
    throw std::domain_error("cr3bp rho: state at a primary");
  }
  Rho rho;
  rho[0] = 1.0 / (sigma * sigma * sigma);
  rho[1] = 1.0 / (psi * psi * psi);
  rho[2] = 1.0 / sigma;
  rho[3] = 1.0 / psi;
  rho[4] = s[0];
  rho[5] = s[1];
  return rho;
}

Measurement measurement(const State& s, double pi2) {
  double sigma, psi;
  primary_distances(s, pi2, sigma, psi);
  if (sigma < kSingularDistance || psi < kSingularDistance) {
    throw std::domain_error("cr3bp measurement: state at a primary");
  }
  Measurement m;
  m[0] = s[1] / sigma;
  m[1] = (s[0] + pi2) / sigma;
  m[2] = s[1] / psi;
  m[3] = -(s[0] + pi2 - 1.0) / psi;
  m[4] = sigma * sigma;
  m[5] = psi * psi;
  return m;
}

double theta1(const State& s, double pi2) {
  return std::atan2(s[1], s[0] + pi2);
}

double theta2(const State& s, double pi2) {
  return std::atan2(s[1], -(s[0] + pi2 - 1.0));
}

AffineMatrixFunction affine_A(double pi2) {
  Matrix a0 = Matrix::Zero(4, 4);
  a0(0, 2) = 1.0;
  a0(1, 3) = 1.0;
  a0(2, 0) = 1.0;
  a0(2, 3) = 2.0;
  a0(3, 1) = 1.0;
  a0(3, 2) = -2.0;
  AffineMatrixFunction A(a0);
  Matrix a1 = Matrix::Zero(4, 4);
  a1(2, 0) = pi2 - 1.0;
  a1(3, 1) = pi2 - 1.0;
  A.add_basis(0, a1);
  Matrix a2 = Matrix::Zero(4, 4);
  a2(2, 0) = -pi2;
  a2(3, 1) = -pi2;
  A.add_basis(1, a2);
  return A;
}

AffineMatrixFunction affine_b(double pi2) {
  // Offset of the x acceleration: pi2(pi2-1)(rho1 - rho2), from expanding
  // the gravity terms at the primary offsets +pi2 and pi2-1.
  AffineMatrixFunction b = AffineMatrixFunction::zero(4, 1);
  Matrix b1 = Matrix::Zero(4, 1);
  b1(2, 0) = pi2 * (pi2 - 1.0);
  b.add_basis(0, b1);
  Matrix b2 = Matrix::Zero(4, 1);
  b2(2, 0) = -pi2 * (pi2 - 1.0);
  b.add_basis(1, b2);
  return b;
}

AffineMatrixFunction affine_C_y(double pi2) {
  Matrix c0 = Matrix::Zero(6, 4);
  c0(4, 0) = 2.0 * pi2;
  c0(5, 0) = 2.0 * pi2 - 2.0;
  AffineMatrixFunction C(c0);
  Matrix c3 = Matrix::Zero(6, 4);  // rho3 = 1/sigma
  c3(0, 1) = 1.0;
  c3(1, 0) = 1.0;
  C.add_basis(2, c3);
  Matrix c4 = Matrix::Zero(6, 4);  // rho4 = 1/psi
  c4(2, 1) = 1.0;
  c4(3, 0) = -1.0;
  C.add_basis(3, c4);
  Matrix c5 = Matrix::Zero(6, 4);  // rho5 = x
  c5(4, 0) = 1.0;
  c5(5, 0) = 1.0;
  C.add_basis(4, c5);
  Matrix c6 = Matrix::Zero(6, 4);  // rho6 = y
  c6(4, 1) = 1.0;
  c6(5, 1) = 1.0;
  C.add_basis(5, c6);
  return C;
}

AffineMatrixFunction affine_d(double pi2) {
  Matrix d0 = Matrix::Zero(6, 1);
  d0(4, 0) = pi2 * pi2;
  d0(5, 0) = (pi2 - 1.0) * (pi2 - 1.0);
  AffineMatrixFunction d(d0);
  Matrix d3 = Matrix::Zero(6, 1);
  d3(1, 0) = pi2;
  d.add_basis(2, d3);
  Matrix d4 = Matrix::Zero(6, 1);
  d4(3, 0) = -(pi2 - 1.0);
  d.add_basis(3, d4);
  return d;
}

void lpv_matrices(const Rho& rho, double pi2, Matrix& A, Matrix& b,
                  Matrix& C_y, Matrix& d) {
  const Vector r = rho;
  A = affine_A(pi2).eval(r);
  b = affine_b(pi2).eval(r);
  C_y = affine_C_y(pi2).eval(r);
  d = affine_d(pi2).eval(r);
}

std::vector<State> propagate(const Cr3bpConfig& config) {
  config.validate();
  const auto steps = static_cast<long>(std::llround(config.t_final / config.dt));
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  State s = config.initial_state;
  out.push_back(s);
  const double h = config.dt;
  for (long k = 0; k < steps; ++k) {
    const State k1 = dynamics(s, config.pi2);
    const State k2 = dynamics(s + 0.5 * h * k1, config.pi2);
    const State k3 = dynamics(s + 0.5 * h * k2, config.pi2);
    const State k4 = dynamics(s + h * k3, config.pi2);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back(s);
  }
  return out;
}

ParameterBox extract_box(const std::vector<State>& trajectory, double margin,
                         double pi2) {
  if (trajectory.empty()) {
    throw std::invalid_argument("extract_box: empty trajectory");
  }
  if (margin < 0.0) {
    throw std::invalid_argument("extract_box: margin must be >= 0");
  }
  Vector lo = Vector::Constant(6, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  for (const State& s : trajectory) {
    const Rho rho = rho_of_state(s, pi2);
    lo = lo.cwiseMin(rho);
    hi = hi.cwiseMax(rho);
  }
  for (Eigen::Index i = 0; i < 6; ++i) {
    const double width = hi[i] - lo[i];
    const double pad =
        width > 0.0 ? margin * width : margin * std::abs(lo[i]);
    lo[i] -= pad;
    hi[i] += pad;
  }
  return ParameterBox(lo, hi);
}

LpvPlant build_plant(const Cr3bpConfig& config) {
  config.validate();
  LpvPlant plant;
  plant.n_x = 4;
  plant.n_y = 6;
  plant.n_d = 2;
  plant.n_z = 2;
  plant.n_rho = 6;
  plant.A = affine_A(config.pi2);
  plant.b = affine_b(config.pi2);
  plant.C_y = affine_C_y(config.pi2);
  plant.d = affine_d(config.pi2);

  Matrix bd = Matrix::Zero(4, 2);  // disturbance accelerations
  bd(2, 0) = 1.0;
  bd(3, 1) = 1.0;
  plant.B_d = AffineMatrixFunction(bd);
  Matrix dd = Matrix::Zero(6, 2);  // jitter feedthrough on the bearings
  dd(0, 0) = config.sensor_coupling;
  dd(1, 1) = config.sensor_coupling;
  dd(2, 0) = config.sensor_coupling;
  dd(3, 1) = config.sensor_coupling;
  plant.D_d = AffineMatrixFunction(dd);

  Matrix cz = Matrix::Zero(2, 4);  // position error output
  cz(0, 0) = 1.0;
  cz(1, 1) = 1.0;
  plant.C_z = AffineMatrixFunction(cz);

  plant.S_d_diag = Vector::Constant(2, config.disturbance_scale);
  plant.box = extract_box(propagate(config), config.box_margin, config.pi2);
  plant.validate();
  return plant;
}

}  // namespace lpvp::cr3bp
