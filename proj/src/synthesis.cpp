#include "lpvp/synthesis.hpp"

#include <cmath>
#include <stdexcept>

namespace lpvp {

const char* to_string(NormKind norm) {
  return norm == NormKind::H2 ? "h2" : "hinf";
}

const char* to_string(PrecisionPolicy policy) {
  switch (policy) {
    case PrecisionPolicy::SqrtBeta: return "sqrt_beta";
    case PrecisionPolicy::SqrtBetaOverGamma: return "sqrt_beta_over_gamma";
    case PrecisionPolicy::InvSqrtBeta: return "inv_sqrt_beta";
  }
  return "unknown";
}

Vector kappa_from_beta(const Vector& beta, double gamma,
                       PrecisionPolicy policy) {
  switch (policy) {
    case PrecisionPolicy::SqrtBeta:
      return beta.cwiseSqrt();
    case PrecisionPolicy::SqrtBetaOverGamma:
      return (beta / gamma).cwiseSqrt();
    case PrecisionPolicy::InvSqrtBeta:
      return beta.cwiseSqrt().cwiseInverse();
  }
  throw std::logic_error("unknown precision policy");
}

Vector noise_scale_from_beta(const Vector& beta, double gamma,
                             PrecisionPolicy policy) {
  const Vector kappa = kappa_from_beta(beta, gamma, policy);
  if (policy == PrecisionPolicy::InvSqrtBeta) {
    // This candidate reads S_n = diag(kappa) directly.
    return kappa;
  }
  return kappa.cwiseInverse();
}

void SynthesisRequest::validate() const {
  plant.validate();
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("synthesis: gamma must be positive");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("synthesis: eps must be positive");
  }
  if (fixed_beta.size() != 0 && fixed_beta.size() != plant.n_y) {
    throw std::invalid_argument("synthesis: fixed_beta size mismatch");
  }
}

Vector SynthesisResult::noise_scale() const {
  return noise_scale_from_beta(beta, gamma, policy);
}

std::vector<int> SynthesisResult::active_channels(double rel_tol) const {
  std::vector<int> out;
  if (beta.size() == 0) return out;
  const double threshold = rel_tol * beta.maxCoeff();
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    if (beta[i] > threshold) out.push_back(static_cast<int>(i));
  }
  return out;
}

namespace {

std::vector<Vector> enforcement_points(const SynthesisRequest& req) {
  if (!req.vertex_set.empty()) return req.vertex_set;
  return req.plant.box.vertices();
}

struct BuiltProblem {
  LmiProblem lmi;
  SdpProblem sdp;
  MatrixVar X, Y, Q, beta;
  bool has_Q = false;
  bool has_beta = false;
};

// Theorem blocks. For every enforcement point rho_v the H2 problem gets
//   [ sym(X A + Y C_y)   X Bd Sd + Y Dd Sd   Y          ]
//   [        .                 -I_{Nd}       0          ]  < 0
//   [        .                    .         -diag(beta) ]
// plus [[-Q, C_z], [C_z^T, -X]] < 0 and trace(Q) < gamma^2; the Hinf
// problem gets the single four-block LMI with -gamma^2 I and
// -gamma^2 diag(beta) on the tail diagonal.
BuiltProblem build_problem(const SynthesisRequest& req) {
  const LpvPlant& plant = req.plant;
  const int n_x = plant.n_x;
  const int n_y = plant.n_y;
  const int n_d = plant.n_d;
  const int n_z = plant.n_z;
  const bool h2 = req.norm == NormKind::H2;
  const bool fixed = req.fixed_beta.size() > 0;

  BuiltProblem built;
  LmiProblem& lmi = built.lmi;
  built.X = lmi.symmetric("X", n_x);
  built.Y = lmi.rectangular("Y", n_x, n_y);
  if (h2) {
    built.Q = lmi.symmetric("Q", n_z);
    built.has_Q = true;
  }
  if (!fixed) {
    built.beta = lmi.diagonal("beta", n_y);
    built.has_beta = true;
  }

  const Matrix S_d = plant.S_d();
  const std::vector<Vector> points = enforcement_points(req);
  const double g2 = req.gamma * req.gamma;

  for (std::size_t v = 0; v < points.size(); ++v) {
    const Vector& rho = points[v];
    const Matrix A_v = plant.A.eval(rho);
    const Matrix C_v = plant.C_y.eval(rho);
    const Matrix Bd_v = plant.B_d.eval(rho) * S_d;
    const Matrix Dd_v = plant.D_d.eval(rho) * S_d;

    const int size = h2 ? n_x + n_d + n_y : n_x + n_d + n_z + n_y;
    LmiBlock& blk = lmi.add_block(
        size, std::string(to_string(req.norm)) + "_vertex" + std::to_string(v));
    const Matrix E0 = blk.selector(0, n_x);
    const Matrix E1 = blk.selector(n_x, n_d);
    const int y_off = h2 ? n_x + n_d : n_x + n_d + n_z;
    const Matrix Ey = blk.selector(y_off, n_y);

    // sym(X A + Y C_y) on the leading diagonal block.
    blk.add_sym(built.X, E0, A_v * E0.transpose());
    blk.add_sym(built.Y, E0, C_v * E0.transpose());
    // M12 = X Bd Sd + Y Dd Sd.
    blk.add_sym(built.X, E0, Bd_v * E1.transpose());
    blk.add_sym(built.Y, E0, Dd_v * E1.transpose());
    // Y against the noise channel.
    blk.add_sym(built.Y, E0, Ey.transpose());

    const double beta_coeff = h2 ? 1.0 : g2;
    blk.add_constant(n_x, n_x,
                     -(h2 ? 1.0 : g2) * Matrix::Identity(n_d, n_d));
    if (!h2) {
      const Matrix Cz_v = plant.C_z.eval(rho);
      blk.add_constant(0, n_x + n_d, Cz_v.transpose());
      blk.add_constant(n_x + n_d, n_x + n_d, -Matrix::Identity(n_z, n_z));
    }
    if (fixed) {
      blk.add_constant(y_off, y_off,
                       -beta_coeff *
                           Matrix(req.fixed_beta.asDiagonal()));
    } else {
      blk.add_congruence(built.beta, Ey, -beta_coeff);
    }
  }

  if (h2) {
    // Output LMI; emitted once for a constant C_z, per vertex otherwise.
    const std::size_t reps = plant.C_z.parameter_dependent() ? points.size() : 1;
    for (std::size_t v = 0; v < reps; ++v) {
      const Matrix Cz_v = plant.C_z.eval(points[v]);
      LmiBlock& blk =
          lmi.add_block(n_z + n_x, "h2_output" + std::to_string(v));
      blk.add_congruence(built.Q, blk.selector(0, n_z), -1.0);
      blk.add_congruence(built.X, blk.selector(n_z, n_x), -1.0);
      blk.add_constant(0, n_z, Cz_v);
    }
    // trace(Q) < gamma^2 over the packed diagonal of Q.
    Vector row = Vector::Zero(lmi.num_scalars());
    for (int i = 0; i < n_z; ++i) {
      row[built.Q.offset + i * (i + 1) / 2 + i] = 1.0;
    }
    lmi.add_linear_le(row, g2, "h2_trace");
  }

  lmi.require_positive_definite(built.X);
  if (built.has_Q) lmi.require_positive_definite(built.Q);
  if (built.has_beta) {
    lmi.require_nonnegative(built.beta);
    lmi.set_norm_objective(built.beta, req.p);
  } else {
    // Fixed precision: push the certificate away from singularity by
    // maximizing t with X >= (t + eps) I, which bounds L = X^{-1} Y.
    const MatrixVar t = lmi.scalar("xmin");
    LmiBlock& blk = lmi.add_block(n_x, "x_conditioning");
    blk.add_congruence(built.X, Matrix::Identity(n_x, n_x), -1.0);
    for (int i = 0; i < n_x; ++i) {
      blk.add_congruence(t, blk.selector(i, 1), 1.0);
    }
    Vector c = Vector::Zero(lmi.num_scalars());
    c[t.offset] = -1.0;
    lmi.set_objective(c);
  }

  built.sdp = lmi.vectorize(req.eps);
  return built;
}

void fill_solution(SynthesisResult& result, const BuiltProblem& built,
                   const SynthesisRequest& req, const SolveResult& sol) {
  result.X = built.lmi.extract(sol.x, built.X);
  const Matrix Y = built.lmi.extract(sol.x, built.Y);
  result.L = result.X.llt().solve(Y);
  if (built.has_Q) result.Q = built.lmi.extract(sol.x, built.Q);
  result.beta = built.has_beta
                    ? Vector(built.lmi.extract(sol.x, built.beta).diagonal())
                    : req.fixed_beta;
  result.kappa = kappa_from_beta(result.beta, req.gamma, req.policy);

  result.lmi_residuals.clear();
  result.residual_labels.clear();
  const auto& labels = built.lmi.block_labels();
  for (std::size_t j = 0; j < built.sdp.psd_blocks.size(); ++j) {
    result.lmi_residuals.push_back(
        built.sdp.psd_blocks[j].max_eigenvalue(sol.x));
    result.residual_labels.push_back(labels[j]);
  }
  for (std::size_t j = 0; j < built.sdp.linear_constraints.size(); ++j) {
    const auto& lc = built.sdp.linear_constraints[j];
    result.lmi_residuals.push_back(lc.row.dot(sol.x) - lc.bound);
    result.residual_labels.push_back(built.lmi.linear_labels()[j]);
  }
}

double min_eigenvalue(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

SynthesisResult run_synthesis(const SynthesisRequest& req) {
  req.validate();
  SynthesisResult result;
  result.norm = req.norm;
  result.p = req.p;
  result.policy = req.policy;
  result.gamma = req.gamma;
  result.eps = req.eps;

  BuiltProblem built = build_problem(req);
  const SolveResult sol = solve(built.sdp, req.solver);
  result.status = sol.status;
  result.message = sol.message;
  result.objective_value = sol.objective;

  if (sol.status == SolveStatus::Optimal) {
    fill_solution(result, built, req, sol);

    // The optimal face can pin X against singularity (the gain L = X^{-1}Y
    // is unbounded on it). Re-extract at the achieved precision, nudged by
    // 0.1%, maximizing the smallest eigenvalue of X.
    if (built.has_beta && min_eigenvalue(result.X) < 1e-4) {
      SynthesisRequest again = req;
      again.fixed_beta = result.beta * (1.0 + 1e-3);
      again.advisory_on_infeasible = false;
      BuiltProblem conditioned = build_problem(again);
      const SolveResult sol2 = solve(conditioned.sdp, req.solver);
      if (sol2.status == SolveStatus::Optimal) {
        const double objective = result.objective_value;
        fill_solution(result, conditioned, again, sol2);
        result.objective_value = objective;
        result.message = "gain re-extracted at fixed precision";
      }
    }
  } else if (sol.status == SolveStatus::Infeasible &&
             req.advisory_on_infeasible) {
    result.advisory_min_gamma =
        min_feasible_gamma(req.plant, req.norm, req.gamma, 1e3 * req.gamma,
                           20, req.eps, req.fixed_beta, req.solver);
  }
  return result;
}

}  // namespace

SynthesisResult synth_h2(const SynthesisRequest& req) {
  if (req.norm != NormKind::H2) {
    throw std::invalid_argument("synth_h2: request norm must be H2");
  }
  return run_synthesis(req);
}

SynthesisResult synth_hinf(const SynthesisRequest& req) {
  if (req.norm != NormKind::Hinf) {
    throw std::invalid_argument("synth_hinf: request norm must be Hinf");
  }
  return run_synthesis(req);
}

SynthesisResult synthesize(const SynthesisRequest& req) {
  return req.norm == NormKind::H2 ? synth_h2(req) : synth_hinf(req);
}

std::vector<SynthesisResult> sweep_gamma(const LpvPlant& plant, NormKind norm,
                                         const std::vector<double>& gammas,
                                         NormOrder p, double eps,
                                         PrecisionPolicy policy,
                                         const SolveOptions& solver) {
  std::vector<SynthesisResult> out;
  out.reserve(gammas.size());
  for (double gamma : gammas) {
    SynthesisRequest req;
    req.plant = plant;
    req.norm = norm;
    req.gamma = gamma;
    req.p = p;
    req.eps = eps;
    req.policy = policy;
    req.solver = solver;
    req.advisory_on_infeasible = false;
    try {
      out.push_back(synthesize(req));
    } catch (const std::exception& e) {
      SynthesisResult failed;
      failed.norm = norm;
      failed.gamma = gamma;
      failed.status = SolveStatus::NumericalFailure;
      failed.message = e.what();
      out.push_back(std::move(failed));
    }
  }
  return out;
}

bool gamma_feasible(const LpvPlant& plant, NormKind norm, double gamma,
                    double eps, const Vector& fixed_beta,
                    const SolveOptions& solver) {
  SynthesisRequest req;
  req.plant = plant;
  req.norm = norm;
  req.gamma = gamma;
  req.eps = eps;
  req.fixed_beta = fixed_beta;
  req.solver = solver;
  req.validate();
  const BuiltProblem built = build_problem(req);
  return check_feasibility(built.sdp, solver).status == SolveStatus::Optimal;
}

double min_feasible_gamma(const LpvPlant& plant, NormKind norm, double lo,
                          double hi, int iterations, double eps,
                          const Vector& fixed_beta,
                          const SolveOptions& solver) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("min_feasible_gamma: need 0 < lo < hi");
  }
  if (!gamma_feasible(plant, norm, hi, eps, fixed_beta, solver)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (gamma_feasible(plant, norm, lo, eps, fixed_beta, solver)) {
    return lo;
  }
  double bad = lo, good = hi;
  for (int i = 0; i < iterations; ++i) {
    const double mid = std::sqrt(bad * good);  // geometric mean
    if (gamma_feasible(plant, norm, mid, eps, fixed_beta, solver)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  return good;
}

NoiseAngle noise_angle(double kappa_sin, double kappa_cos) {
  if (!(kappa_sin > 0.0) || !(kappa_cos > 0.0)) {
    throw std::domain_error("noise_angle: kappa must be positive");
  }
  if (1.0 / kappa_sin > 1.0 || 1.0 / kappa_cos > 1.0) {
    throw std::domain_error(
        "noise_angle: precision too low for an angle interpretation");
  }
  constexpr double kRadToDeg = 180.0 / M_PI;
  NoiseAngle out;
  out.from_sin_deg = std::asin(1.0 / kappa_sin) * kRadToDeg;
  out.from_cos_deg = (M_PI / 2.0 - std::acos(1.0 / kappa_cos)) * kRadToDeg;
  out.discrepancy_deg = std::abs(out.from_sin_deg - out.from_cos_deg);
  return out;
}

}  // namespace lpvp
