#include "lpvp/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace lpvp {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

// Internal dual standard form: maximize b^T y subject to
//   Z_j = sum_i y_i A_{j,i} - C_j >= 0 for every block j.
struct IBlock {
  Matrix C;
  std::vector<std::pair<int, Matrix>> A;  // (variable index, symmetric slope)
  Eigen::Index n() const { return C.rows(); }
};

struct IpmOutcome {
  bool converged = false;
  bool diverged = false;
  Vector y;
  double dual_objective = 0.0;
  int iterations = 0;
  double rel_gap = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  // Phase-1 certificates: margin holds a proven bound on t* when set.
  bool margin_certified = false;
  double margin = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

double frob(const Matrix& M) { return M.norm(); }

double trace_product(const Matrix& A, const Matrix& B) {
  return A.cwiseProduct(B.transpose()).sum();
}

// Largest step alpha with S + alpha dS >= 0, via the Cholesky-whitened
// minimum eigenvalue.
double max_step(const Eigen::LLT<Matrix>& llt, const Matrix& dS) {
  const Matrix& Lfac = llt.matrixL();
  Matrix W = Lfac.triangularView<Eigen::Lower>().solve(dS);
  W = Lfac.triangularView<Eigen::Lower>()
          .solve(Matrix(W.transpose()))
          .transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (W + W.transpose()),
                                            Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return 1e12;
  return -1.0 / lmin;
}

class Ipm {
 public:
  Ipm(const std::vector<IBlock>& blocks, const Vector& b,
      const SolveOptions& opts, bool phase1 = false, double init_scale = 1.0)
      : blocks_(blocks),
        b_(b),
        opts_(opts),
        m_(b.size()),
        phase1_(phase1),
        init_scale_(init_scale) {}

  IpmOutcome run() {
    IpmOutcome out;
    double best_score = std::numeric_limits<double>::infinity();
    Vector best_y;
    double best_gap = 0.0, best_pinf = 0.0, best_dinf = 0.0, best_dobj = 0.0;
    // Accept a stalled run from its best iterate at these tolerances; the
    // caller re-checks the returned point against the contract anyway.
    const double relaxed_gap = std::max(1e-7, 100.0 * opts_.tol);
    const double relaxed_feas = std::max(1e-7, 10.0 * opts_.feas_tol);
    auto finish_from_best = [&](const char* why) {
      if (best_y.size() == m_ && best_gap <= relaxed_gap &&
          best_pinf <= relaxed_feas && best_dinf <= relaxed_feas) {
        out.converged = true;
        out.y = best_y;
        out.dual_objective = best_dobj;
        out.rel_gap = best_gap;
        out.primal_infeas = best_pinf;
        out.dual_infeas = best_dinf;
        out.message = std::string(why) + "; accepted best iterate";
      } else {
        out.message = why;
      }
    };
    const std::size_t nb = blocks_.size();
    std::vector<Matrix> X(nb), Z(nb);
    n_total_ = 0;
    double a_norm_max = 0.0;
    double c_norm = 0.0;
    double alpha0 = 10.0;
    for (const IBlock& blk : blocks_) {
      n_total_ += blk.n();
      c_norm += frob(blk.C) * frob(blk.C);
      for (const auto& [k, A] : blk.A) {
        a_norm_max = std::max(a_norm_max, frob(A));
      }
    }
    c_norm = std::sqrt(c_norm);
    for (Eigen::Index k = 0; k < m_; ++k) {
      double ak = 0.0;
      for (const IBlock& blk : blocks_) {
        for (const auto& [idx, A] : blk.A) {
          if (idx == k) ak += frob(A) * frob(A);
        }
      }
      alpha0 = std::max(alpha0, static_cast<double>(n_total_) *
                                    (1.0 + std::abs(b_[k])) /
                                    (1.0 + std::sqrt(ak)));
    }
    const double beta0 =
        std::max({10.0, std::sqrt(static_cast<double>(n_total_)), a_norm_max,
                  c_norm});
    for (std::size_t j = 0; j < nb; ++j) {
      X[j] = init_scale_ * alpha0 *
             Matrix::Identity(blocks_[j].n(), blocks_[j].n());
      Z[j] = init_scale_ * beta0 *
             Matrix::Identity(blocks_[j].n(), blocks_[j].n());
    }
    Vector y = Vector::Zero(m_);

    std::vector<Matrix> Zinv(nb), Rd(nb), dXa(nb), dZa(nb), dX(nb), dZ(nb);
    std::vector<Eigen::LLT<Matrix>> lltX(nb), lltZ(nb);
    double mu_prev = std::numeric_limits<double>::infinity();
    int stall = 0;

    for (int iter = 1; iter <= opts_.max_iterations; ++iter) {
      // Residuals and factorizations. The primal partner of the dual form
      // is min tr(CX) s.t. tr(A_i X) = -b_i, X >= 0, with gap tr(XZ).
      Vector rp = -b_;
      double mu = 0.0;
      double dinf2 = 0.0;
      for (std::size_t j = 0; j < nb; ++j) {
        const IBlock& blk = blocks_[j];
        mu += X[j].cwiseProduct(Z[j]).sum();
        // Rd = C + Z - A*(y); dual feasibility is Rd = 0 and each step
        // takes the full Newton correction dZ = A*(dy) - Rd.
        Rd[j] = blk.C + Z[j];
        for (const auto& [k, A] : blk.A) {
          rp[k] -= trace_product(A, X[j]);
          Rd[j].noalias() -= y[k] * A;
        }
        dinf2 += Rd[j].squaredNorm();
        lltX[j].compute(X[j]);
        lltZ[j].compute(Z[j]);
        if (lltX[j].info() != Eigen::Success ||
            lltZ[j].info() != Eigen::Success) {
          out.message = "iterate left the cone";
          out.iterations = iter;
          return out;
        }
        Zinv[j] = lltZ[j].solve(Matrix::Identity(blk.n(), blk.n()));
        Zinv[j] = 0.5 * (Zinv[j] + Zinv[j].transpose());
      }
      mu /= static_cast<double>(n_total_);

      double pobj = 0.0;
      for (std::size_t j = 0; j < nb; ++j) {
        pobj -= trace_product(blocks_[j].C, X[j]);
      }
      const double dobj = b_.dot(y);
      const double rel_gap =
          std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      const double pinf = rp.norm() / (1.0 + b_.norm());
      const double dinf = std::sqrt(dinf2) / (1.0 + c_norm);

      if (opts_.verbose) {
        std::cerr << "ipm " << iter << " mu=" << mu << " gap=" << rel_gap
                  << " pinf=" << pinf << " dinf=" << dinf << "\n";
      }
      out.y = y;
      out.dual_objective = dobj;
      out.iterations = iter;
      out.rel_gap = rel_gap;
      out.primal_infeas = pinf;
      out.dual_infeas = dinf;
      const double score = std::max({rel_gap, pinf, dinf});
      if (std::isfinite(score) && score < best_score) {
        best_score = score;
        best_y = y;
        best_gap = rel_gap;
        best_pinf = pinf;
        best_dinf = dinf;
        best_dobj = dobj;
      }
      if (rel_gap <= opts_.tol && pinf <= opts_.feas_tol &&
          dinf <= opts_.feas_tol) {
        out.converged = true;
        return out;
      }
      if (phase1_) {
        // The last variable is the margin t. A near-dual-feasible iterate
        // with clearly negative t certifies strict feasibility; a
        // near-primal-feasible point with positive objective bounds t*
        // from below and certifies infeasibility.
        const double t = y[m_ - 1];
        if (dinf <= 1e-8 && t <= -1e-6) {
          out.converged = true;
          out.margin_certified = true;
          out.margin = t;
          out.message = "phase-1 feasibility certificate";
          return out;
        }
        // Weak duality gives t* >= tr(C Xt) = -pobj for primal-feasible Xt.
        if (pinf <= 1e-9 && -pobj >= 1e-7) {
          out.converged = true;
          out.margin_certified = true;
          out.margin = -pobj;
          out.message = "phase-1 infeasibility certificate";
          return out;
        }
      }
      if (!std::isfinite(mu) || !std::isfinite(rel_gap)) {
        finish_from_best("non-finite iterate");
        return out;
      }
      if (dobj > 1e13 * (1.0 + b_.norm()) && pinf < 1e-6) {
        out.diverged = true;
        out.message = "dual objective diverging";
        return out;
      }
      if (mu <= 1e-28) {
        finish_from_best("mu underflow");
        return out;
      }
      if (mu > 0.9 * mu_prev) {
        if (++stall > 15) {
          finish_from_best("no progress");
          return out;
        }
      } else {
        stall = 0;
      }
      mu_prev = mu;

      // Schur complement M_ij = sum_blocks tr(A_i X A_j Z^{-1}).
      Matrix M = Matrix::Zero(m_, m_);
      std::vector<std::vector<Matrix>> U(nb);
      for (std::size_t j = 0; j < nb; ++j) {
        const auto& As = blocks_[j].A;
        U[j].resize(As.size());
        for (std::size_t q = 0; q < As.size(); ++q) {
          U[j][q].noalias() = X[j] * As[q].second * Zinv[j];
        }
        for (std::size_t p = 0; p < As.size(); ++p) {
          for (std::size_t q = 0; q < As.size(); ++q) {
            M(As[p].first, As[q].first) +=
                trace_product(As[p].second, U[j][q]);
          }
        }
      }
      M = 0.5 * (M + M.transpose());

      Eigen::LLT<Matrix> lltM(M);
      double ridge = 1e-13 * (1.0 + M.trace() / std::max<Eigen::Index>(1, m_));
      int tries = 0;
      while (lltM.info() != Eigen::Success && tries < 4) {
        M.diagonal().array() += ridge;
        ridge *= 100.0;
        lltM.compute(M);
        ++tries;
      }
      if (lltM.info() != Eigen::Success) {
        out.message = "Schur complement not positive definite";
        return out;
      }

      // rhs_common_i = A(X Rd Z^{-1})_i + b_i
      Vector rhs_common = b_;
      Vector a_zinv = Vector::Zero(m_);
      for (std::size_t j = 0; j < nb; ++j) {
        const Matrix W = X[j] * Rd[j] * Zinv[j];
        for (const auto& [k, A] : blocks_[j].A) {
          rhs_common[k] += trace_product(A, W);
          a_zinv[k] += trace_product(A, Zinv[j]);
        }
      }

      // Predictor (affine scaling).
      Vector dya = lltM.solve(rhs_common);
      double alpha_pa = 1.0, alpha_da = 1.0;
      for (std::size_t j = 0; j < nb; ++j) {
        dZa[j] = -Rd[j];
        for (const auto& [k, A] : blocks_[j].A) {
          dZa[j].noalias() += dya[k] * A;
        }
        Matrix T = X[j] * dZa[j] * Zinv[j];
        dXa[j] = -X[j] - 0.5 * (T + T.transpose());
        alpha_pa = std::min(alpha_pa, max_step(lltX[j], dXa[j]));
        alpha_da = std::min(alpha_da, max_step(lltZ[j], dZa[j]));
      }
      double mu_aff = 0.0;
      for (std::size_t j = 0; j < nb; ++j) {
        mu_aff += (X[j] + alpha_pa * dXa[j])
                      .cwiseProduct(Z[j] + alpha_da * dZa[j])
                      .sum();
      }
      mu_aff = std::max(mu_aff / static_cast<double>(n_total_), 0.0);
      double sigma = std::pow(mu_aff / mu, 3);
      sigma = std::min(1.0, std::max(1e-10, sigma));
      const double nu = sigma * mu;

      // Corrector.
      Vector rhs = rhs_common + nu * a_zinv;
      for (std::size_t j = 0; j < nb; ++j) {
        const Matrix W = dXa[j] * dZa[j] * Zinv[j];
        for (const auto& [k, A] : blocks_[j].A) {
          rhs[k] -= trace_product(A, W);
        }
      }
      Vector dy = lltM.solve(rhs);
      double alpha_p = 1.0, alpha_d = 1.0;
      const double tau = iter <= 5 ? 0.9 : 0.97;
      for (std::size_t j = 0; j < nb; ++j) {
        dZ[j] = -Rd[j];
        for (const auto& [k, A] : blocks_[j].A) {
          dZ[j].noalias() += dy[k] * A;
        }
        Matrix T = nu * Zinv[j] - dXa[j] * dZa[j] * Zinv[j] -
                   X[j] * dZ[j] * Zinv[j];
        dX[j] = -X[j] + 0.5 * (T + T.transpose());
        alpha_p = std::min(alpha_p, tau * max_step(lltX[j], dX[j]));
        alpha_d = std::min(alpha_d, tau * max_step(lltZ[j], dZ[j]));
      }
      alpha_p = std::min(alpha_p, 1.0);
      alpha_d = std::min(alpha_d, 1.0);
      for (std::size_t j = 0; j < nb; ++j) {
        X[j] += alpha_p * dX[j];
        Z[j] += alpha_d * dZ[j];
      }
      y += alpha_d * dy;
    }
    finish_from_best("iteration limit");
    return out;
  }

 private:
  const std::vector<IBlock>& blocks_;
  Vector b_;
  SolveOptions opts_;
  Eigen::Index m_;
  bool phase1_ = false;
  double init_scale_ = 1.0;
  Eigen::Index n_total_ = 0;
};

struct ScaledForm {
  std::vector<IBlock> blocks;
  Vector var_scale;  // x = var_scale .* y
};

// Blocks in the internal dual form, with per-block and per-variable
// rescaling for conditioning. The feasible set is unchanged.
ScaledForm build_internal(const SdpProblem& problem) {
  const double eps = problem.strictness_epsilon;
  ScaledForm form;
  for (const VectorizedBlock& vb : problem.psd_blocks) {
    IBlock blk;
    blk.C = vb.G0 + eps * Matrix::Identity(vb.G0.rows(), vb.G0.cols());
    for (const auto& [k, G] : vb.slopes) blk.A.emplace_back(k, -G);
    form.blocks.push_back(std::move(blk));
  }
  for (int idx : problem.nonneg_indices) {
    IBlock blk;
    blk.C = Matrix::Constant(1, 1, eps);
    blk.A.emplace_back(idx, Matrix::Identity(1, 1));
    form.blocks.push_back(std::move(blk));
  }
  for (const LinearConstraint& lc : problem.linear_constraints) {
    IBlock blk;
    blk.C = Matrix::Constant(1, 1, -(lc.bound - eps));
    for (Eigen::Index k = 0; k < lc.row.size(); ++k) {
      if (lc.row[k] != 0.0) {
        blk.A.emplace_back(static_cast<int>(k),
                           Matrix::Constant(1, 1, -lc.row[k]));
      }
    }
    form.blocks.push_back(std::move(blk));
  }

  for (IBlock& blk : form.blocks) {
    const double s = 1.0 / std::max(1.0, frob(blk.C));
    blk.C *= s;
    for (auto& [k, A] : blk.A) A *= s;
  }
  Vector scale = Vector::Zero(problem.n_vars);
  for (const IBlock& blk : form.blocks) {
    for (const auto& [k, A] : blk.A) {
      scale[k] = std::max(scale[k], A.cwiseAbs().maxCoeff());
    }
  }
  form.var_scale = Vector::Ones(problem.n_vars);
  for (Eigen::Index k = 0; k < scale.size(); ++k) {
    if (scale[k] > 0.0) {
      form.var_scale[k] =
          std::min(1e6, std::max(1e-6, 1.0 / scale[k]));
    }
  }
  for (IBlock& blk : form.blocks) {
    for (auto& [k, A] : blk.A) A *= form.var_scale[k];
  }
  return form;
}

IpmOutcome run_with_restarts(const std::vector<IBlock>& blocks,
                             const Vector& b, const SolveOptions& opts,
                             bool phase1) {
  IpmOutcome out;
  int total_iterations = 0;
  for (double scale : {1.0, 1e2, 1e4}) {
    Ipm ipm(blocks, b, opts, phase1, scale);
    out = ipm.run();
    total_iterations += out.iterations;
    if (out.converged || out.diverged) break;
  }
  out.iterations = total_iterations;
  return out;
}

// Phase-I margin problem: minimize t with every block shifted by t I and
// t capped below, always strictly feasible.
IpmOutcome solve_phase1(const ScaledForm& form, int n_vars,
                        const SolveOptions& options) {
  std::vector<IBlock> blocks = form.blocks;
  for (IBlock& blk : blocks) {
    blk.A.emplace_back(n_vars, Matrix::Identity(blk.n(), blk.n()));
  }
  IBlock cap;
  cap.C = Matrix::Constant(1, 1, -1.0);
  cap.A.emplace_back(n_vars, Matrix::Identity(1, 1));
  blocks.push_back(std::move(cap));
  Vector b = Vector::Zero(n_vars + 1);
  b[n_vars] = -1.0;
  SolveOptions opts = options;
  opts.tol = std::max(options.tol, 1e-9);
  return run_with_restarts(blocks, b, opts, /*phase1=*/true);
}

}  // namespace

SolveResult check_feasibility(const SdpProblem& problem,
                              const SolveOptions& options) {
  SolveResult res;
  const ScaledForm form = build_internal(problem);
  if (problem.n_vars == 0) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const IBlock& blk : form.blocks) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(blk.C,
                                                Eigen::EigenvaluesOnly);
      worst = std::max(worst, eig.eigenvalues().maxCoeff());
    }
    res.feasibility_margin = worst;
    res.status =
        worst <= 0.0 ? SolveStatus::Optimal : SolveStatus::Infeasible;
    res.x = Vector::Zero(0);
    return res;
  }
  const IpmOutcome phase1 = solve_phase1(form, problem.n_vars, options);
  res.iterations = phase1.iterations;
  if (!phase1.converged && !phase1.diverged) {
    res.status = SolveStatus::NumericalFailure;
    res.message = "phase-1: " + phase1.message;
    return res;
  }
  const double margin = phase1.margin_certified ? phase1.margin
                        : phase1.converged     ? phase1.y[problem.n_vars]
                                               : -1.0;
  res.feasibility_margin = margin;
  res.x = form.var_scale.cwiseProduct(phase1.y.head(problem.n_vars));
  res.status =
      margin < -1e-7 ? SolveStatus::Optimal : SolveStatus::Infeasible;
  if (res.status == SolveStatus::Infeasible) {
    res.message = "phase-1 margin " + std::to_string(margin);
  }
  return res;
}

SolveResult solve(const SdpProblem& problem, const SolveOptions& options) {
  SolveResult res;
  if (problem.objective.size() != problem.n_vars) {
    throw std::invalid_argument("solve: objective length != n_vars");
  }
  const ScaledForm form = build_internal(problem);

  if (problem.n_vars == 0) {
    return check_feasibility(problem, options);
  }

  const IpmOutcome phase1 = solve_phase1(form, problem.n_vars, options);
  if (phase1.converged || phase1.diverged) {
    const double margin = phase1.margin_certified ? phase1.margin
                          : phase1.converged      ? phase1.y[problem.n_vars]
                                                  : -1.0;
    res.feasibility_margin = margin;
    if (margin >= -1e-7) {
      res.status = SolveStatus::Infeasible;
      res.iterations = phase1.iterations;
      res.message = "infeasible: phase-1 margin " + std::to_string(margin);
      res.x = Vector::Zero(problem.n_vars);
      return res;
    }
  } else {
    res.feasibility_margin = std::numeric_limits<double>::quiet_NaN();
  }

  Vector b = Vector::Zero(problem.n_vars);
  for (Eigen::Index k = 0; k < b.size(); ++k) {
    b[k] = -problem.objective[k] * form.var_scale[k];
  }
  const IpmOutcome main =
      run_with_restarts(form.blocks, b, options, /*phase1=*/false);
  res.iterations += main.iterations;
  res.rel_gap = main.rel_gap;
  res.primal_infeas = main.primal_infeas;
  res.dual_infeas = main.dual_infeas;
  if (main.diverged) {
    res.status = SolveStatus::Unbounded;
    res.message = main.message;
    return res;
  }
  if (!main.converged) {
    res.status = SolveStatus::NumericalFailure;
    res.message = main.message;
    return res;
  }
  res.x = form.var_scale.cwiseProduct(main.y);
  res.objective = problem.objective.dot(res.x);

  // Contract check on the original data.
  double worst = -std::numeric_limits<double>::infinity();
  for (const VectorizedBlock& vb : problem.psd_blocks) {
    worst = std::max(worst, vb.max_eigenvalue(res.x));
  }
  for (int idx : problem.nonneg_indices) {
    worst = std::max(worst, problem.strictness_epsilon - res.x[idx]);
  }
  for (const LinearConstraint& lc : problem.linear_constraints) {
    worst = std::max(worst, lc.row.dot(res.x) - lc.bound);
  }
  if (worst > 1e-6) {
    res.status = SolveStatus::NumericalFailure;
    res.message =
        "converged iterate violates constraints by " + std::to_string(worst);
    return res;
  }
  res.status = SolveStatus::Optimal;
  return res;
}

}  // namespace lpvp
