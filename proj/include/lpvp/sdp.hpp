#pragma once

#include "lpvp/lmi.hpp"

#include <string>

namespace lpvp {

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(SolveStatus status);

struct SolveOptions {
  double tol = 1e-9;        // relative duality-gap target
  double feas_tol = 1e-8;   // primal/dual feasibility target
  int max_iterations = 250;
  bool verbose = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  Vector x;
  double objective = 0.0;
  int iterations = 0;
  double rel_gap = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  /// Phase-I margin t*: the problem is strictly feasible iff t* < 0.
  double feasibility_margin = 0.0;
  std::string message;
};

/// Minimizes objective^T x subject to every PSD block G0 + sum x_k G_k
/// <= -eps I, x_i >= eps on nonneg indices, and row^T x <= bound - eps.
///
/// Primal-dual interior point method (HKM directions, Mehrotra
/// predictor-corrector) on the block-diagonal dual standard form. A
/// phase-I margin problem classifies feasibility before the main solve.
SolveResult solve(const SdpProblem& problem, const SolveOptions& options = {});

/// Feasibility classification only (the phase-I solve).
SolveResult check_feasibility(const SdpProblem& problem,
                              const SolveOptions& options = {});

}  // namespace lpvp
