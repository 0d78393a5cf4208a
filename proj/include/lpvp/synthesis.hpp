#pragma once

#include "lpvp/lmi.hpp"
#include "lpvp/plant.hpp"
#include "lpvp/sdp.hpp"

#include <limits>
#include <string>
#include <vector>

namespace lpvp {

enum class NormKind { H2, Hinf };
const char* to_string(NormKind norm);

/// Mapping from the LMI variable beta to the reported sensor precision
/// kappa. The default SqrtBeta (kappa_i = sqrt(beta_i), physical noise
/// magnitude 1/kappa_i) is the one the a-posteriori norm oracle certifies
/// as tight for both norms; the alternatives are kept selectable for the
/// same oracle to reject.
enum class PrecisionPolicy { SqrtBeta, SqrtBetaOverGamma, InvSqrtBeta };
const char* to_string(PrecisionPolicy policy);

Vector kappa_from_beta(const Vector& beta, double gamma,
                       PrecisionPolicy policy);

/// Diagonal of S_n: the magnitude of the physical noise each unit-norm
/// channel carries under the policy.
Vector noise_scale_from_beta(const Vector& beta, double gamma,
                             PrecisionPolicy policy);

struct SynthesisRequest {
  LpvPlant plant;
  NormKind norm = NormKind::H2;
  double gamma = 1.0;
  NormOrder p = NormOrder::L1;
  double eps = 1e-8;
  /// Enforcement points; empty means all box vertices.
  std::vector<Vector> vertex_set;
  PrecisionPolicy policy = PrecisionPolicy::SqrtBeta;
  /// Non-empty freezes beta (feasibility family in X, Y only; the solve
  /// then minimizes trace(X) as a conditioning objective).
  Vector fixed_beta;
  SolveOptions solver;
  bool advisory_on_infeasible = true;

  void validate() const;
};

struct SynthesisResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  NormKind norm = NormKind::H2;
  NormOrder p = NormOrder::L1;
  PrecisionPolicy policy = PrecisionPolicy::SqrtBeta;
  double gamma = 0.0;
  double eps = 1e-8;

  Matrix L;     // n_x x n_y observer gain, L = X^{-1} Y
  Matrix X;     // Lyapunov certificate
  Matrix Q;     // H2 trace bound certificate (empty for Hinf)
  Vector beta;
  Vector kappa;
  double objective_value = 0.0;

  /// Max eigenvalue of every PSD block re-evaluated at the solution,
  /// aligned with residual_labels; linear slacks appended.
  std::vector<double> lmi_residuals;
  std::vector<std::string> residual_labels;

  /// Smallest feasible gamma found by bisection when the request failed.
  double advisory_min_gamma = std::numeric_limits<double>::quiet_NaN();
  std::string message;

  Vector noise_scale() const;
  /// Channels whose beta exceeds rel_tol * max(beta).
  std::vector<int> active_channels(double rel_tol = 1e-6) const;
};

SynthesisResult synth_h2(const SynthesisRequest& req);
SynthesisResult synth_hinf(const SynthesisRequest& req);
SynthesisResult synthesize(const SynthesisRequest& req);

/// One result per gamma; failures are recorded per entry, not thrown.
std::vector<SynthesisResult> sweep_gamma(const LpvPlant& plant, NormKind norm,
                                         const std::vector<double>& gammas,
                                         NormOrder p = NormOrder::L1,
                                         double eps = 1e-8,
                                         PrecisionPolicy policy =
                                             PrecisionPolicy::SqrtBeta,
                                         const SolveOptions& solver = {});

/// Is the synthesis LMI family feasible at this gamma?
bool gamma_feasible(const LpvPlant& plant, NormKind norm, double gamma,
                    double eps = 1e-8, const Vector& fixed_beta = {},
                    const SolveOptions& solver = {});

/// Bisects for the smallest feasible gamma in [lo, hi]. Returns NaN when
/// hi itself is infeasible.
double min_feasible_gamma(const LpvPlant& plant, NormKind norm, double lo,
                          double hi, int iterations = 20,
                          double eps = 1e-8, const Vector& fixed_beta = {},
                          const SolveOptions& solver = {});

/// Allowable angle noise recovered from the sine- and cosine-channel
/// precisions, in degrees.
struct NoiseAngle {
  double from_sin_deg = 0.0;
  double from_cos_deg = 0.0;
  double discrepancy_deg = 0.0;
};

NoiseAngle noise_angle(double kappa_sin, double kappa_cos);

}  // namespace lpvp
