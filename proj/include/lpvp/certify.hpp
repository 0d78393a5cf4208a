#pragma once

#include "lpvp/plant.hpp"
#include "lpvp/synthesis.hpp"

#include <string>
#include <vector>

namespace lpvp {

struct CertifyRow {
  Vector rho;
  bool at_vertex = false;
  double abscissa = 0.0;     // max real part of eig(A + L C_y)
  double frozen_norm = 0.0;  // ||G_wbar->eps|| at this rho
  bool hurwitz_ok = false;
  bool norm_ok = false;
};

/// A-posteriori validation of a synthesis result: Hurwitz closed loop and
/// frozen-parameter norm within gamma at every vertex and interior sample,
/// plus the certificate residual check. Checks are labelled
/// frozen-parameter: the time-varying guarantee is carried by the
/// quadratic certificate whose residuals are re-checked here.
struct CertifyReport {
  bool pass = false;
  bool hurwitz_pass = false;
  bool norm_pass = false;
  bool residual_pass = false;
  double worst_abscissa = 0.0;
  double worst_norm = 0.0;
  double worst_residual = 0.0;  // max block eigenvalue, want <= -eps/2
  double gamma = 0.0;
  double norm_tolerance = 1e-4;
  std::vector<CertifyRow> rows;

  std::string summary() const;
};

CertifyReport certify(const SynthesisResult& result, const LpvPlant& plant,
                      int interior_samples = 100, std::uint64_t seed = 2024);

}  // namespace lpvp
