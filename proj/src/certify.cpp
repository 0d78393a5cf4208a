#include "lpvp/certify.hpp"

#include "lpvp/norms.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lpvp {

CertifyReport certify(const SynthesisResult& result, const LpvPlant& plant,
                      int interior_samples, std::uint64_t seed) {
  if (result.status != SolveStatus::Optimal) {
    throw std::invalid_argument("certify: result is not optimal");
  }
  plant.validate();

  CertifyReport report;
  report.gamma = result.gamma;

  const Vector s_n = result.noise_scale();
  const ObserverErrorSystem sys = closed_loop(plant, result.L, s_n);

  std::vector<std::pair<Vector, bool>> points;
  for (const Vector& v : plant.box.vertices()) points.emplace_back(v, true);
  for (const Vector& v : sample_box(plant.box, interior_samples, seed)) {
    points.emplace_back(v, false);
  }

  report.hurwitz_pass = true;
  report.norm_pass = true;
  report.worst_abscissa = -std::numeric_limits<double>::infinity();
  report.worst_norm = 0.0;
  for (const auto& [rho, at_vertex] : points) {
    CertifyRow row;
    row.rho = rho;
    row.at_vertex = at_vertex;
    Matrix A, B;
    sys.frozen(rho, A, B);
    row.abscissa = spectral_abscissa(A);
    row.hurwitz_ok = row.abscissa < 0.0;
    if (row.hurwitz_ok) {
      row.frozen_norm = result.norm == NormKind::H2
                            ? h2_norm(A, B, sys.C_z)
                            : hinf_norm(A, B, sys.C_z,
                                        Matrix::Zero(plant.n_z,
                                                     plant.n_d + plant.n_y));
      row.norm_ok =
          row.frozen_norm <= result.gamma * (1.0 + report.norm_tolerance);
    } else {
      row.frozen_norm = std::numeric_limits<double>::infinity();
      row.norm_ok = false;
    }
    report.worst_abscissa = std::max(report.worst_abscissa, row.abscissa);
    report.worst_norm = std::max(report.worst_norm, row.frozen_norm);
    report.hurwitz_pass = report.hurwitz_pass && row.hurwitz_ok;
    report.norm_pass = report.norm_pass && row.norm_ok;
    report.rows.push_back(std::move(row));
  }

  report.residual_pass = true;
  report.worst_residual = -std::numeric_limits<double>::infinity();
  for (double r : result.lmi_residuals) {
    report.worst_residual = std::max(report.worst_residual, r);
    if (r > -0.5 * result.eps) report.residual_pass = false;
  }

  report.pass =
      report.hurwitz_pass && report.norm_pass && report.residual_pass;
  return report;
}

std::string CertifyReport::summary() const {
  std::ostringstream os;
  int vertex_count = 0, interior_count = 0;
  for (const auto& row : rows) (row.at_vertex ? vertex_count : interior_count)++;
  os << "certification (" << vertex_count << " vertices, " << interior_count
     << " interior samples, frozen-parameter checks)\n";
  os << "  hurwitz:   " << (hurwitz_pass ? "pass" : "FAIL")
     << " (worst abscissa " << worst_abscissa << ")\n";
  os << "  norm<=g:   " << (norm_pass ? "pass" : "FAIL") << " (worst "
     << worst_norm << " vs gamma " << gamma << ", tol " << norm_tolerance
     << ")\n";
  os << "  residuals: " << (residual_pass ? "pass" : "FAIL") << " (worst "
     << worst_residual << ")\n";
  if (!pass) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (!row.hurwitz_ok || !row.norm_ok) {
        os << "  failing rho[" << i << "]"
           << (row.at_vertex ? " (vertex): " : " (interior): ")
           << row.rho.transpose() << "  abscissa " << row.abscissa
           << "  norm " << row.frozen_norm << "\n";
      }
    }
  }
  os << "  overall:   " << (pass ? "PASS" : "FAIL");
  return os.str();
}

}  // namespace lpvp
