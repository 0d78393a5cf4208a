#pragma once

#include "lpvp/certify.hpp"
#include "lpvp/cr3bp.hpp"
#include "lpvp/simulate.hpp"
#include "lpvp/synthesis.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace lpvp::io {

using json = nlohmann::json;

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double v);

json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const json& j);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);

json affine_to_json(const AffineMatrixFunction& f);
AffineMatrixFunction affine_from_json(const json& j);

json plant_to_json(const LpvPlant& plant);
LpvPlant plant_from_json(const json& j);
LpvPlant load_plant(const std::string& path);
void save_plant(const LpvPlant& plant, const std::string& path);

json cr3bp_config_to_json(const cr3bp::Cr3bpConfig& config);
cr3bp::Cr3bpConfig cr3bp_config_from_json(const json& j);

/// Full experiment manifest: plant source, CR3BP settings, synthesis and
/// simulation settings, output directory. CLI flags override file values.
struct RunConfig {
  std::string plant_source = "cr3bp";  // "cr3bp" | "file"
  std::string plant_path;
  cr3bp::Cr3bpConfig cr3bp;

  NormKind norm = NormKind::H2;
  double gamma = 0.1;
  std::vector<double> gammas;
  NormOrder p = NormOrder::L1;
  double eps = 1e-8;
  PrecisionPolicy policy = PrecisionPolicy::SqrtBeta;
  double solver_tol = 1e-9;

  NoiseKind noise_kind = NoiseKind::AngleDegrees;
  double noise_deg = -1.0;  // negative: derive from the result's kappa
  NoiseDist noise_dist = NoiseDist::Uniform;
  std::uint64_t seed = 1;
  double x0_hat_offset = 0.1;
  SchedulePolicy schedule = SchedulePolicy::FromEstimate;

  std::string out_dir = "out";

  LpvPlant make_plant() const;
};

RunConfig config_from_json(const json& j);
RunConfig load_config(const std::string& path);

/// Result document: synthesis output plus everything needed to re-verify
/// and simulate it (plant and, for the builtin model, the CR3BP settings).
json result_to_json(const SynthesisResult& result, const LpvPlant& plant,
                    const std::optional<cr3bp::Cr3bpConfig>& config);

struct ResultDocument {
  SynthesisResult result;
  LpvPlant plant;
  std::optional<cr3bp::Cr3bpConfig> cr3bp;
};

ResultDocument result_from_json(const json& j);
ResultDocument load_result(const std::string& path);
void save_result(const SynthesisResult& result, const LpvPlant& plant,
                 const std::optional<cr3bp::Cr3bpConfig>& config,
                 const std::string& path);

/// Header: t,x1..x4,xhat1..xhat4,y1..y6,n1..n6,eps1,eps2
void write_trace_csv(const SimulationTrace& trace, const std::string& path);

void write_text(const std::string& content, const std::string& path);

}  // namespace lpvp::io
