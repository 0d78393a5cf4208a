#include "lpvp/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace lpvp::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("matrix json: expected non-empty array");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j.at(0).size();
  Matrix M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j.at(i).size() != cols) {
      throw std::invalid_argument("matrix json: ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      M(i, c) = j.at(i).at(c).get<double>();
    }
  }
  return M;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const json& j) {
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

json affine_to_json(const AffineMatrixFunction& f) {
  json out;
  out["constant"] = matrix_to_json(f.constant());
  json basis = json::array();
  for (const auto& [idx, coeff] : f.basis()) {
    basis.push_back({{"index", idx}, {"matrix", matrix_to_json(coeff)}});
  }
  out["basis"] = std::move(basis);
  return out;
}

AffineMatrixFunction affine_from_json(const json& j) {
  AffineMatrixFunction f(matrix_from_json(j.at("constant")));
  for (const auto& entry : j.at("basis")) {
    f.add_basis(entry.at("index").get<int>(),
                matrix_from_json(entry.at("matrix")));
  }
  return f;
}

json plant_to_json(const LpvPlant& plant) {
  json out;
  out["n_x"] = plant.n_x;
  out["n_y"] = plant.n_y;
  out["n_d"] = plant.n_d;
  out["n_z"] = plant.n_z;
  out["n_rho"] = plant.n_rho;
  out["A"] = affine_to_json(plant.A);
  out["b"] = affine_to_json(plant.b);
  out["B_d"] = affine_to_json(plant.B_d);
  out["C_y"] = affine_to_json(plant.C_y);
  out["d"] = affine_to_json(plant.d);
  out["D_d"] = affine_to_json(plant.D_d);
  out["C_z"] = affine_to_json(plant.C_z);
  out["S_d"] = vector_to_json(plant.S_d_diag);
  out["box"] = {{"lower", vector_to_json(plant.box.lower)},
                {"upper", vector_to_json(plant.box.upper)}};
  return out;
}

LpvPlant plant_from_json(const json& j) {
  LpvPlant plant;
  plant.n_x = j.at("n_x").get<int>();
  plant.n_y = j.at("n_y").get<int>();
  plant.n_d = j.at("n_d").get<int>();
  plant.n_z = j.at("n_z").get<int>();
  plant.n_rho = j.at("n_rho").get<int>();
  plant.A = affine_from_json(j.at("A"));
  plant.b = affine_from_json(j.at("b"));
  plant.B_d = affine_from_json(j.at("B_d"));
  plant.C_y = affine_from_json(j.at("C_y"));
  plant.d = affine_from_json(j.at("d"));
  plant.D_d = affine_from_json(j.at("D_d"));
  plant.C_z = affine_from_json(j.at("C_z"));
  plant.S_d_diag = vector_from_json(j.at("S_d"));
  plant.box = ParameterBox(vector_from_json(j.at("box").at("lower")),
                           vector_from_json(j.at("box").at("upper")));
  plant.validate();
  return plant;
}

LpvPlant load_plant(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plant file: " + path);
  json j;
  in >> j;
  return plant_from_json(j);
}

void save_plant(const LpvPlant& plant, const std::string& path) {
  write_text(plant_to_json(plant).dump(2) + "\n", path);
}

json cr3bp_config_to_json(const cr3bp::Cr3bpConfig& config) {
  json out;
  out["pi2"] = config.pi2;
  out["initial_state"] = vector_to_json(Vector(config.initial_state));
  out["t_final"] = config.t_final;
  out["dt"] = config.dt;
  out["box_margin"] = config.box_margin;
  out["disturbance_scale"] = config.disturbance_scale;
  return out;
}

cr3bp::Cr3bpConfig cr3bp_config_from_json(const json& j) {
  cr3bp::Cr3bpConfig config;
  if (j.contains("m1") || j.contains("m2")) {
    config.pi2 = cr3bp::mass_ratio(j.at("m1").get<double>(),
                                   j.at("m2").get<double>());
  }
  if (j.contains("pi2")) config.pi2 = j.at("pi2").get<double>();
  if (j.contains("initial_state")) {
    const Vector v = vector_from_json(j.at("initial_state"));
    if (v.size() != 4) {
      throw std::invalid_argument("cr3bp config: initial_state needs 4 entries");
    }
    config.initial_state = cr3bp::State(v);
  }
  if (j.contains("t_final")) config.t_final = j.at("t_final").get<double>();
  if (j.contains("dt")) config.dt = j.at("dt").get<double>();
  if (j.contains("box_margin")) {
    config.box_margin = j.at("box_margin").get<double>();
  }
  if (j.contains("disturbance_scale")) {
    config.disturbance_scale = j.at("disturbance_scale").get<double>();
  }
  config.validate();
  return config;
}

namespace {

NormKind norm_from_string(const std::string& s) {
  if (s == "h2") return NormKind::H2;
  if (s == "hinf") return NormKind::Hinf;
  throw std::invalid_argument("unknown norm: " + s);
}

NormOrder order_from_string(const std::string& s) {
  if (s == "1") return NormOrder::L1;
  if (s == "2") return NormOrder::L2;
  if (s == "inf") return NormOrder::Linf;
  throw std::invalid_argument("unknown norm order: " + s);
}

std::string order_to_string(NormOrder p) {
  switch (p) {
    case NormOrder::L1: return "1";
    case NormOrder::L2: return "2";
    case NormOrder::Linf: return "inf";
  }
  return "1";
}

PrecisionPolicy policy_from_string(const std::string& s) {
  if (s == "sqrt_beta") return PrecisionPolicy::SqrtBeta;
  if (s == "sqrt_beta_over_gamma") return PrecisionPolicy::SqrtBetaOverGamma;
  if (s == "inv_sqrt_beta") return PrecisionPolicy::InvSqrtBeta;
  throw std::invalid_argument("unknown precision policy: " + s);
}

}  // namespace

LpvPlant RunConfig::make_plant() const {
  if (plant_source == "cr3bp") return cr3bp::build_plant(cr3bp);
  if (plant_source == "file") return load_plant(plant_path);
  throw std::invalid_argument("unknown plant source: " + plant_source);
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  if (j.contains("plant")) {
    const json& p = j.at("plant");
    if (p.contains("source")) c.plant_source = p.at("source").get<std::string>();
    if (p.contains("path")) c.plant_path = p.at("path").get<std::string>();
  }
  if (j.contains("cr3bp")) c.cr3bp = cr3bp_config_from_json(j.at("cr3bp"));
  if (j.contains("synthesis")) {
    const json& s = j.at("synthesis");
    if (s.contains("norm")) c.norm = norm_from_string(s.at("norm"));
    if (s.contains("gamma")) c.gamma = s.at("gamma").get<double>();
    if (s.contains("gammas")) {
      c.gammas = s.at("gammas").get<std::vector<double>>();
    }
    if (s.contains("p")) {
      c.p = order_from_string(s.at("p").is_number()
                                  ? std::to_string(s.at("p").get<int>())
                                  : s.at("p").get<std::string>());
    }
    if (s.contains("eps")) c.eps = s.at("eps").get<double>();
    if (s.contains("policy")) c.policy = policy_from_string(s.at("policy"));
    if (s.contains("solver_tol")) {
      c.solver_tol = s.at("solver_tol").get<double>();
    }
  }
  if (j.contains("simulation")) {
    const json& s = j.at("simulation");
    if (s.contains("noise_kind")) {
      const std::string k = s.at("noise_kind").get<std::string>();
      if (k == "angle") {
        c.noise_kind = NoiseKind::AngleDegrees;
      } else if (k == "sigma") {
        c.noise_kind = NoiseKind::PerChannelSigma;
      } else {
        throw std::invalid_argument("unknown noise kind: " + k);
      }
    }
    if (s.contains("noise_deg")) c.noise_deg = s.at("noise_deg").get<double>();
    if (s.contains("noise_dist")) {
      const std::string d = s.at("noise_dist").get<std::string>();
      if (d == "uniform") {
        c.noise_dist = NoiseDist::Uniform;
      } else if (d == "gaussian") {
        c.noise_dist = NoiseDist::Gaussian;
      } else {
        throw std::invalid_argument("unknown noise dist: " + d);
      }
    }
    if (s.contains("seed")) c.seed = s.at("seed").get<std::uint64_t>();
    if (s.contains("x0_hat_offset")) {
      c.x0_hat_offset = s.at("x0_hat_offset").get<double>();
    }
    if (s.contains("schedule")) {
      const std::string sch = s.at("schedule").get<std::string>();
      if (sch == "estimate") {
        c.schedule = SchedulePolicy::FromEstimate;
      } else if (sch == "truth") {
        c.schedule = SchedulePolicy::FromTruth;
      } else {
        throw std::invalid_argument("unknown schedule: " + sch);
      }
    }
  }
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return config_from_json(j);
}

json result_to_json(const SynthesisResult& result, const LpvPlant& plant,
                    const std::optional<cr3bp::Cr3bpConfig>& config) {
  json out;
  out["status"] = to_string(result.status);
  out["norm"] = to_string(result.norm);
  out["p"] = order_to_string(result.p);
  out["policy"] = to_string(result.policy);
  out["gamma"] = result.gamma;
  out["eps"] = result.eps;
  out["objective"] = result.objective_value;
  if (result.status == SolveStatus::Optimal) {
    out["L"] = matrix_to_json(result.L);
    out["X"] = matrix_to_json(result.X);
    if (result.Q.size() > 0) out["Q"] = matrix_to_json(result.Q);
    out["beta"] = vector_to_json(result.beta);
    out["kappa"] = vector_to_json(result.kappa);
    out["residuals"] = result.lmi_residuals;
    out["residual_labels"] = result.residual_labels;
  }
  if (std::isfinite(result.advisory_min_gamma)) {
    out["advisory_min_gamma"] = result.advisory_min_gamma;
  }
  if (!result.message.empty()) out["message"] = result.message;
  out["plant"] = plant_to_json(plant);
  if (config) out["cr3bp"] = cr3bp_config_to_json(*config);
  return out;
}

ResultDocument result_from_json(const json& j) {
  ResultDocument doc;
  SynthesisResult& r = doc.result;
  const std::string status = j.at("status").get<std::string>();
  if (status == "optimal") {
    r.status = SolveStatus::Optimal;
  } else if (status == "infeasible") {
    r.status = SolveStatus::Infeasible;
  } else if (status == "unbounded") {
    r.status = SolveStatus::Unbounded;
  } else {
    r.status = SolveStatus::NumericalFailure;
  }
  r.norm = norm_from_string(j.at("norm").get<std::string>());
  r.p = order_from_string(j.at("p").get<std::string>());
  r.policy = policy_from_string(j.at("policy").get<std::string>());
  r.gamma = j.at("gamma").get<double>();
  r.eps = j.at("eps").get<double>();
  r.objective_value = j.at("objective").get<double>();
  if (r.status == SolveStatus::Optimal) {
    r.L = matrix_from_json(j.at("L"));
    r.X = matrix_from_json(j.at("X"));
    if (j.contains("Q")) r.Q = matrix_from_json(j.at("Q"));
    r.beta = vector_from_json(j.at("beta"));
    r.kappa = vector_from_json(j.at("kappa"));
    if (j.contains("residuals")) {
      r.lmi_residuals = j.at("residuals").get<std::vector<double>>();
      r.residual_labels =
          j.at("residual_labels").get<std::vector<std::string>>();
    }
  }
  if (j.contains("advisory_min_gamma")) {
    r.advisory_min_gamma = j.at("advisory_min_gamma").get<double>();
  }
  doc.plant = plant_from_json(j.at("plant"));
  if (j.contains("cr3bp")) {
    doc.cr3bp = cr3bp_config_from_json(j.at("cr3bp"));
  }
  return doc;
}

ResultDocument load_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open result file: " + path);
  json j;
  in >> j;
  return result_from_json(j);
}

void save_result(const SynthesisResult& result, const LpvPlant& plant,
                 const std::optional<cr3bp::Cr3bpConfig>& config,
                 const std::string& path) {
  write_text(result_to_json(result, plant, config).dump(2) + "\n", path);
}

void write_trace_csv(const SimulationTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file: " + path);
  out << "t,x1,x2,x3,x4,xhat1,xhat2,xhat3,xhat4,"
         "y1,y2,y3,y4,y5,y6,n1,n2,n3,n4,n5,n6,eps1,eps2\n";
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    out << format_double(trace.times[k]);
    for (int i = 0; i < 4; ++i) out << ',' << format_double(trace.truth[k][i]);
    for (int i = 0; i < 4; ++i) {
      out << ',' << format_double(trace.estimate[k][i]);
    }
    for (int i = 0; i < 6; ++i) {
      out << ',' << format_double(trace.measured[k][i]);
    }
    for (int i = 0; i < 6; ++i) out << ',' << format_double(trace.noise[k][i]);
    for (int i = 0; i < 2; ++i) {
      out << ',' << format_double(trace.error_z[k][i]);
    }
    out << '\n';
  }
}

void write_text(const std::string& content, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

}  // namespace lpvp::io
