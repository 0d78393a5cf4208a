#include "lpvp/cli.hpp"

#include "lpvp/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace lpvp {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitCertFail = 3;

const char* kChannelNames[6] = {"sin_t1", "cos_t1", "sin_t2",
                                "cos_t2", "r13sq",  "r23sq"};

struct CliOverrides {
  std::string config_path;
  std::string norm;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  std::string gammas;
  std::string p;
  std::int64_t seed = -1;
  double noise_deg = std::numeric_limits<double>::quiet_NaN();
  std::string out_dir;
  std::string result_path;
};

io::RunConfig assemble_config(const CliOverrides& o) {
  io::RunConfig config;
  if (!o.config_path.empty()) config = io::load_config(o.config_path);
  if (!o.norm.empty()) {
    if (o.norm == "h2") {
      config.norm = NormKind::H2;
    } else if (o.norm == "hinf") {
      config.norm = NormKind::Hinf;
    } else {
      throw std::invalid_argument("unknown norm: " + o.norm);
    }
  }
  if (std::isfinite(o.gamma)) config.gamma = o.gamma;
  if (!o.gammas.empty()) {
    config.gammas.clear();
    std::stringstream ss(o.gammas);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) config.gammas.push_back(std::stod(item));
    }
  }
  if (!o.p.empty()) {
    if (o.p == "1") {
      config.p = NormOrder::L1;
    } else if (o.p == "2") {
      config.p = NormOrder::L2;
    } else if (o.p == "inf") {
      config.p = NormOrder::Linf;
    } else {
      throw std::invalid_argument("p must be one of {1,2,inf}");
    }
  }
  if (o.seed >= 0) config.seed = static_cast<std::uint64_t>(o.seed);
  if (std::isfinite(o.noise_deg)) config.noise_deg = o.noise_deg;
  if (!o.out_dir.empty()) config.out_dir = o.out_dir;
  if (const char* tol = std::getenv("LPVP_SOLVER_TOL")) {
    config.solver_tol = std::stod(tol);
  }
  return config;
}

SynthesisRequest make_request(const io::RunConfig& config,
                              const LpvPlant& plant, double gamma) {
  SynthesisRequest req;
  req.plant = plant;
  req.norm = config.norm;
  req.gamma = gamma;
  req.p = config.p;
  req.eps = config.eps;
  req.policy = config.policy;
  req.solver.tol = config.solver_tol;
  return req;
}

std::string channel_name(const LpvPlant& plant, int i) {
  if (plant.n_y == 6) return kChannelNames[i];
  return "y" + std::to_string(i + 1);
}

void print_precision_table(std::ostream& out, const LpvPlant& plant,
                           const SynthesisResult& result) {
  const auto active = result.active_channels();
  auto is_active = [&](int i) {
    return std::find(active.begin(), active.end(), i) != active.end();
  };
  out << "  channel      beta            kappa          active\n";
  for (int i = 0; i < plant.n_y; ++i) {
    std::ostringstream line;
    line << "  " << std::left << std::setw(11) << channel_name(plant, i)
         << std::scientific << std::setprecision(4) << std::setw(16)
         << result.beta[i] << std::setw(15) << result.kappa[i]
         << (is_active(i) ? "yes" : "-");
    out << line.str() << "\n";
  }
}

std::optional<NoiseAngle> try_noise_angle(const SynthesisResult& result) {
  if (result.beta.size() < 2) return std::nullopt;
  try {
    return noise_angle(result.kappa[0], result.kappa[1]);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void print_summary(std::ostream& out, const LpvPlant& plant,
                   const SynthesisResult& result) {
  out << "status: " << to_string(result.status) << "\n";
  out << "norm: " << to_string(result.norm) << "  gamma: " << result.gamma
      << "  objective: " << result.objective_value << "\n";
  if (result.status != SolveStatus::Optimal) {
    if (std::isfinite(result.advisory_min_gamma)) {
      out << "advisory: smallest feasible gamma about "
          << result.advisory_min_gamma << "\n";
    }
    if (!result.message.empty()) out << "detail: " << result.message << "\n";
    return;
  }
  print_precision_table(out, plant, result);
  if (const auto angle = try_noise_angle(result)) {
    out << "  theta1 noise: " << angle->from_sin_deg << " deg (sin), "
        << angle->from_cos_deg << " deg (cos), discrepancy "
        << angle->discrepancy_deg << " deg\n";
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (double r : result.lmi_residuals) worst = std::max(worst, r);
  out << "  worst LMI residual: " << worst << "\n";
}

std::optional<cr3bp::Cr3bpConfig> builtin_config(const io::RunConfig& config) {
  if (config.plant_source == "cr3bp") return config.cr3bp;
  return std::nullopt;
}

int cmd_synth(const io::RunConfig& config, std::ostream& out,
              std::ostream& err) {
  if (!(config.gamma > 0.0)) {
    err << "error: gamma must be positive\n";
    return kExitError;
  }
  const LpvPlant plant = config.make_plant();
  const SynthesisResult result =
      synthesize(make_request(config, plant, config.gamma));
  print_summary(out, plant, result);
  const std::string path = (std::filesystem::path(config.out_dir) /
                            ("result_" + std::string(to_string(config.norm)) +
                             ".json"))
                               .string();
  io::save_result(result, plant, builtin_config(config), path);
  out << "result written to " << path << "\n";
  if (result.status == SolveStatus::Optimal) return kExitOk;
  if (result.status == SolveStatus::Infeasible) return kExitInfeasible;
  err << "error: solver failed: " << result.message << "\n";
  return kExitError;
}

int cmd_sweep(const io::RunConfig& config, std::ostream& out,
              std::ostream& err) {
  if (config.gammas.empty()) {
    err << "error: sweep requires a non-empty gamma list\n";
    return kExitError;
  }
  std::vector<double> gammas = config.gammas;
  for (double g : gammas) {
    if (!(g > 0.0)) {
      err << "error: gamma must be positive\n";
      return kExitError;
    }
  }
  const LpvPlant plant = config.make_plant();
  SolveOptions solver;
  solver.tol = config.solver_tol;
  const auto results = sweep_gamma(plant, config.norm, gammas, config.p,
                                   config.eps, config.policy, solver);

  std::ostringstream csv;
  csv << "gamma,status";
  for (int i = 0; i < plant.n_y; ++i) csv << ",beta_" << channel_name(plant, i);
  for (int i = 0; i < plant.n_y; ++i) {
    csv << ",kappa_" << channel_name(plant, i);
  }
  csv << ",theta1_deg_sin,theta1_deg_cos\n";
  double prev_objective = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const SynthesisResult& r = results[k];
    csv << io::format_double(r.gamma) << ',' << to_string(r.status);
    if (r.status == SolveStatus::Optimal) {
      for (int i = 0; i < plant.n_y; ++i) {
        csv << ',' << io::format_double(r.beta[i]);
      }
      for (int i = 0; i < plant.n_y; ++i) {
        csv << ',' << io::format_double(r.kappa[i]);
      }
      if (const auto angle = try_noise_angle(r)) {
        csv << ',' << io::format_double(angle->from_sin_deg) << ','
            << io::format_double(angle->from_cos_deg);
      } else {
        csv << ",,";
      }
      if (r.objective_value > prev_objective * (1.0 + 1e-6)) monotone = false;
      prev_objective = r.objective_value;
      const std::string path =
          (std::filesystem::path(config.out_dir) /
           ("result_" + std::string(to_string(config.norm)) + "_g" +
            std::to_string(k) + ".json"))
              .string();
      io::save_result(r, plant, builtin_config(config), path);
    } else {
      for (int i = 0; i < 2 * plant.n_y; ++i) csv << ',';
      csv << ",,";
    }
    csv << '\n';
  }
  const std::string csv_path =
      (std::filesystem::path(config.out_dir) /
       ("sweep_" + std::string(to_string(config.norm)) + ".csv"))
          .string();
  io::write_text(csv.str(), csv_path);
  out << "sweep written to " << csv_path << "\n";
  out << "objective non-increasing in gamma: " << (monotone ? "yes" : "NO")
      << "\n";
  return kExitOk;
}

int cmd_simulate(const io::RunConfig& config, const std::string& result_path,
                 std::ostream& out, std::ostream& err) {
  const io::ResultDocument doc = io::load_result(result_path);
  if (doc.result.status != SolveStatus::Optimal) {
    err << "error: result file does not hold an optimal design\n";
    return kExitError;
  }
  if (!doc.cr3bp) {
    err << "error: result lacks CR3BP settings; nonlinear simulation needs "
           "the builtin plant\n";
    return kExitError;
  }
  if (doc.result.L.rows() != 4 || doc.result.L.cols() != 6) {
    err << "error: result dimensions do not match the CR3BP plant\n";
    return kExitError;
  }
  const cr3bp::Cr3bpConfig sim_config = *doc.cr3bp;

  NoiseSpec spec;
  spec.kind = config.noise_kind;
  spec.dist = config.noise_dist;
  spec.seed = config.seed;
  if (spec.kind == NoiseKind::AngleDegrees) {
    if (config.noise_deg >= 0.0) {
      spec.angle_deg = config.noise_deg;
    } else {
      const auto angle = try_noise_angle(doc.result);
      if (!angle) {
        err << "error: cannot derive a noise angle from the result; pass "
               "--noise-deg\n";
        return kExitError;
      }
      spec.angle_deg = angle->from_sin_deg;
    }
  } else {
    spec.sigmas = doc.result.kappa.cwiseInverse();
  }

  cr3bp::State x0_hat = sim_config.initial_state;
  x0_hat *= (1.0 + config.x0_hat_offset);

  const SimulationTrace trace = simulate(sim_config, doc.result.L, spec,
                                         x0_hat, config.schedule);
  const SimMetrics metrics = compute_metrics(trace);

  const std::string trace_path =
      (std::filesystem::path(config.out_dir) /
       ("trace_" + std::string(to_string(doc.result.norm)) + ".csv"))
          .string();
  io::write_trace_csv(trace, trace_path);

  out << "trace written to " << trace_path << "\n";
  out << "noise: " << to_string(spec.kind) << " level "
      << (spec.kind == NoiseKind::AngleDegrees
              ? std::to_string(spec.angle_deg) + " deg"
              : "per-channel 1/kappa")
      << " (" << to_string(spec.dist) << ", peak " << trace.noise_peak
      << ", rms " << trace.noise_rms << ")\n";
  out << "initial error: " << metrics.initial_error << "\n";
  out << "peak |eps|: " << metrics.peak_eps << "\n";
  out << "rms |eps| (final half): " << metrics.rms_eps_post << "\n";
  out << "eps variance (final half): " << metrics.variance_eps_post << "\n";
  out << "convergence time to 10% band: " << metrics.convergence_time << "\n";
  return kExitOk;
}

int cmd_verify(const io::RunConfig& config, const std::string& result_path,
               std::ostream& out, std::ostream& err) {
  const io::ResultDocument doc = io::load_result(result_path);
  if (doc.result.status != SolveStatus::Optimal) {
    err << "error: result file does not hold an optimal design\n";
    return kExitError;
  }
  const CertifyReport report = certify(doc.result, doc.plant);
  out << report.summary() << "\n";
  const std::string path = (std::filesystem::path(config.out_dir) /
                            "certification.txt")
                               .string();
  io::write_text(report.summary() + "\n", path);
  return report.pass ? kExitOk : kExitCertFail;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"LPV observer synthesis with minimum sensing precision"};
  app.require_subcommand(1);

  CliOverrides o;
  app.add_option("--config", o.config_path, "JSON config file");
  app.add_option("--out", o.out_dir, "output directory");

  auto add_synth_opts = [&](CLI::App* cmd) {
    cmd->add_option("--norm", o.norm, "h2 or hinf");
    cmd->add_option("--p", o.p, "norm order: 1, 2 or inf");
  };

  CLI::App* synth = app.add_subcommand("synth", "synthesize at one gamma");
  synth->fallthrough();
  add_synth_opts(synth);
  synth->add_option("--gamma", o.gamma, "error bound");

  CLI::App* sweep = app.add_subcommand("sweep", "synthesize over gammas");
  sweep->fallthrough();
  add_synth_opts(sweep);
  sweep->add_option("--gammas", o.gammas, "comma-separated gamma list");

  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop run");
  simulate->fallthrough();
  simulate->add_option("--result", o.result_path, "result document")
      ->required();
  simulate->add_option("--noise-deg", o.noise_deg, "angle noise, degrees");
  simulate->add_option("--seed", o.seed, "noise seed");

  CLI::App* verify = app.add_subcommand("verify", "certify a result");
  verify->fallthrough();
  verify->add_option("--result", o.result_path, "result document")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    const io::RunConfig config = assemble_config(o);
    if (synth->parsed()) return cmd_synth(config, out, err);
    if (sweep->parsed()) return cmd_sweep(config, out, err);
    if (simulate->parsed()) {
      return cmd_simulate(config, o.result_path, out, err);
    }
    if (verify->parsed()) return cmd_verify(config, o.result_path, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  err << "error: no subcommand\n";
  return kExitError;
}

}  // namespace lpvp
