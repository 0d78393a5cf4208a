#include "lpvp/io.hpp"

#include "lpvp/cli.hpp"

#include "util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lpvp;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("lpvp_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

SynthesisResult fake_result() {
  SynthesisResult r;
  r.status = SolveStatus::Optimal;
  r.norm = NormKind::H2;
  r.p = NormOrder::L1;
  r.policy = PrecisionPolicy::SqrtBeta;
  r.gamma = 0.1;
  r.eps = 1e-8;
  r.L = testing::m1x1(-1.0 / 3.0);
  r.X = testing::m1x1(0.123456789012345678);
  r.Q = testing::m1x1(1e-17);
  r.beta = Vector::Constant(1, M_PI);
  r.kappa = Vector::Constant(1, std::sqrt(M_PI));
  r.objective_value = M_PI;
  r.lmi_residuals = {-1e-8, -0.5};
  r.residual_labels = {"a", "b"};
  return r;
}

}  // namespace

TEST_CASE("format_double round trips doubles bit-exactly") {
  for (double v : {1.0 / 3.0, M_PI, 1e-300, 6.02214076e23, -0.0, 2.5}) {
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("plant json round trip is exact") {
  const LpvPlant plant = testing::lpv_toy_plant();
  const io::json j = io::plant_to_json(plant);
  const LpvPlant back = io::plant_from_json(io::json::parse(j.dump()));
  CHECK(back.n_x == plant.n_x);
  CHECK((back.A.constant() - plant.A.constant()).norm() == 0.0);
  REQUIRE(back.A.basis().size() == plant.A.basis().size());
  CHECK((back.A.basis()[0].second - plant.A.basis()[0].second).norm() == 0.0);
  CHECK(back.box.lower == plant.box.lower);
  CHECK(back.box.upper == plant.box.upper);
}

TEST_CASE("result document round trips bit-identically") {
  const LpvPlant plant = testing::scalar_plant(-1.0);
  const SynthesisResult r = fake_result();
  const auto dir = temp_dir("result_rt");
  const std::string path = (dir / "result.json").string();
  io::save_result(r, plant, std::nullopt, path);
  const io::ResultDocument doc = io::load_result(path);
  CHECK(doc.result.gamma == r.gamma);
  CHECK(doc.result.L(0, 0) == r.L(0, 0));
  CHECK(doc.result.X(0, 0) == r.X(0, 0));
  CHECK(doc.result.Q(0, 0) == r.Q(0, 0));
  CHECK(doc.result.beta[0] == r.beta[0]);
  CHECK(doc.result.kappa[0] == r.kappa[0]);
  CHECK(doc.result.objective_value == r.objective_value);
  CHECK(doc.result.lmi_residuals == r.lmi_residuals);
  CHECK_FALSE(doc.cr3bp.has_value());

  // A second write of the parsed document is byte-identical.
  const std::string path2 = (dir / "result2.json").string();
  io::save_result(doc.result, doc.plant, doc.cr3bp, path2);
  std::ifstream a(path), b(path2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
}

TEST_CASE("config parsing covers every section") {
  const io::json j = io::json::parse(R"({
    "plant": {"source": "cr3bp"},
    "cr3bp": {"pi2": 0.0122, "initial_state": [0.4, 0, 0, 1.2],
               "t_final": 0.5, "dt": 0.002, "box_margin": 0.04,
               "disturbance_scale": 0.01},
    "synthesis": {"norm": "hinf", "gamma": 0.25, "gammas": [0.1, 0.2],
                   "p": "inf", "eps": 1e-7, "policy": "sqrt_beta"},
    "simulation": {"noise_kind": "angle", "noise_deg": 1.5,
                    "noise_dist": "gaussian", "seed": 9,
                    "x0_hat_offset": 0.2, "schedule": "truth"},
    "out_dir": "somewhere"
  })");
  const io::RunConfig c = io::config_from_json(j);
  CHECK(c.norm == NormKind::Hinf);
  CHECK(c.gamma == 0.25);
  CHECK(c.gammas == std::vector<double>{0.1, 0.2});
  CHECK(c.p == NormOrder::Linf);
  CHECK(c.eps == 1e-7);
  CHECK(c.cr3bp.pi2 == 0.0122);
  CHECK(c.cr3bp.dt == 0.002);
  CHECK(c.noise_deg == 1.5);
  CHECK(c.noise_dist == NoiseDist::Gaussian);
  CHECK(c.seed == 9);
  CHECK(c.x0_hat_offset == 0.2);
  CHECK(c.schedule == SchedulePolicy::FromTruth);
  CHECK(c.out_dir == "somewhere");
}

TEST_CASE("config rejects unknown enum strings") {
  CHECK_THROWS(io::config_from_json(
      io::json::parse(R"({"synthesis": {"norm": "h3"}})")));
  CHECK_THROWS(io::config_from_json(
      io::json::parse(R"({"simulation": {"noise_kind": "what"}})")));
}

TEST_CASE("mass pair in config is converted to pi2") {
  const io::json j = io::json::parse(
      R"({"cr3bp": {"m1": 5.9724e24, "m2": 7.346e22}})");
  const io::RunConfig c = io::config_from_json(j);
  CHECK(c.cr3bp.pi2 ==
        doctest::Approx(cr3bp::default_pi2()).epsilon(1e-12));
}

TEST_CASE("trace csv has the documented schema") {
  cr3bp::Cr3bpConfig config;
  config.t_final = 0.01;
  NoiseSpec spec;
  spec.angle_deg = 1.0;
  const SimulationTrace trace =
      simulate(config, Matrix::Zero(4, 6), spec, config.initial_state);
  const auto dir = temp_dir("trace");
  const std::string path = (dir / "trace.csv").string();
  io::write_trace_csv(trace, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "t,x1,x2,x3,x4,xhat1,xhat2,xhat3,xhat4,"
        "y1,y2,y3,y4,y5,y6,n1,n2,n3,n4,n5,n6,eps1,eps2");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CHECK(std::count(line.begin(), line.end(), ',') == 22);
    ++rows;
  }
  CHECK(rows == trace.times.size());
}

TEST_CASE("cli rejects a non-positive gamma") {
  std::string err;
  const int code = cli({"synth", "--gamma", "-1"}, nullptr, &err);
  CHECK(code == 1);
  CHECK(err.find("gamma must be positive") != std::string::npos);
}

TEST_CASE("cli rejects an empty sweep") {
  std::string err;
  const int code = cli({"sweep"}, nullptr, &err);
  CHECK(code == 1);
  CHECK(err.find("non-empty gamma list") != std::string::npos);
}

TEST_CASE("cli reports missing result files") {
  std::string err;
  const int code =
      cli({"verify", "--result", "/nonexistent/result.json"}, nullptr, &err);
  CHECK(code == 1);
  CHECK(err.find("error") != std::string::npos);
}

TEST_CASE("cli reports malformed result files") {
  const auto dir = temp_dir("malformed");
  const std::string path = (dir / "bad.json").string();
  io::write_text("{ not json", path);
  std::string err;
  const int code = cli({"simulate", "--result", path}, nullptr, &err);
  CHECK(code == 1);
  CHECK_FALSE(err.empty());
}

TEST_CASE("cli synth on a plant file runs end to end") {
  const auto dir = temp_dir("synth_file");
  const std::string plant_path = (dir / "plant.json").string();
  io::save_plant(testing::scalar_plant(1.0), plant_path);
  const std::string config_path = (dir / "config.json").string();
  io::write_text(io::json({{"plant", {{"source", "file"},
                                       {"path", plant_path}}}})
                     .dump(),
                 config_path);
  std::string out;
  const int code = cli({"synth", "--config", config_path, "--gamma", "2.0",
                        "--norm", "h2", "--out", (dir / "out").string()},
                       &out);
  CHECK(code == 0);
  CHECK(out.find("status: optimal") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "out" / "result_h2.json"));

  // Round trip through verify: certificate checks must pass.
  std::string verify_out;
  const int verify_code =
      cli({"verify", "--result", (dir / "out" / "result_h2.json").string(),
           "--out", (dir / "out").string()},
          &verify_out);
  CHECK(verify_code == 0);
  CHECK(verify_out.find("PASS") != std::string::npos);
}

TEST_CASE("cli verify flags a corrupted gain with exit 3") {
  const auto dir = temp_dir("verify_corrupt");
  const std::string plant_path = (dir / "plant.json").string();
  io::save_plant(testing::scalar_plant(1.0), plant_path);
  const std::string config_path = (dir / "config.json").string();
  io::write_text(io::json({{"plant", {{"source", "file"},
                                       {"path", plant_path}}}})
                     .dump(),
                 config_path);
  const int code = cli({"synth", "--config", config_path, "--gamma", "2.0",
                        "--out", (dir / "out").string()});
  REQUIRE(code == 0);

  const std::string result_path = (dir / "out" / "result_h2.json").string();
  io::json doc;
  {
    std::ifstream in(result_path);
    in >> doc;
  }
  SUBCASE("sign-flipped gain fails the hurwitz check") {
    doc["L"][0][0] = -doc["L"][0][0].get<double>();
    io::write_text(doc.dump(), result_path);
    std::string out;
    const int verify_code =
        cli({"verify", "--result", result_path, "--out",
             (dir / "out").string()},
            &out);
    CHECK(verify_code == 3);
  }
  SUBCASE("halved gamma fails the norm bound") {
    doc["gamma"] = doc["gamma"].get<double>() / 2.0;
    io::write_text(doc.dump(), result_path);
    std::string out;
    const int verify_code =
        cli({"verify", "--result", result_path, "--out",
             (dir / "out").string()},
            &out);
    CHECK(verify_code == 3);
    CHECK(out.find("FAIL") != std::string::npos);
  }
}

TEST_CASE("cli infeasible synth exits with code 2") {
  const auto dir = temp_dir("synth_infeasible");
  const std::string plant_path = (dir / "plant.json").string();
  io::save_plant(testing::scalar_plant(-1.0), plant_path);
  const std::string config_path = (dir / "config.json").string();
  io::write_text(io::json({{"plant", {{"source", "file"},
                                       {"path", plant_path}}}})
                     .dump(),
                 config_path);
  std::string out;
  const int code = cli({"synth", "--config", config_path, "--norm", "hinf",
                        "--gamma", "1e-9", "--out", (dir / "out").string()},
                       &out);
  CHECK(code == 2);
  CHECK(out.find("status: infeasible") != std::string::npos);
}
