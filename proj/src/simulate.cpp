#include "lpvp/simulate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace lpvp {

const char* to_string(NoiseKind kind) {
  return kind == NoiseKind::AngleDegrees ? "angle-degrees"
                                         : "per-channel-sigma";
}

const char* to_string(NoiseDist dist) {
  return dist == NoiseDist::Uniform ? "uniform" : "gaussian";
}

const char* to_string(SchedulePolicy policy) {
  return policy == SchedulePolicy::FromEstimate ? "estimate" : "truth";
}

namespace {

using cr3bp::Measurement;
using cr3bp::State;

class NoiseSampler {
 public:
  explicit NoiseSampler(const NoiseSpec& spec)
      : spec_(spec), rng_(spec.seed) {}

  // Measured channels for the true state; one call per grid step.
  Measurement step(const State& truth, double pi2) {
    Measurement y;
    if (spec_.kind == NoiseKind::AngleDegrees) {
      const double level = spec_.angle_deg * M_PI / 180.0;
      const double nu1 = draw(level);
      const double nu2 = draw(level);
      const double t1 = cr3bp::theta1(truth, pi2) + nu1;
      const double t2 = cr3bp::theta2(truth, pi2) + nu2;
      const Measurement h = cr3bp::measurement(truth, pi2);
      y[0] = std::sin(t1);
      y[1] = std::cos(t1);
      y[2] = std::sin(t2);
      y[3] = std::cos(t2);
      y[4] = h[4];
      y[5] = h[5];
    } else {
      const Measurement h = cr3bp::measurement(truth, pi2);
      for (int i = 0; i < 6; ++i) {
        const double sigma =
            spec_.sigmas.size() > static_cast<Eigen::Index>(i)
                ? spec_.sigmas[i]
                : 0.0;
        y[i] = h[i] + draw(sigma);
      }
    }
    return y;
  }

 private:
  double draw(double level) {
    if (level <= 0.0) {
      // Keep the stream aligned so seeds stay comparable across levels.
      unit_(rng_);
      return 0.0;
    }
    return spec_.dist == NoiseDist::Uniform ? level * (2.0 * unit_(rng_) - 1.0)
                                            : level * normal_(rng_);
  }

  NoiseSpec spec_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

State observer_rhs(const State& xhat, const Measurement& y, const Matrix& L,
                   const Vector& rho, double pi2) {
  Matrix A, b, C, d;
  cr3bp::lpv_matrices(rho, pi2, A, b, C, d);
  const Vector v = A * xhat + b + L * (C * xhat + d - Vector(y));
  return State(v);
}

Vector schedule_rho(const State& truth, const State& estimate,
                    SchedulePolicy policy, double pi2) {
  const State& source =
      policy == SchedulePolicy::FromTruth ? truth : estimate;
  return cr3bp::rho_of_state(source, pi2);
}

}  // namespace

SimulationTrace simulate(const cr3bp::Cr3bpConfig& config, const Matrix& L,
                         const NoiseSpec& noise, const State& x0_hat,
                         SchedulePolicy schedule) {
  config.validate();
  if (L.rows() != 4 || L.cols() != 6) {
    throw std::invalid_argument("simulate: L must be 4x6");
  }
  const double pi2 = config.pi2;
  const double h = config.dt;
  const auto steps =
      static_cast<long>(std::llround(config.t_final / config.dt));

  const Matrix C_z = (Matrix(2, 4) << 1, 0, 0, 0, 0, 1, 0, 0).finished();

  SimulationTrace trace;
  trace.spec = noise;
  trace.schedule = schedule;
  trace.dt = h;
  trace.L = L;
  trace.times.reserve(steps + 1);
  trace.truth.reserve(steps + 1);
  trace.estimate.reserve(steps + 1);
  trace.measured.reserve(steps + 1);
  trace.noise.reserve(steps + 1);
  trace.error_z.reserve(steps + 1);

  NoiseSampler sampler(noise);
  State x = config.initial_state;
  State xh = x0_hat;

  double peak = 0.0;
  double sumsq = 0.0;
  long count = 0;

  for (long k = 0; k <= steps; ++k) {
    const Measurement y = sampler.step(x, pi2);
    const Measurement n = y - cr3bp::measurement(x, pi2);
    trace.times.push_back(k * h);
    trace.truth.push_back(x);
    trace.estimate.push_back(xh);
    trace.measured.push_back(y);
    trace.noise.push_back(n);
    trace.error_z.push_back(C_z * (x - xh));
    peak = std::max(peak, n.cwiseAbs().maxCoeff());
    sumsq += n.squaredNorm();
    count += 6;
    if (k == steps) break;

    // Joint RK4 step; the noise draw is held across the stages.
    auto rhs = [&](const State& xs, const State& xhs)
        -> std::pair<State, State> {
      const State dx = cr3bp::dynamics(xs, pi2);
      const Vector rho = schedule_rho(xs, xhs, schedule, pi2);
      const State dxh = observer_rhs(xhs, y, L, rho, pi2);
      return {dx, dxh};
    };
    const auto [k1x, k1h] = rhs(x, xh);
    const auto [k2x, k2h] = rhs(x + 0.5 * h * k1x, xh + 0.5 * h * k1h);
    const auto [k3x, k3h] = rhs(x + 0.5 * h * k2x, xh + 0.5 * h * k2h);
    const auto [k4x, k4h] = rhs(x + h * k3x, xh + h * k3h);
    x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    xh += (h / 6.0) * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
  }

  trace.noise_peak = peak;
  trace.noise_rms = std::sqrt(sumsq / static_cast<double>(count));
  return trace;
}

SimMetrics compute_metrics(const SimulationTrace& trace) {
  SimMetrics m;
  const std::size_t n = trace.times.size();
  if (n == 0) return m;
  m.initial_error = (trace.truth[0] - trace.estimate[0]).norm();

  const std::size_t half = n / 2;
  double sumsq = 0.0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    m.peak_eps = std::max(m.peak_eps, trace.error_z[k].norm());
  }
  for (std::size_t k = half; k < n; ++k) {
    sumsq += trace.error_z[k].squaredNorm();
    mean += trace.error_z[k];
    m.sup_error_post = std::max(
        m.sup_error_post, (trace.truth[k] - trace.estimate[k]).norm());
  }
  const double post_count = static_cast<double>(n - half);
  m.rms_eps_post = std::sqrt(sumsq / post_count);
  mean /= post_count;
  double var = 0.0;
  for (std::size_t k = half; k < n; ++k) {
    var += (trace.error_z[k] - mean).squaredNorm();
  }
  m.variance_eps_post = var / post_count;

  const double band = 0.1 * m.initial_error;
  m.convergence_time = m.initial_error == 0.0 ? 0.0 : -1.0;
  if (m.initial_error > 0.0) {
    std::size_t entry = n;  // first index after the last band violation
    for (std::size_t k = n; k-- > 0;) {
      if ((trace.truth[k] - trace.estimate[k]).norm() > band) {
        entry = k + 1;
        break;
      }
      entry = k;
    }
    if (entry < n) m.convergence_time = trace.times[entry];
  }
  return m;
}

}  // namespace lpvp
