#include "bohm/integrate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "bohm/errors.hpp"
#include "bohm/reduced.hpp"

namespace bohm {

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::FullAnalytic: return "full-analytic";
    case Backend::FullNumeric: return "full-numeric";
    case Backend::Reduced: return "reduced";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  if (name == "full-analytic") return Backend::FullAnalytic;
  if (name == "full-numeric") return Backend::FullNumeric;
  if (name == "reduced") return Backend::Reduced;
  throw ConfigError("unknown backend '" + std::string(name) +
                    "' (expected full-analytic, full-numeric or reduced)");
}

void IntegratorOptions::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (!(max_step > 0.0) || max_step > 1.0) throw ConfigError("max_step must be a fraction in (0, 1]");
  if (t_end && !(*t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (stride && !(*stride > 0.0)) throw ConfigError("stride must be positive");
  if (!(node_epsilon > 0.0)) throw ConfigError("node_epsilon must be positive");
  if (!(fd_step > 0.0) || fd_step > 1e-4) throw ConfigError("fd_step must lie in (0, 1e-4]");
}

double IntegratorOptions::resolved_t_end(const ScenarioParams& params) const {
  const double horizon = t_end ? *t_end : kDefaultHorizonFactor * crossing_time(params);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("integration horizon must be positive; set t_end explicitly");
  }
  return horizon;
}

double IntegratorOptions::resolved_stride(double horizon) const {
  return stride ? *stride : horizon / static_cast<double>(kDefaultSamplesPerRun);
}

void EnsembleSpec::validate() const {
  if (count_per_slit < 1) throw ConfigError("count_per_slit must be at least 1");
  if (!(extent > 0.0)) throw ConfigError("slit grid extent must be positive");
}

Configuration Trajectory::configuration(std::size_t i) const {
  Configuration c;
  c.t = t.at(i);
  c.x = x.at(i);
  c.y = y.at(i);
  if (has_pointers()) c.z = z.row(static_cast<Eigen::Index>(i)).transpose();
  return c;
}

double crossing_time(const ScenarioParams& params) {
  return params.d_prime * params.r * params.r * params.xi_y / params.xi_x;
}

std::shared_ptr<const ScenarioParams> share(const ScenarioParams& params) {
  return std::make_shared<const ScenarioParams>(params);
}

namespace {

std::vector<double> output_times(double horizon, double stride) {
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor(horizon / stride + 1e-9));
  out.reserve(count + 2);
  for (std::size_t k = 0; k <= count; ++k) {
    const double tk = static_cast<double>(k) * stride;
    if (tk > horizon) break;
    out.push_back(tk);
  }
  if (horizon - out.back() > 1e-12 * horizon) out.push_back(horizon);
  return out;
}

Configuration unpack(double t, const Eigen::VectorXd& state) {
  Configuration c;
  c.t = t;
  c.x = state(0);
  c.y = state(1);
  c.z = state.tail(state.size() - 2);
  return c;
}

}  // namespace

Trajectory integrate_trajectory(const Configuration& init, const ScenarioParams& params,
                                const IntegratorOptions& opts, Backend backend) {
  return integrate_trajectory(init, share(params), opts, backend);
}

namespace {

// Integrates `state` (X′, Y′, pointer coordinates of `field_params`) from
// t′ = 0 and fills the sampled series of `traj`. Pointer rows are collected
// only when `pointer_rows` is given.
void integrate_state(Eigen::VectorXd state, const ScenarioParams& field_params, double horizon,
                     const IntegratorOptions& opts, Backend backend, Trajectory& traj,
                     std::vector<Eigen::VectorXd>* pointer_rows) {
  const auto times = output_times(horizon, opts.resolved_stride(horizon));
  for (auto* v : {&traj.t, &traj.x, &traj.y, &traj.sigma_hat, &traj.log_omega, &traj.delta_s}) {
    v->reserve(times.size());
  }
  if (pointer_rows) pointer_rows->reserve(times.size());

  const double eps = opts.node_epsilon;
  auto rhs = [&](double t, const Eigen::VectorXd& yv, Eigen::VectorXd& dy) {
    const Configuration c = unpack(t, yv);
    const VelocityVector v = backend == Backend::FullNumeric
                                 ? velocity_numeric(c, field_params, opts.fd_step, eps)
                                 : velocity_analytic(c, field_params, eps);
    dy.resize(yv.size());
    dy(0) = v.dx;
    dy(1) = v.dy;
    dy.tail(yv.size() - 2) = v.dz;
  };
  auto guard = [&](double t, const Eigen::VectorXd& yv) {
    const auto be = eval_branches(unpack(t, yv), field_params);
    if (std::abs(be.log_omega) > kDominantBranchLogOmega) return true;
    return normalized_density(be.log_omega, be.delta_s) >= 10.0 * eps;
  };
  auto observe = [&](double t, const Eigen::VectorXd& yv) {
    const Configuration c = unpack(t, yv);
    const auto be = eval_branches(c, field_params);
    traj.t.push_back(t);
    traj.x.push_back(c.x);
    traj.y.push_back(c.y);
    traj.sigma_hat.push_back(c.sigma_hat());
    traj.log_omega.push_back(be.log_omega);
    traj.delta_s.push_back(be.delta_s);
    if (pointer_rows) pointer_rows->push_back(c.z);
  };

  StepControl ctl;
  ctl.rel_tol = opts.rel_tol;
  ctl.abs_tol = opts.abs_tol;
  ctl.max_step = opts.max_step * horizon;

  const OdeOutcome outcome = integrate_dopri5(rhs, guard, observe, state, 0.0, horizon, times, ctl);
  traj.stats = outcome.stats;
  traj.degenerate = outcome.truncated;
}

Trajectory integrate_reduced(const Configuration& init, const ReducedSystem& sys, const IntegratorOptions& opts,
                             bool reconstruct) {
  Trajectory traj = integrate_reduced_core(init.x, init.y, init.sigma_hat(), sys, opts);
  traj.initial = init;
  if (reconstruct && !traj.t.empty()) {
    traj.z = reconstruct_pointers(traj.t, traj.sigma_hat, init.z, *sys.params);
  }
  return traj;
}

}  // namespace

Trajectory integrate_trajectory(const Configuration& init,
                                std::shared_ptr<const ScenarioParams> shared,
                                const IntegratorOptions& opts, Backend backend, bool reconstruct) {
  const ScenarioParams& params = *shared;
  params.validate();
  opts.validate();
  check_configuration(init, params);
  if (init.t != 0.0) throw ConfigError("trajectories start at t' = 0");

  if (backend == Backend::Reduced) return integrate_reduced(init, make_reduced_system(shared), opts, reconstruct);

  Eigen::VectorXd state(2 + params.n_particles());
  state(0) = init.x;
  state(1) = init.y;
  state.tail(state.size() - 2) = init.z;

  Trajectory traj;
  traj.params = shared;
  traj.backend = backend;
  traj.initial = init;
  std::vector<Eigen::VectorXd> pointer_rows;
  integrate_state(std::move(state), params, opts.resolved_t_end(params), opts, backend, traj, &pointer_rows);

  traj.z.resize(static_cast<Eigen::Index>(pointer_rows.size()), static_cast<Eigen::Index>(params.n_particles()));
  for (std::size_t i = 0; i < pointer_rows.size(); ++i) {
    traj.z.row(static_cast<Eigen::Index>(i)) = pointer_rows[i].transpose();
  }
  return traj;
}

ReducedSystem make_reduced_system(std::shared_ptr<const ScenarioParams> params) {
  params->validate();
  ReducedSystem sys;
  sys.field = reduced_params(*params);
  sys.params = std::move(params);
  return sys;
}

Trajectory integrate_reduced_core(double x0, double y0, double sigma_hat0, const ReducedSystem& sys,
                                  const IntegratorOptions& opts) {
  opts.validate();
  if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(sigma_hat0)) {
    throw ConfigError("initial collective state must be finite");
  }
  Eigen::VectorXd state(3);
  state << x0, y0, sigma_hat0;

  Trajectory traj;
  traj.params = sys.params;
  traj.backend = Backend::Reduced;
  traj.initial.x = x0;
  traj.initial.y = y0;
  integrate_state(std::move(state), sys.field, opts.resolved_t_end(*sys.params), opts, Backend::Reduced, traj,
                  nullptr);
  return traj;
}

Eigen::VectorXd sample_pointer_positions(const PointerInit& init, std::size_t n) {
  const auto size = static_cast<Eigen::Index>(n);
  switch (init.mode) {
    case PointerInit::Mode::Explicit: {
      if (init.values.size() != n) {
        throw ConfigError("explicit z_init lists " + std::to_string(init.values.size()) +
                          " values for " + std::to_string(n) + " pointer particles");
      }
      return Eigen::Map<const Eigen::VectorXd>(init.values.data(), size);
    }
    case PointerInit::Mode::Common:
      return Eigen::VectorXd::Constant(size, init.value);
    case PointerInit::Mode::Gaussian: {
      // |χ(z, 0)|² ∝ exp(−2z′²): standard deviation 1/2.
      std::mt19937_64 rng(init.seed);
      std::normal_distribution<double> normal(0.0, 0.5);
      Eigen::VectorXd z(size);
      for (Eigen::Index i = 0; i < size; ++i) z(i) = normal(rng);
      if (init.sigma_hat && n > 0) {
        const double root_n = std::sqrt(static_cast<double>(n));
        z.array() += (*init.sigma_hat - z.sum() / root_n) / root_n;
      }
      return z;
    }
  }
  throw ConfigError("unknown z_init mode");
}

std::vector<Configuration> sample_initials(const EnsembleSpec& spec, const ScenarioParams& params) {
  spec.validate();
  const Eigen::VectorXd z0 = sample_pointer_positions(spec.z_init, params.n_particles());
  const int count = spec.count_per_slit;
  std::vector<double> offsets(static_cast<std::size_t>(count), 0.0);
  // Offsets are built antisymmetric so the lower grid is the exact mirror image
  // of the upper one.
  if (count > 1) {
    for (int i = 0; i < count / 2; ++i) {
      const double off = -spec.extent + 2.0 * spec.extent * i / (count - 1);
      offsets[static_cast<std::size_t>(i)] = off;
      offsets[static_cast<std::size_t>(count - 1 - i)] = -off;
    }
  }
  std::vector<Configuration> out;
  out.reserve(2 * offsets.size());
  for (const double centre : {params.d_prime, -params.d_prime}) {
    for (const double off : offsets) {
      Configuration c;
      c.t = 0.0;
      c.x = centre + off;
      c.y = 0.0;
      c.z = z0;
      out.push_back(std::move(c));
    }
  }
  return out;
}

unsigned threads_from_environment() {
  if (const char* env = std::getenv("BOHM_SIM_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<unsigned>(v);
    throw ConfigError("BOHM_SIM_THREADS must be a non-negative integer");
  }
  return 0;
}

std::vector<Trajectory> run_ensemble(const EnsembleSpec& spec, const ScenarioParams& params,
                                     const IntegratorOptions& opts) {
  params.validate();
  opts.validate();
  if (spec.backend == Backend::Reduced && !params.single_pointer()) {
    throw ModeError("the reduced backend needs a single pointer with common Xi");
  }
  auto initials = sample_initials(spec, params);
  if (spec.backend == Backend::Reduced && spec.reconstruct) {
    const double horizon = opts.resolved_t_end(params);
    const double samples = horizon / opts.resolved_stride(horizon) + 2.0;
    const double values = samples * static_cast<double>(initials.size()) *
                          static_cast<double>(params.n_particles());
    if (values > kMaxReconstructedValues) {
      throw ConfigError("pointer reconstruction would hold " + std::to_string(values) +
                        " samples; disable reconstruction or coarsen the stride");
    }
  }
  const auto shared = share(params);
  const bool reduced = spec.backend == Backend::Reduced;
  const ReducedSystem sys = reduced ? make_reduced_system(shared) : ReducedSystem{};
  std::vector<Trajectory> out(initials.size());

  unsigned workers = spec.threads != 0 ? spec.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(initials.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < initials.size(); i = next++) {
      try {
        if (reduced) {
          check_configuration(initials[i], params);
          out[i] = integrate_reduced(initials[i], sys, opts, spec.reconstruct);
        } else {
          out[i] = integrate_trajectory(initials[i], shared, opts, spec.backend);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace bohm
