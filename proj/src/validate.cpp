#include "bohm/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bohm/analysis.hpp"
#include "bohm/errors.hpp"
#include "bohm/integrate.hpp"
#include "bohm/model.hpp"
#include "bohm/reduced.hpp"
#include "bohm/scenario.hpp"

namespace bohm {

namespace {

std::string describe(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

VelocityField field_of(const ValidationOptions& opts) {
  if (opts.velocity) return opts.velocity;
  return [](const Configuration& c, const ScenarioParams& p) { return velocity_analytic(c, p); };
}

SuiteResult finish(std::string name, double metric, double tol, std::string detail) {
  return {std::move(name), metric <= tol, metric, tol, std::move(detail)};
}

SuiteResult backend_equivalence(const ValidationOptions& opts) {
  const auto field = field_of(opts);
  std::mt19937_64 rng(opts.seed);
  double worst = 0.0;
  for (const char* name : {"fig2", "fig3", "fig4"}) {
    const ScenarioParams p = preset(name).params;
    const double horizon = IntegratorOptions{}.resolved_t_end(p);
    for (std::size_t k = 0; k < opts.samples; ++k) {
      const Configuration c = sample_support_configuration(p, horizon, rng);
      worst = std::max(worst, velocity_deviation(field(c, p), velocity_numeric(c, p), p));
    }
  }
  return finish("backend-equivalence", worst, kBackendEquivalenceTol,
                describe("worst scaled deviation %.3g over %.0f configurations", worst,
                         3.0 * static_cast<double>(opts.samples)));
}

SuiteResult sqrt_n(const ValidationOptions& opts) {
  const auto field = field_of(opts);
  std::mt19937_64 rng(opts.seed + 1);
  const ScenarioParams base = preset("fig4").params;
  const IntegratorOptions iopts;
  double worst_field = 0.0, worst_traj = 0.0;
  for (const std::size_t n : {1u, 4u, 9u, 16u}) {
    const ScenarioParams p = with_single_pointer(base, *base.common_xi(), n);
    const double horizon = iopts.resolved_t_end(p);
    const double root_n = std::sqrt(static_cast<double>(n));

    // Field level: the collective pair (dX′, dΣ̂′) depends on Σ̂′ only.
    for (std::size_t k = 0; k < opts.samples / 10; ++k) {
      const Configuration c = sample_support_configuration(p, horizon, rng);
      const auto v = field(c, p);
      const auto [dx, ds] = reduced_velocity({c.t, c.x, c.sigma_hat()}, p);
      const double sx = p.velocity_scale_x(), sz = p.velocity_scale_z();
      worst_field = std::max(worst_field, std::abs(v.dx - dx) / std::max(std::abs(dx), sx));
      worst_field = std::max(worst_field, std::abs(v.dz.sum() / root_n - ds) / std::max(std::abs(ds), sz));
    }

    // Trajectory level: full N-particle run against the reduced run.
    PointerInit zi;
    zi.mode = PointerInit::Mode::Gaussian;
    zi.seed = opts.seed + n;
    Configuration init;
    init.x = p.d_prime;
    init.z = sample_pointer_positions(zi, n);
    const auto shared = share(p);
    const Trajectory full = integrate_trajectory(init, shared, iopts, Backend::FullAnalytic);
    const Trajectory red = integrate_trajectory(init, shared, iopts, Backend::Reduced);
    if (full.size() != red.size()) throw AnalysisError("full and reduced runs sampled differently");
    for (std::size_t i = 0; i < full.size(); ++i) {
      worst_traj = std::max({worst_traj, std::abs(full.x[i] - red.x[i]),
                             std::abs(full.sigma_hat[i] - red.sigma_hat[i])});
    }
  }
  const double worst = std::max(worst_field, worst_traj);
  return finish("sqrt-n", worst, kSqrtNTol,
                describe("field deviation %.3g, trajectory deviation %.3g", worst_field, worst_traj));
}

SuiteResult y_oracle(const ValidationOptions& opts) {
  const auto field = field_of(opts);
  std::mt19937_64 rng(opts.seed + 2);
  double worst_field = 0.0, worst_traj = 0.0;
  for (const auto& name : preset_names()) {
    ScenarioFile s = preset(name);
    const ScenarioParams& p = s.params;
    const double horizon = s.integrator.resolved_t_end(p);
    if (s.ensemble.backend != Backend::Reduced) {
      for (std::size_t k = 0; k < opts.samples / 10; ++k) {
        const Configuration c = sample_support_configuration(p, horizon, rng);
        const double exact = y_velocity_closed_form(c.t, c.y, p.xi_y);
        worst_field = std::max(worst_field, std::abs(field(c, p).dy - exact) / std::max(std::abs(exact), 1.0));
      }
    }
    s.ensemble.reconstruct = false;
    s.ensemble.threads = threads_from_environment();
    for (const auto& tr : run_ensemble(s.ensemble, p, s.integrator)) {
      for (std::size_t i = 0; i < tr.size(); ++i) {
        const double exact = y_closed_form(tr.t[i], tr.initial.y, p.xi_y);
        worst_traj = std::max(worst_traj, std::abs(tr.y[i] - exact));
      }
    }
  }
  const double worst = std::max(worst_field, worst_traj);
  return finish("y-oracle", worst, kYOracleTol,
                describe("field deviation %.3g, trajectory deviation %.3g", worst_field, worst_traj));
}

Configuration mirrored(const Configuration& c) {
  Configuration m = c;
  m.x = -c.x;
  m.z = -c.z;
  return m;
}

SuiteResult symmetry(const ValidationOptions& opts) {
  const auto field = field_of(opts);
  std::mt19937_64 rng(opts.seed + 3);
  double worst = 0.0;  // in units of the allowed deviation
  for (const char* name : {"fig3", "fig4"}) {
    ScenarioFile s = preset(name);
    const ScenarioParams& p = s.params;
    const auto& io = s.integrator;
    const double horizon = io.resolved_t_end(p);

    const double field_tol = kMirrorToleranceFactor * io.rel_tol;
    for (std::size_t k = 0; k < opts.samples / 10; ++k) {
      const Configuration c = sample_support_configuration(p, horizon, rng);
      auto v = field(mirrored(c), p);
      v.dx = -v.dx;
      v.dz = -v.dz;
      worst = std::max(worst, velocity_deviation(field(c, p), v, p) / field_tol);
    }

    s.ensemble.threads = threads_from_environment();
    const auto trajs = run_ensemble(s.ensemble, p, io);
    const auto count = static_cast<std::size_t>(s.ensemble.count_per_slit);
    for (std::size_t i = 0; i < count; ++i) {
      const auto& up = trajs[i];
      const auto& lo = trajs[2 * count - 1 - i];
      for (std::size_t j = 0; j < std::min(up.size(), lo.size()); ++j) {
        auto dev = [&](double a, double b) {
          return std::abs(a - b) / (kMirrorToleranceFactor * (io.abs_tol + io.rel_tol * std::abs(a)));
        };
        worst = std::max({worst, dev(up.x[j], -lo.x[j]), dev(up.y[j], lo.y[j]),
                          dev(up.sigma_hat[j], -lo.sigma_hat[j])});
      }
      if (up.size() != lo.size()) worst = std::max(worst, 2.0);
    }
  }
  return finish("symmetry", worst, 1.0, describe("worst mirror deviation %.3g of the allowance", worst));
}

SuiteResult tau_scaling(const ValidationOptions&) {
  const std::vector<std::size_t> ns{4, 16, 64, 256};
  const TauFit fit = tau_scaling_fit(preset("fig3").params, ns, 1e-3);
  const double off = std::abs(fit.slope - kTauSlope);
  return finish("tau-scaling", off, kTauSlopeTol, describe("fitted slope %.4f (|slope + 0.5| = %.3g)", fit.slope, off));
}

}  // namespace

std::vector<std::string> validation_suites() {
  return {"backend-equivalence", "sqrt-n", "y-oracle", "symmetry", "tau-scaling"};
}

SuiteResult run_suite(std::string_view name, const ValidationOptions& opts) {
  if (name == "backend-equivalence") return backend_equivalence(opts);
  if (name == "sqrt-n") return sqrt_n(opts);
  if (name == "y-oracle") return y_oracle(opts);
  if (name == "symmetry") return symmetry(opts);
  if (name == "tau-scaling") return tau_scaling(opts);
  throw ConfigError("unknown validation suite '" + std::string(name) + "'");
}

std::vector<SuiteResult> run_validation(std::span<const std::string> only, const ValidationOptions& opts) {
  for (const auto& name : only) {
    const auto all = validation_suites();
    if (std::find(all.begin(), all.end(), name) == all.end()) {
      throw ConfigError("unknown validation suite '" + name + "'");
    }
  }
  std::vector<SuiteResult> out;
  for (const auto& name : validation_suites()) {
    if (only.empty() || std::find(only.begin(), only.end(), name) != only.end()) {
      out.push_back(run_suite(name, opts));
    }
  }
  return out;
}

Configuration sample_support_configuration(const ScenarioParams& params, double horizon,
                                           std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(params.n_particles());
  for (;;) {
    Configuration c;
    c.t = unit(rng) * horizon;
    c.z.resize(n);
    const Branch branch = unit(rng) < 0.5 ? Branch::Upper : Branch::Lower;
    for (Eigen::Index j = 0; j < 2 + n; ++j) {
      const auto spec = packet_spec<double>(params, c.t, j, branch);
      // |packet|² is a normal density with this centre and standard deviation.
      const double centre = spec.q0 + spec.p * spec.beta / 2.0;
      const double sd = 0.5 * std::sqrt(1.0 + spec.beta * spec.beta);
      const double q = centre + sd * normal(rng);
      if (j == 0) {
        c.x = q;
      } else if (j == 1) {
        c.y = q;
      } else {
        c.z(j - 2) = q;
      }
    }
    const auto be = eval_branches(c, params);
    if (normalized_density(be.log_omega, be.delta_s) >= kSupportDensityFloor) return c;
  }
}

double velocity_deviation(const VelocityVector& a, const VelocityVector& b, const ScenarioParams& params) {
  auto dev = [](double x, double y, double scale) { return std::abs(x - y) / std::max(std::abs(x), scale); };
  double worst = std::max(dev(a.dx, b.dx, params.velocity_scale_x()), dev(a.dy, b.dy, params.velocity_scale_y()));
  if (a.dz.size() != b.dz.size()) throw ConfigError("velocity vectors differ in size");
  for (Eigen::Index j = 0; j < a.dz.size(); ++j) {
    worst = std::max(worst, dev(a.dz(j), b.dz(j), params.velocity_scale_z()));
  }
  return worst;
}

double y_velocity_closed_form(double t_prime, double y_prime, double xi_y) {
  if (!(xi_y > 0.0)) throw ConfigError("xi_y must be positive");
  const double g = 4.0 / (xi_y * xi_y);
  return 1.0 + (y_prime - t_prime) * g * t_prime / (1.0 + g * t_prime * t_prime);
}

}  // namespace bohm
