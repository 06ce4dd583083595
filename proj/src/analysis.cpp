#include "bohm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bohm/errors.hpp"
#include "bohm/model.hpp"
#include "bohm/reduced.hpp"

namespace bohm {

namespace {

Slit slit_of(double x0) { return x0 >= 0.0 ? Slit::Upper : Slit::Lower; }

const ScenarioParams& params_of(const Trajectory& traj) {
  if (!traj.params) throw AnalysisError("trajectory carries no scenario parameters");
  return *traj.params;
}

}  // namespace

TrajectoryClass classify(const Trajectory& traj) {
  TrajectoryClass rec;
  rec.initial_slit = slit_of(traj.initial.x);
  if (traj.degenerate) {
    rec.degenerate = true;
    return rec;
  }
  const double t_cross = crossing_time(params_of(traj));
  if (traj.size() < 2 || traj.t.back() < t_cross * (1.0 - 1e-12)) {
    throw AnalysisError("trajectory is too short to classify (must reach t'_cross)");
  }
  const double x0 = traj.x.front();
  for (std::size_t i = 1; i < traj.size(); ++i) {
    if (traj.x[i] * x0 < 0.0) {
      rec.crossed_plane = true;
      const double xa = traj.x[i - 1], xb = traj.x[i];
      const double frac = xa / (xa - xb);
      rec.crossing_time = traj.t[i - 1] + frac * (traj.t[i] - traj.t[i - 1]);
      break;
    }
  }
  const std::size_t k = traj.size();
  const double dx = traj.x[k - 1] - traj.x[k - 2];
  rec.final_direction = (dx > 0.0) - (dx < 0.0);
  return rec;
}

ClassificationSummary summarize(std::span<const Trajectory> trajectories) {
  ClassificationSummary s;
  std::size_t bounce = 0, cross = 0, down = 0;
  for (const auto& traj : trajectories) {
    const auto rec = classify(traj);
    if (rec.degenerate) {
      ++s.excluded;
    } else {
      (rec.crossed_plane ? cross : bounce) += 1;
      if (rec.final_direction < 0) ++down;
    }
    s.records.push_back(rec);
  }
  const std::size_t counted = bounce + cross;
  if (counted > 0) {
    const auto total = static_cast<double>(counted);
    s.bounce_fraction = static_cast<double>(bounce) / total;
    s.crossing_fraction = static_cast<double>(cross) / total;
    s.downward_fraction = static_cast<double>(down) / total;
  }
  return s;
}

double pointer_separation(double t_prime, double xi, const ScenarioParams& params) {
  return 2.0 * params.velocity_scale_z() * xi * t_prime;
}

double overlap_time(const ScenarioParams& params) {
  const auto xi = params.common_xi();
  if (!xi) throw ModeError("overlap time needs a single pointer with common Xi");
  const double n = static_cast<double>(params.n_particles());
  return 1.0 / (params.velocity_scale_z() * std::abs(*xi) * std::sqrt(n));
}

double log_k_lin(std::size_t n, double mean_offset, double dz) {
  return -static_cast<double>(n) * (2.0 * mean_offset * dz + dz * dz);
}

double log_k_gauss(std::size_t n, double dz) { return -static_cast<double>(n) * dz * dz; }

EmptyWaveReport empty_wave_ratio(const Trajectory& traj, const ScenarioParams& params) {
  const auto xi = params.common_xi();
  if (!xi) throw ModeError("empty-wave ratio needs a single pointer with common Xi");
  if (static_cast<std::size_t>(traj.initial.z.size()) != params.n_particles()) {
    throw AnalysisError("trajectory does not match the scenario's pointer count");
  }
  // Without reconstructed pointers the ratio follows from Σ̂′ under Ξ√N.
  const bool use_sigma = !traj.has_pointers();
  const ScenarioParams sigma_params = use_sigma ? reduced_params(params) : ScenarioParams{};

  EmptyWaveReport rep;
  rep.n = params.n_particles();
  rep.tau = overlap_time(params);
  const double sgn = slit_of(traj.initial.x) == Slit::Upper ? 1.0 : -1.0;
  const double root_n = std::sqrt(static_cast<double>(rep.n));

  for (std::size_t i = 0; i < traj.size(); ++i) {
    Configuration c = traj.configuration(i);
    double ptr;
    if (use_sigma) {
      c.z = Eigen::VectorXd::Constant(1, traj.sigma_hat[i]);
      ptr = pointer_log_omega(c, sigma_params);
    } else {
      ptr = pointer_log_omega(c, params);
    }
    const double dz = pointer_separation(traj.t[i], *xi, params);
    const double offset = sgn * traj.sigma_hat[i] / root_n - dz / 2.0;
    rep.t.push_back(traj.t[i]);
    rep.log_k_exact.push_back(-sgn * traj.log_omega[i]);
    rep.log_k_pointer.push_back(-sgn * ptr);
    rep.mean_offset.push_back(offset);
    rep.log_k_lin.push_back(log_k_lin(rep.n, offset, dz));
    rep.log_k_gauss.push_back(log_k_gauss(rep.n, dz));
  }
  return rep;
}

std::optional<double> threshold_crossing_time(const EmptyWaveReport& report, double threshold) {
  if (!(threshold > 0.0)) throw AnalysisError("threshold must be positive");
  const double target = std::log(threshold);
  const auto& lk = report.log_k_pointer;
  for (std::size_t i = 0; i < lk.size(); ++i) {
    if (lk[i] <= target) {
      if (i == 0) return report.t[0];
      const double frac = (lk[i - 1] - target) / (lk[i - 1] - lk[i]);
      return report.t[i - 1] + frac * (report.t[i] - report.t[i - 1]);
    }
  }
  return std::nullopt;
}

TauFit tau_scaling_fit(const ScenarioParams& params, std::span<const std::size_t> n_list,
                       double threshold, const IntegratorOptions& opts) {
  const auto xi = params.common_xi();
  if (!xi) throw ModeError("tau scaling needs a single pointer with common Xi");
  if (!(threshold > 0.0 && threshold < 1.0)) throw AnalysisError("threshold must lie in (0, 1)");
  if (n_list.size() < 4) throw AnalysisError("tau scaling needs at least four values of N");
  const auto [lo, hi] = std::minmax_element(n_list.begin(), n_list.end());
  if (*lo == *hi) throw AnalysisError("degenerate fit: all N values are equal");
  if (*lo == 0 || static_cast<double>(*hi) < 10.0 * static_cast<double>(*lo)) {
    throw AnalysisError("N values must be positive and span at least a decade");
  }

  IntegratorOptions run_opts = opts;
  const double horizon = opts.resolved_t_end(params);
  if (!run_opts.stride) run_opts.stride = horizon / 20000.0;

  TauFit fit;
  for (const std::size_t n : n_list) {
    const ScenarioParams p = with_single_pointer(params, *xi, n);
    Configuration init;
    init.x = p.d_prime;
    init.z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    const Trajectory traj = integrate_trajectory(init, share(p), run_opts, Backend::Reduced, false);
    const auto t = threshold_crossing_time(empty_wave_ratio(traj, p), threshold);
    if (!t) {
      throw AnalysisError("K never reaches the threshold within the horizon for N = " +
                          std::to_string(n));
    }
    fit.n_values.push_back(n);
    fit.times.push_back(*t);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto m = static_cast<double>(fit.times.size());
  for (std::size_t i = 0; i < fit.times.size(); ++i) {
    const double lx = std::log(static_cast<double>(fit.n_values[i]));
    const double ly = std::log(fit.times[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

std::vector<SurrealRow> surreal_fraction_vs_n(const ScenarioParams& base,
                                              std::span<const std::size_t> n_list,
                                              const EnsembleSpec& spec,
                                              const IntegratorOptions& opts) {
  const auto xi = base.common_xi();
  if (!xi) throw ModeError("surrealistic-fraction scan needs a single pointer with common Xi");
  if (fast_pointer_E(with_single_pointer(base, *xi, 1)) >= 1.0) {
    throw ConfigError("surrealistic-fraction scan needs a slow pointer (E < 1 at N = 1)");
  }
  EnsembleSpec run_spec = spec;
  run_spec.backend = Backend::Reduced;
  run_spec.reconstruct = false;

  std::vector<SurrealRow> rows;
  for (const std::size_t n : n_list) {
    const auto trajs = run_ensemble(run_spec, with_single_pointer(base, *xi, n), opts);
    const auto summary = summarize(trajs);
    rows.push_back({n, summary.bounce_fraction, summary.downward_fraction, summary.excluded});
  }
  return rows;
}

}  // namespace bohm
