// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
// Verdicts are computed here from the raw trajectories, not from the
// library's own validation suites.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "bohm/analysis.hpp"
#include "bohm/bench.hpp"
#include "bohm/integrate.hpp"
#include "bohm/output.hpp"
#include "bohm/reduced.hpp"
#include "bohm/scenario.hpp"
#include "bohm/validate.hpp"

using namespace bohm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const char* what, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, what, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Per-component |a − b| / max(|a|, κ), κ the coordinate's velocity scale.
double deviation(const VelocityVector& a, const VelocityVector& b, const ScenarioParams& p) {
  auto rel = [](double u, double v, double k) { return std::abs(u - v) / std::max(std::abs(u), k); };
  double worst = std::max(rel(a.dx, b.dx, p.velocity_scale_x()), rel(a.dy, b.dy, p.velocity_scale_y()));
  for (Eigen::Index j = 0; j < a.dz.size(); ++j) {
    worst = std::max(worst, rel(a.dz(j), b.dz(j), p.velocity_scale_z()));
  }
  return worst;
}

// Free y packet: Y′ − t′ grows like the packet width.
double y_exact(double t, double y0, double xi_y) {
  return t + y0 * std::sqrt(1.0 + 4.0 * t * t / (xi_y * xi_y));
}

bool crossed(const Trajectory& tr) {
  const bool upper = tr.x.front() > 0.0;
  return std::any_of(tr.x.begin(), tr.x.end(), [&](double x) { return upper ? x < 0.0 : x > 0.0; });
}

double bounce_fraction(const std::vector<Trajectory>& trajs) {
  std::size_t kept = 0, bounced = 0;
  for (const auto& tr : trajs) {
    if (tr.degenerate) continue;
    ++kept;
    if (!crossed(tr)) ++bounced;
  }
  return kept ? static_cast<double>(bounced) / static_cast<double>(kept) : NAN;
}

std::vector<Trajectory> run(ScenarioFile s) { return run_ensemble(s.ensemble, s.params, s.integrator); }

void backend_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (const char* name : {"fig2", "fig3", "fig4"}) {
    const auto p = preset(name).params;
    const double horizon = IntegratorOptions{}.resolved_t_end(p);
    for (int k = 0; k < 1000; ++k) {
      const auto c = sample_support_configuration(p, horizon, rng);
      worst = std::max(worst, deviation(velocity_analytic(c, p), velocity_numeric(c, p), p));
    }
  }
  const double secs = seconds_since(start);
  report(1, "analytic vs finite-difference velocity, 3x1000 configurations",
         worst <= 1e-6 && secs < 10.0,
         fmt("worst %.3g (tol 1e-6), %.2f s (limit 10 s)", worst, secs));
}

void sqrt_n_reduction() {
  const auto start = Clock::now();
  double dx = 0.0, ds = 0.0;
  bool shapes = true;
  for (const std::size_t n : {1u, 4u, 9u, 16u}) {
    auto s = preset("fig4");
    s.params = with_single_pointer(s.params, *s.params.common_xi(), n);
    s.ensemble.z_init.mode = PointerInit::Mode::Gaussian;
    s.ensemble.z_init.seed = 100 + n;
    s.ensemble.backend = Backend::FullAnalytic;
    const auto full = run(s);
    s.ensemble.backend = Backend::Reduced;
    s.ensemble.reconstruct = false;
    const auto red = run(s);
    const double root_n = std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < full.size(); ++i) {
      if (full[i].size() != red[i].size() || full[i].degenerate || red[i].degenerate) {
        shapes = false;
        continue;
      }
      for (std::size_t k = 0; k < full[i].size(); ++k) {
        dx = std::max(dx, std::abs(full[i].x[k] - red[i].x[k]));
        const double sigma = full[i].z.row(static_cast<Eigen::Index>(k)).sum() / root_n;
        ds = std::max(ds, std::abs(sigma - red[i].sigma_hat[k]));
      }
    }
  }
  const double secs = seconds_since(start);
  report(2, "full vs reduced trajectories, N in {1,4,9,16}",
         shapes && dx <= 1e-5 && ds <= 1e-5 && secs < 60.0,
         fmt("max|dX'| %.3g, max|dSigma'| %.3g (tol 1e-5), %.2f s (limit 60 s)%s", dx, ds, secs,
             shapes ? "" : ", sample grids differ"));
}

void reconstruction() {
  auto p = preset("fig4").params;
  p = with_single_pointer(p, *p.common_xi(), 5);
  Eigen::VectorXd z0(5);
  z0 << 0.23, -0.61, 0.4, 0.02, -0.35;
  double worst = 0.0, closure = 0.0;
  bool shapes = true;
  for (const double x0 : {2.2, 3.0, 3.6}) {
    Configuration init;
    init.x = x0;
    init.z = z0;
    const auto shared = share(p);
    const auto full = integrate_trajectory(init, shared, IntegratorOptions{}, Backend::FullAnalytic);
    const auto red = integrate_trajectory(init, shared, IntegratorOptions{}, Backend::Reduced, true);
    if (full.size() != red.size() || !red.has_pointers()) {
      shapes = false;
      continue;
    }
    worst = std::max(worst, (full.z - red.z).cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < red.z.rows(); ++k) {
      closure = std::max(closure, std::abs(red.z.row(k).sum() / std::sqrt(5.0) - red.sigma_hat[k]));
    }
  }
  report(3, "pointer reconstruction, N = 5", shapes && worst <= 1e-6 && closure <= 1e-12,
         fmt("max|dZ'| %.3g (tol 1e-6), closure %.3g (tol 1e-12)", worst, closure));
}

void y_oracle() {
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& name : preset_names()) {
    auto s = preset(name);
    s.ensemble.reconstruct = false;
    for (const auto& tr : run(s)) {
      ++count;
      for (std::size_t k = 0; k < tr.size(); ++k) {
        worst = std::max(worst, std::abs(tr.y[k] - y_exact(tr.t[k], tr.initial.y, s.params.xi_y)));
      }
    }
  }
  report(4, "Y' against the free-packet closed form, every preset trajectory", worst <= 1e-8,
         fmt("worst %.3g over %zu trajectories (tol 1e-8)", worst, count));
}

void bounce_and_cross() {
  const auto start = Clock::now();
  const auto slow = run(preset("fig2"));
  const auto fast = run(preset("fig3"));
  const auto none = std::count_if(slow.begin(), slow.end(), [](const auto& t) { return !t.degenerate && !crossed(t); });
  const auto all = std::count_if(fast.begin(), fast.end(), [](const auto& t) { return !t.degenerate && crossed(t); });
  const double secs = seconds_since(start);
  report(5, "no pointer: all bounce; fast pointer: all cross",
         none == 18 && all == 18 && secs < 30.0,
         fmt("fig2 %ld/18 never cross, fig3 %ld/18 cross, %.2f s (limit 30 s)", static_cast<long>(none),
             static_cast<long>(all), secs));
}

void surreal_trend() {
  const auto start = Clock::now();
  auto f4 = preset("fig4");
  f4.ensemble.backend = Backend::Reduced;
  f4.ensemble.reconstruct = false;
  auto f9 = preset("fig9");
  f9.ensemble.reconstruct = false;
  auto f12 = preset("fig12");
  f12.ensemble.reconstruct = false;
  const double b1 = bounce_fraction(run(f4));
  const double b10 = bounce_fraction(run(f9));
  const double b200 = bounce_fraction(run(f12));
  const double secs = seconds_since(start);
  const bool ok = f9.params.n_particles() == 10 && *f9.ensemble.z_init.sigma_hat == 0.0 &&
                  f12.params.n_particles() == 200 && *f12.ensemble.z_init.sigma_hat == 0.3 &&
                  b1 >= 0.7 && b10 < b1 && b200 <= 0.1 && secs < 120.0;
  report(6, "surrealistic fraction falls with N (reduced backend)", ok,
         fmt("N=1: %.3f (>= 0.7), N=10: %.3f (< N=1), N=200 Sigma'=0.3: %.3f (<= 0.1), %.2f s (limit 120 s)",
             b1, b10, b200, secs));
}

void predestination() {
  auto s = preset("fig11");
  s.ensemble.reconstruct = false;
  const auto trajs = run(s);
  std::size_t down = 0;
  for (const auto& tr : trajs) {
    const std::size_t k = tr.size();
    if (!tr.degenerate && k >= 2 && tr.x[k - 1] < tr.x[k - 2]) ++down;
  }
  const double frac = static_cast<double>(down) / 18.0;
  report(7, "N = 10, Sigma'(0) = 1: final motion downward",
         trajs.size() == 18 && s.params.n_particles() == 10 && frac >= 0.9,
         fmt("%zu/18 downward (%.3f, need >= 0.9)", down, frac));
}

void tau_scaling() {
  const auto start = Clock::now();
  const std::vector<std::size_t> ns{4, 16, 64, 256};
  const auto fit = tau_scaling_fit(preset("fig3").params, ns, 1e-3);
  // Least-squares slope of log t against log N, refitted from the raw times.
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    mx += std::log(static_cast<double>(ns[i])) / 4.0;
    my += std::log(fit.times[i]) / 4.0;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double dx = std::log(static_cast<double>(ns[i])) - mx;
    sxy += dx * (std::log(fit.times[i]) - my);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  const double secs = seconds_since(start);
  report(8, "threshold-crossing time scales as N^-1/2",
         std::abs(slope + 0.5) <= 0.05 && secs < 60.0,
         fmt("slope %.4f (-0.5 +/- 0.05), times %.4g %.4g %.4g %.4g, %.2f s (limit 60 s)", slope, fit.times[0],
             fit.times[1], fit.times[2], fit.times[3], secs));
}

void mirror() {
  const auto s = preset("fig4");
  const auto trajs = run(s);
  const double rel = s.integrator.rel_tol, abs = s.integrator.abs_tol;
  double worst = 0.0;  // deviation in units of the 10x allowance
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < 9; ++i) {
    const auto& a = trajs[i];
    const auto& b = trajs[17 - i];
    if (a.size() != b.size() || a.initial.x != -b.initial.x) {
      worst = INFINITY;
      continue;
    }
    ++pairs;
    auto check = [&](double u, double v) {
      worst = std::max(worst, std::abs(u + v) / (10.0 * (abs + rel * std::abs(u))));
    };
    for (std::size_t k = 0; k < a.size(); ++k) {
      check(a.x[k], b.x[k]);
      for (Eigen::Index j = 0; j < a.z.cols(); ++j) {
        check(a.z(static_cast<Eigen::Index>(k), j), b.z(static_cast<Eigen::Index>(k), j));
      }
    }
  }
  report(9, "mirror pairs with Sigma'(0) = 0", pairs == 9 && worst <= 1.0,
         fmt("%zu/9 pairs, worst %.3g of the 10x tolerance allowance", pairs, worst));
}

void performance() {
  const auto cases = default_bench_cases();
  const auto rep = run_bench(preset(kDefaultBenchPreset), cases, 3);
  double lo = INFINITY, hi = 0.0, full50 = INFINITY;
  for (const auto& row : rep.rows) {
    if (row.backend == Backend::Reduced) {
      lo = std::min(lo, row.median_core_seconds);
      hi = std::max(hi, row.median_core_seconds);
    } else if (row.n == 50) {
      full50 = row.median_core_seconds;
    }
    std::printf("      %-13s N=%-8zu core %.4g s\n", std::string(to_string(row.backend)).c_str(), row.n,
                row.median_core_seconds);
  }
  const double ratio = hi / lo;
  report(10, "reduced time flat in N; full N = 50 ensemble within budget", ratio < 2.0 && full50 < 60.0,
         fmt("%s base: reduced max/min %.3f (< 2) over N in {1,1e4,1e6}, full N=50 %.3f s (< 60 s)",
             kDefaultBenchPreset, ratio, full50));

  std::vector<BenchCase> reduced;
  for (const auto& c : cases) {
    if (c.backend == Backend::Reduced) reduced.push_back(c);
  }
  const auto slow = run_bench(preset("fig4"), reduced, 3);
  std::printf("INFO [10] fig4 base: reduced max/min %.3f (step count differs with the physics of N)\n",
              slow.reduced_time_ratio);
}

}  // namespace

int main() {
  const auto start = Clock::now();
  backend_equivalence();
  sqrt_n_reduction();
  reconstruction();
  y_oracle();
  bounce_and_cross();
  surreal_trend();
  predestination();
  tau_scaling();
  mirror();
  performance();
  std::printf("%d failure(s), %.1f s\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
