#include "bohm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "bohm/errors.hpp"
#include "bohm/reduced.hpp"

namespace bohm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Each timing sample repeats the ensemble until it lasts at least this long,
// so millisecond-scale runs are not dominated by scheduler noise.
constexpr double kMinSampleSeconds = 0.02;

// A handful of samples is enough to time the O(N) rebuild without holding
// a full samples × N matrix for N = 10⁶.
constexpr std::size_t kReconstructSamples = 8;

}  // namespace

std::vector<BenchCase> default_bench_cases() {
  return {{Backend::Reduced, 1},          {Backend::Reduced, 10'000}, {Backend::Reduced, 1'000'000},
          {Backend::FullAnalytic, 1},     {Backend::FullAnalytic, 10}, {Backend::FullAnalytic, 50}};
}

BenchReport run_bench(const ScenarioFile& base, std::span<const BenchCase> cases, std::size_t repetitions) {
  if (repetitions == 0) throw ConfigError("bench needs at least one repetition");
  const auto xi = base.params.common_xi();
  if (!xi) throw ModeError("bench needs a single-pointer scenario");

  BenchReport report;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& bc : cases) {
    if (bc.n == 0) throw ConfigError("bench needs N >= 1");
    const ScenarioParams params = with_single_pointer(base.params, *xi, bc.n);
    EnsembleSpec spec = base.ensemble;
    spec.backend = bc.backend;
    spec.z_init.mode = PointerInit::Mode::Gaussian;
    if (!spec.z_init.sigma_hat) spec.z_init.sigma_hat = 0.0;
    const auto initials = sample_initials(spec, params);
    const auto shared = share(params);
    const bool reduced = bc.backend == Backend::Reduced;
    const ReducedSystem sys = reduced ? make_reduced_system(shared) : ReducedSystem{};
    std::vector<double> s0;
    for (const auto& init : initials) s0.push_back(init.sigma_hat());

    std::vector<double> core, rebuild;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      std::vector<Trajectory> trajs;
      std::size_t rounds = 0;
      const auto start = Clock::now();
      do {
        trajs.clear();
        for (std::size_t i = 0; i < initials.size(); ++i) {
          const auto& init = initials[i];
          trajs.push_back(reduced ? integrate_reduced_core(init.x, init.y, s0[i], sys, base.integrator)
                                  : integrate_trajectory(init, shared, base.integrator, bc.backend));
        }
        ++rounds;
      } while (seconds_since(start) < kMinSampleSeconds);
      core.push_back(seconds_since(start) / static_cast<double>(rounds));

      if (reduced) {
        const auto& tr = trajs.front();
        std::vector<double> t, s;
        const std::size_t stride = std::max<std::size_t>(1, tr.size() / kReconstructSamples);
        for (std::size_t i = 0; i < tr.size(); i += stride) {
          t.push_back(tr.t[i]);
          s.push_back(tr.sigma_hat[i]);
        }
        const auto r0 = Clock::now();
        const auto z = reconstruct_pointers(t, s, initials.front().z, params);
        rebuild.push_back(seconds_since(r0));
        if (z.cols() != static_cast<Eigen::Index>(bc.n)) throw Error("pointer rebuild lost particles");
      }
    }

    BenchRow row{bc.backend, bc.n, repetitions, median(core), rebuild.empty() ? 0.0 : median(rebuild)};
    if (bc.backend == Backend::Reduced) {
      lo = std::min(lo, row.median_core_seconds);
      hi = std::max(hi, row.median_core_seconds);
    }
    report.rows.push_back(row);
  }
  std::vector<BenchRow> full;
  for (const auto& r : report.rows) {
    if (r.backend != Backend::Reduced) full.push_back(r);
  }
  std::sort(full.begin(), full.end(), [](const BenchRow& a, const BenchRow& b) { return a.n < b.n; });
  for (std::size_t i = 1; i < full.size(); ++i) {
    if (full[i].backend == full[i - 1].backend && full[i].n > full[i - 1].n &&
        !(full[i].median_core_seconds > full[i - 1].median_core_seconds)) {
      report.full_monotonic = false;
    }
  }
  if (hi > 0.0) {
    report.reduced_time_ratio = hi / lo;
    report.reduced_flat = report.reduced_time_ratio < kReducedTimeRatioLimit;
  }
  return report;
}

nlohmann::json to_json(const BenchReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"backend", std::string(to_string(r.backend))},
                    {"n", r.n},
                    {"repetitions", r.repetitions},
                    {"median_core_seconds", r.median_core_seconds},
                    {"median_reconstruct_seconds", r.median_reconstruct_seconds}});
  }
  return {{"rows", rows},
          {"reduced_time_ratio", report.reduced_time_ratio},
          {"reduced_flat", report.reduced_flat},
          {"full_monotonic", report.full_monotonic}};
}

}  // namespace bohm
