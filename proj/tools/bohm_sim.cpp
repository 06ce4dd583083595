#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bohm/bench.hpp"
#include "bohm/errors.hpp"
#include "bohm/output.hpp"
#include "bohm/plot.hpp"
#include "bohm/scenario.hpp"
#include "bohm/validate.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;

struct Selection {
  std::string preset;
  std::string scenario;
  std::string backend;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::string out;
  bool json = false;
};

void add_selection(CLI::App* cmd, Selection& sel) {
  auto* p = cmd->add_option("--preset", sel.preset, "Named preset (fig2 ... fig12)");
  auto* s = cmd->add_option("--scenario", sel.scenario, "Scenario file (JSON)")->check(CLI::ExistingFile);
  p->excludes(s);
  cmd->add_option("--backend", sel.backend, "full-analytic | full-numeric | reduced");
  cmd->add_option("--seed", sel.seed, "Seed for Gaussian pointer initials");
  cmd->add_option("--n", sel.n, "Override the number of pointer particles");
  cmd->add_option("--out", sel.out, "Output directory");
  cmd->add_flag("--json", sel.json, "Machine-readable output on stdout");
}

bohm::ScenarioFile resolve(const Selection& sel) {
  if (sel.preset.empty() && sel.scenario.empty()) throw bohm::ConfigError("give --preset or --scenario");
  bohm::ScenarioFile s = sel.preset.empty() ? bohm::load_scenario(sel.scenario) : bohm::preset(sel.preset);
  if (!sel.backend.empty()) s.ensemble.backend = bohm::parse_backend(sel.backend);
  if (sel.n) bohm::override_particle_count(s, *sel.n);
  if (sel.seed) {
    if (s.ensemble.z_init.mode != bohm::PointerInit::Mode::Gaussian) {
      throw bohm::ConfigError("--seed applies to Gaussian pointer initials only");
    }
    s.ensemble.z_init.seed = *sel.seed;
  }
  if (!sel.out.empty()) s.outputs.dir = sel.out;
  if (s.outputs.dir.empty()) s.outputs.dir = "run";
  if (s.ensemble.backend == bohm::Backend::Reduced && s.ensemble.reconstruct &&
      static_cast<double>(s.params.n_particles()) * 2.0 * s.ensemble.count_per_slit *
              static_cast<double>(bohm::kDefaultSamplesPerRun + 1) > bohm::kMaxReconstructedValues) {
    s.ensemble.reconstruct = false;  // too many pointers to store; keep Σ̂′ only
  }
  return s;
}

void print_summary(const bohm::RunResult& run, const std::string& dir) {
  const auto& s = run.summary;
  std::printf("%s: %zu trajectories (%s) -> %s\n", run.scenario.name.c_str(), run.trajectories.size(),
              std::string(bohm::to_string(run.scenario.ensemble.backend)).c_str(), dir.c_str());
  std::printf("  bounce %.3f  crossing %.3f  downward %.3f  excluded %zu  (%.2f s)\n", s.bounce_fraction,
              s.crossing_fraction, s.downward_fraction, s.excluded, run.wall_seconds);
}

int cmd_simulate(const Selection& sel) {
  const auto scenario = resolve(sel);
  const auto run = bohm::run_scenario(scenario);
  bohm::write_run(run, scenario.outputs.dir);
  if (sel.json) {
    std::cout << bohm::build_manifest(run, {}).dump(2) << '\n';
  } else {
    print_summary(run, scenario.outputs.dir);
  }
  return 0;
}

int cmd_plot(const Selection& sel, const std::string& run_dir) {
  std::vector<bohm::Trajectory> trajs;
  bohm::ScenarioParams params;
  std::string out = sel.out;
  if (!run_dir.empty()) {
    trajs = bohm::load_run(run_dir, &params);
    if (out.empty()) out = run_dir;
  } else {
    const auto scenario = resolve(sel);
    auto run = bohm::run_scenario(scenario);
    bohm::write_run(run, scenario.outputs.dir);
    params = scenario.params;
    trajs = std::move(run.trajectories);
    out = scenario.outputs.dir;
  }
  const auto panels = bohm::render_panels(trajs, params);
  bohm::write_panels(panels, out);
  nlohmann::json files = nlohmann::json::array();
  for (const auto& p : panels) files.push_back(p.file);
  if (sel.json) {
    std::cout << nlohmann::json{{"dir", out}, {"panels", files}}.dump(2) << '\n';
  } else {
    for (const auto& p : panels) std::printf("wrote %s/%s\n", out.c_str(), p.file.c_str());
  }
  return 0;
}

int cmd_bench(const Selection& sel, const std::vector<std::size_t>& n_list,
              const std::vector<std::string>& backends, std::size_t repetitions) {
  Selection base_sel = sel;
  if (base_sel.preset.empty() && base_sel.scenario.empty()) base_sel.preset = bohm::kDefaultBenchPreset;
  base_sel.backend.clear();
  base_sel.n.reset();
  const auto base = resolve(base_sel);

  std::vector<bohm::BenchCase> cases;
  if (n_list.empty() && backends.empty()) {
    cases = bohm::default_bench_cases();
  } else {
    std::vector<bohm::Backend> bks;
    for (const auto& b : backends) bks.push_back(bohm::parse_backend(b));
    if (bks.empty()) bks = {bohm::Backend::Reduced, bohm::Backend::FullAnalytic};
    for (const auto b : bks) {
      for (const auto n : n_list) cases.push_back({b, n});
      if (n_list.empty()) {
        for (const auto& d : bohm::default_bench_cases()) {
          if (d.backend == b) cases.push_back(d);
        }
      }
    }
  }
  const auto report = bohm::run_bench(base, cases, repetitions);
  if (sel.json) {
    std::cout << bohm::to_json(report).dump(2) << '\n';
  } else {
    std::printf("%-14s %10s %6s %16s %18s\n", "backend", "N", "reps", "core median [s]", "rebuild median [s]");
    for (const auto& r : report.rows) {
      std::printf("%-14s %10zu %6zu %16.4f %18.6f\n", std::string(bohm::to_string(r.backend)).c_str(), r.n,
                  r.repetitions, r.median_core_seconds, r.median_reconstruct_seconds);
    }
    std::printf("reduced core time ratio across N: %.3f (%s, limit %.1f)\n", report.reduced_time_ratio,
                report.reduced_flat ? "flat" : "NOT flat", bohm::kReducedTimeRatioLimit);
    std::printf("full-backend time increases with N: %s\n", report.full_monotonic ? "yes" : "no");
  }
  return report.reduced_flat ? 0 : kExitFailure;
}

int cmd_validate(const std::vector<std::string>& only, std::size_t samples, bool json) {
  bohm::ValidationOptions opts;
  opts.samples = samples;
  const auto results = bohm::run_validation(only, opts);
  bool ok = true;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    rows.push_back({{"suite", r.name}, {"passed", r.passed}, {"metric", r.metric},
                    {"tolerance", r.tolerance}, {"detail", r.detail}});
    if (!json) {
      std::printf("%-20s %s  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str());
    }
  }
  if (json) std::cout << nlohmann::json{{"passed", ok}, {"suites", rows}}.dump(2) << '\n';
  return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bohmian trajectories of a two-slit test particle entangled with an N-particle pointer"};
  app.require_subcommand(1);

  Selection sim_sel, plot_sel, bench_sel;
  auto* simulate = app.add_subcommand("simulate", "Integrate a scenario's ensemble and write CSV + manifest");
  add_selection(simulate, sim_sel);

  auto* plot = app.add_subcommand("plot", "Render SVG panels for a run directory (or a fresh run)");
  add_selection(plot, plot_sel);
  std::string run_dir;
  plot->add_option("run_dir", run_dir, "Directory written by simulate")->check(CLI::ExistingDirectory);

  auto* bench = app.add_subcommand("bench", "Time ensembles across N and backends");
  add_selection(bench, bench_sel);
  std::vector<std::size_t> bench_n;
  std::vector<std::string> bench_backends;
  std::size_t repetitions = 3;
  bench->add_option("--n-list", bench_n, "Pointer counts to time")->delimiter(',');
  bench->add_option("--backends", bench_backends, "Backends to time")->delimiter(',');
  bench->add_option("--repetitions", repetitions, "Repetitions per case (median reported)");

  auto* validate = app.add_subcommand("validate", "Run the self-validation suites");
  std::vector<std::string> only;
  std::size_t samples = 1000;
  bool validate_json = false;
  validate->add_option("--only", only, "Run only these suites")->delimiter(',');
  validate->add_option("--samples", samples, "Random configurations per preset");
  validate->add_flag("--json", validate_json, "Machine-readable output on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim_sel);
    if (*plot) return cmd_plot(plot_sel, run_dir);
    if (*bench) return cmd_bench(bench_sel, bench_n, bench_backends, repetitions);
    if (*validate) return cmd_validate(only, samples, validate_json);
  } catch (const bohm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const bohm::ModeError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const bohm::IntegrationAbort& e) {
    std::fprintf(stderr, "integration aborted: %s\n", e.what());
    return kExitAbort;
  } catch (const bohm::NodeError& e) {
    std::fprintf(stderr, "integration aborted: %s\n", e.what());
    return kExitAbort;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return 0;
}
