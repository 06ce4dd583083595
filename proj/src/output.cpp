#include "bohm/output.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "bohm/errors.hpp"

namespace bohm {

using nlohmann::json;

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "traj_%03zu.csv", i);
  return buf;
}

const char* slit_name(Slit s) { return s == Slit::Upper ? "upper" : "lower"; }

json stats_to_json(const IntegratorStats& s) {
  return {{"steps", s.steps}, {"rejections", s.rejections},
          {"node_events", s.node_events}, {"rhs_evals", s.rhs_evals}};
}

}  // namespace

RunResult run_scenario(const ScenarioFile& scenario) {
  RunResult run;
  run.scenario = scenario;
  EnsembleSpec spec = scenario.ensemble;
  if (spec.threads == 0) spec.threads = threads_from_environment();
  const auto start = std::chrono::steady_clock::now();
  run.trajectories = run_ensemble(spec, scenario.params, scenario.integrator);
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.summary = summarize(run.trajectories);
  return run;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int stride) {
  if (stride < 1) throw ConfigError("CSV stride must be at least 1");
  const bool pointers = traj.has_pointers();
  out << "t_prime,X,Y";
  if (pointers) {
    for (Eigen::Index n = 0; n < traj.z.cols(); ++n) out << ",Z_" << n + 1;
  } else {
    out << ",Sigma_hat";
  }
  out << ",logOmega,deltaS\n";

  const std::size_t k = traj.size();
  auto row = [&](std::size_t i) {
    out << format_number(traj.t[i]) << ',' << format_number(traj.x[i]) << ','
        << format_number(traj.y[i]);
    if (pointers) {
      for (Eigen::Index n = 0; n < traj.z.cols(); ++n) {
        out << ',' << format_number(traj.z(static_cast<Eigen::Index>(i), n));
      }
    } else {
      out << ',' << format_number(traj.sigma_hat[i]);
    }
    out << ',' << format_number(traj.log_omega[i]) << ',' << format_number(traj.delta_s[i]) << '\n';
  };
  const auto step = static_cast<std::size_t>(stride);
  for (std::size_t i = 0; i < k; i += step) row(i);
  // Always keep the final sample so the horizon state is on disk.
  if (k > 0 && (k - 1) % step != 0) row(k - 1);
}

json build_manifest(const RunResult& run, const std::vector<std::string>& csv_files) {
  const auto& s = run.summary;
  json trajs = json::array();
  for (std::size_t i = 0; i < run.trajectories.size(); ++i) {
    const auto& tr = run.trajectories[i];
    const auto& rec = s.records[i];
    json entry = {
        {"index", i},
        {"x0", tr.initial.x},
        {"y0", tr.initial.y},
        {"sigma_hat0", tr.initial.sigma_hat()},
        {"slit", slit_name(rec.initial_slit)},
        {"crossed", rec.crossed_plane},
        {"crossing_time", rec.crossing_time ? json(*rec.crossing_time) : json(nullptr)},
        {"final_direction", rec.final_direction},
        {"degenerate", rec.degenerate},
        {"samples", tr.size()},
        {"t_reached", tr.t.empty() ? 0.0 : tr.t.back()},
        {"stats", stats_to_json(tr.stats)},
    };
    if (i < csv_files.size()) entry["file"] = csv_files[i];
    trajs.push_back(std::move(entry));
  }

  const auto& p = run.scenario.params;
  json derived = {{"t_cross", crossing_time(p)},
                  {"t_end", run.scenario.integrator.resolved_t_end(p)},
                  {"velocity_scale_x", p.velocity_scale_x()},
                  {"velocity_scale_y", p.velocity_scale_y()},
                  {"velocity_scale_z", p.velocity_scale_z()}};
  if (p.single_pointer()) {
    derived["fast_pointer_E"] = fast_pointer_E(p);
    if (p.n_particles() > 0 && *p.common_xi() != 0.0) derived["overlap_time"] = overlap_time(p);
  }

  json seed = nullptr;
  if (run.scenario.ensemble.z_init.mode == PointerInit::Mode::Gaussian) {
    seed = run.scenario.ensemble.z_init.seed;
  }

  return {
      {"scenario", to_json(run.scenario)},
      {"seed", seed},
      {"derived", derived},
      {"classification",
       {{"bounce_fraction", s.bounce_fraction},
        {"crossing_fraction", s.crossing_fraction},
        {"downward_fraction", s.downward_fraction},
        {"excluded", s.excluded},
        {"count", s.records.size()}}},
      {"trajectories", trajs},
      {"timing", {{"wall_seconds", run.wall_seconds}}},
  };
}

void write_run(const RunResult& run, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

  const auto& formats = run.scenario.outputs.formats;
  const auto wants = [&](const char* f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };

  std::vector<std::string> files;
  if (wants("csv")) {
    for (std::size_t i = 0; i < run.trajectories.size(); ++i) {
      files.push_back(csv_name(i));
      std::ofstream out(dir / files.back());
      if (!out) throw ConfigError("cannot write " + (dir / files.back()).string());
      write_trajectory_csv(out, run.trajectories[i], run.scenario.outputs.stride);
    }
  }
  if (wants("manifest")) {
    std::ofstream out(dir / "manifest.json");
    if (!out) throw ConfigError("cannot write " + (dir / "manifest.json").string());
    out << build_manifest(run, files).dump(2) << '\n';
  }
}

json strip_timing(json manifest) {
  manifest.erase("timing");
  return manifest;
}

}  // namespace bohm
