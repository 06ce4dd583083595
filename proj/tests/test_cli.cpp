#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bohm/bench.hpp"
#include "bohm/output.hpp"
#include "bohm/plot.hpp"
#include "bohm/scenario.hpp"
#include "bohm/validate.hpp"
#include "support.hpp"

using namespace bohm;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bohm_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BOHM_SIM_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("every preset survives a serialize/parse round trip") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto s = preset(name);
    const auto back = scenario_from_json(nlohmann::json::parse(to_json(s).dump()));
    CHECK(back == s);
    CHECK(to_json(back) == to_json(s));
  }
}

TEST_CASE("round trip through a file keeps every double exactly") {
  auto s = preset("fig10");
  s.params.xi_x = 0.1 + 0.2;
  s.integrator.t_end = 1.0 / 3.0;
  s.integrator.stride = 1e-3 / 7.0;
  s.ensemble.extent = 0.7000000000000001;
  const auto dir = scratch_dir("roundtrip");
  save_scenario(s, dir / "s.json");
  CHECK(load_scenario(dir / "s.json") == s);
}

TEST_CASE("unknown keys and bad values are rejected") {
  auto doc = to_json(preset("fig4"));
  SUBCASE("top level") { doc["colour"] = "blue"; }
  SUBCASE("params") { doc["params"]["xi_z"] = 1.0; }
  SUBCASE("pointer") { doc["params"]["pointer"]["speed"] = 1.0; }
  SUBCASE("ensemble") { doc["ensemble"]["grid"] = 3; }
  SUBCASE("z_init") { doc["ensemble"]["z_init"]["sigma"] = 0.1; }
  SUBCASE("integrator") { doc["integrator"]["method"] = "rk4"; }
  SUBCASE("outputs") { doc["outputs"]["format"] = "csv"; }
  SUBCASE("schema version") { doc["schema_version"] = 2; }
  SUBCASE("wrong type") { doc["params"]["r"] = "one"; }
  SUBCASE("missing field") { doc["params"].erase("mu"); }
  SUBCASE("bad backend") { doc["ensemble"]["backend"] = "fast"; }
  SUBCASE("bad pointer count") { doc["params"]["pointer"] = {{"mode", "two"}, {"xi", 10.0}}; }
  CHECK_THROWS_AS(scenario_from_json(doc), ConfigError);
}

TEST_CASE("presets encode the caption parameters") {
  const auto f3 = preset("fig3").params;
  CHECK(f3.xi_x == 10.0);
  CHECK(*f3.common_xi() == 10.0);
  CHECK(f3.r == 1.0);
  CHECK(f3.R == 1.0);
  CHECK(f3.d_prime == 3.0);
  CHECK(f3.mu == 1.0);
  CHECK(*preset("fig2").params.common_xi() == 0.0);
  CHECK(preset("fig4").params.R == 0.2);
  CHECK(preset("fig5").ensemble.z_init.value == 0.3);
  CHECK(preset("fig5-text").ensemble.z_init.value == 0.5);
  CHECK(preset("fig7").ensemble.z_init.values == std::vector<double>{0.01, 0.01});
  CHECK(preset("fig8").ensemble.z_init.values == std::vector<double>{0.5, 0.9});
  CHECK(preset("fig7").params.pointer_velocities ==
        std::vector<PointerVelocity>{{10.0, 0.0}, {0.0, 10.0}});
  CHECK(preset("fig9").params.n_particles() == 10);
  CHECK(*preset("fig9").ensemble.z_init.sigma_hat == 0.0);
  CHECK(*preset("fig10").ensemble.z_init.sigma_hat == 0.3);
  CHECK(*preset("fig11").ensemble.z_init.sigma_hat == 1.0);
  CHECK(preset("fig12").params.n_particles() == 200);
  CHECK(preset("fig12").ensemble.backend == Backend::Reduced);
  CHECK_THROWS_AS(preset("fig13"), ConfigError);
}

TEST_CASE("particle-count override") {
  auto s = preset("fig9");
  override_particle_count(s, 50);
  CHECK(s.params.n_particles() == 50);
  auto two = preset("fig7");
  CHECK_THROWS_AS(override_particle_count(two, 3), ConfigError);
}

TEST_CASE("CSV layout and precision") {
  auto s = preset("fig4");
  s.ensemble.count_per_slit = 1;
  const auto run = run_scenario(s);
  std::ostringstream out;
  write_trajectory_csv(out, run.trajectories[0]);
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "t_prime,X,Y,Z_1,logOmega,deltaS");
  CHECK(first.rfind("0,3,0,0,", 0) == 0);

  // Every value reads back to the identical double.
  const auto& tr = run.trajectories[0];
  std::string row;
  for (std::size_t i = 1; i < tr.size(); ++i) std::getline(in, row);
  std::istringstream cells(row);
  std::string cell;
  std::getline(cells, cell, ',');
  CHECK(std::stod(cell) == tr.t.back());
  std::getline(cells, cell, ',');
  CHECK(std::stod(cell) == tr.x.back());

  auto r = preset("fig12");
  r.ensemble.count_per_slit = 1;
  r.ensemble.reconstruct = false;
  std::ostringstream out2;
  write_trajectory_csv(out2, run_scenario(r).trajectories[0]);
  CHECK(out2.str().rfind("t_prime,X,Y,Sigma_hat,logOmega,deltaS\n", 0) == 0);
}

TEST_CASE("same scenario and seed give byte-identical outputs") {
  auto s = preset("fig10");
  const auto a = scratch_dir("repro_a"), b = scratch_dir("repro_b");
  write_run(run_scenario(s), a);
  s.ensemble.threads = 2;
  write_run(run_scenario(s), b);
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    if (name == "manifest.json") continue;
    CHECK(slurp(a / name) == slurp(b / name));
  }
  const auto ma = nlohmann::json::parse(slurp(a / "manifest.json"));
  const auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
  CHECK(strip_timing(ma) == strip_timing(mb));
  CHECK(ma.contains("timing"));
  CHECK(ma["seed"] == 10);
  CHECK(ma["trajectories"].size() == 18);
  CHECK(scenario_from_json(ma["scenario"]) == preset("fig10"));
}

TEST_CASE("manifest summarizes the classification") {
  const auto run = run_scenario(preset("fig2"));
  const auto m = build_manifest(run, {});
  CHECK(m["classification"]["crossing_fraction"] == 0.0);
  CHECK(m["classification"]["count"] == 18);
  CHECK(m["derived"]["t_cross"] == doctest::Approx(3.0));
  CHECK(m["trajectories"][0]["stats"]["steps"].get<int>() > 0);
}

TEST_CASE("plot panels: two for one pointer, three for two pointers") {
  const auto d4 = scratch_dir("plot4");
  write_run(run_scenario(preset("fig4")), d4);
  ScenarioParams p4;
  const auto t4 = load_run(d4, &p4);
  CHECK(t4.size() == 18);
  const auto panels4 = render_panels(t4, p4);
  REQUIRE(panels4.size() == 2);
  CHECK(panels4[0].file == "test_particle.svg");
  CHECK(panels4[1].file == "pointer.svg");
  CHECK(panels4[0].svg.find("stroke-dasharray") != std::string::npos);
  CHECK(render_panels(t4, p4)[0].svg == panels4[0].svg);  // deterministic

  const auto d7 = scratch_dir("plot7");
  write_run(run_scenario(preset("fig7")), d7);
  ScenarioParams p7;
  const auto panels7 = render_panels(load_run(d7, &p7), p7);
  REQUIRE(panels7.size() == 3);
  CHECK(panels7[2].file == "pointer_2.svg");

  CHECK_THROWS_AS(render_panels({}, p4), ConfigError);
  CHECK_THROWS_AS(load_run(scratch_dir("plot_empty")), ConfigError);
}

TEST_CASE("loaded runs reproduce the in-memory trajectories") {
  const auto dir = scratch_dir("reload");
  const auto run = run_scenario(preset("fig8"));
  write_run(run, dir);
  const auto back = load_run(dir);
  REQUIRE(back.size() == run.trajectories.size());
  CHECK(back[1].x == run.trajectories[1].x);
  CHECK(back[1].z == run.trajectories[1].z);
}

TEST_CASE("bench rejects zero repetitions and reports per-case medians") {
  const auto base = preset(kDefaultBenchPreset);
  const std::vector<BenchCase> cases{{Backend::Reduced, 1}, {Backend::Reduced, 1000}};
  CHECK_THROWS_AS(run_bench(base, cases, 0), ConfigError);
  const auto report = run_bench(base, cases, 1);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[1].median_core_seconds > 0.0);
  CHECK(report.reduced_time_ratio >= 1.0);
  CHECK(to_json(report)["rows"].size() == 2);
}

TEST_CASE("validation suites pass on the shipped field") {
  ValidationOptions opts;
  opts.samples = 200;
  for (const auto& r : run_validation({}, opts)) {
    CAPTURE(r.name);
    CAPTURE(r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("a sign error in Xi is caught by backend equivalence") {
  ValidationOptions opts;
  opts.samples = 200;
  opts.velocity = [](const Configuration& c, const ScenarioParams& p) {
    ScenarioParams wrong = p;
    for (auto& pv : wrong.pointer_velocities) std::swap(pv.upper, pv.lower);
    return velocity_analytic(c, wrong);
  };
  const std::vector<std::string> only{"backend-equivalence"};
  const auto results = run_validation(only, opts);
  REQUIRE(results.size() == 1);
  CHECK_FALSE(results[0].passed);
}

TEST_CASE("suite filter") {
  const std::vector<std::string> only{"tau-scaling"};
  const auto results = run_validation(only);
  REQUIRE(results.size() == 1);
  CHECK(results[0].name == "tau-scaling");
  const std::vector<std::string> bad{"everything"};
  CHECK_THROWS_AS(run_validation(bad), ConfigError);
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch_dir("cli");
  CHECK(run_cli("simulate --preset fig4 --out " + (dir / "fig4").string()) == 0);
  CHECK(fs::exists(dir / "fig4" / "traj_017.csv"));
  CHECK(run_cli("plot " + (dir / "fig4").string()) == 0);
  CHECK(fs::exists(dir / "fig4" / "pointer.svg"));
  CHECK(run_cli("simulate --preset fig99") == 2);
  CHECK(run_cli("simulate --preset fig4 --backend warp") == 2);
  CHECK(run_cli("simulate --preset fig7 --backend reduced") == 2);
  CHECK(run_cli("bench --repetitions 0") == 2);
  CHECK(run_cli("validate --only tau-scaling") == 0);
  CHECK(run_cli("validate --only nonsense") == 2);

  std::ofstream(dir / "bad.json") << R"({"schema_version": 1, "params": {}, "extra": 1})";
  CHECK(run_cli("simulate --scenario " + (dir / "bad.json").string()) == 2);

  // A horizon the stepper cannot resolve aborts instead of stalling.
  auto s = preset("fig4");
  s.integrator.t_end = 1e300;
  save_scenario(s, dir / "huge.json");
  CHECK(run_cli("simulate --scenario " + (dir / "huge.json").string()) == 3);
}
