#include "bohm/scenario.hpp"

#include <fstream>
#include <set>

#include "bohm/errors.hpp"

namespace bohm {

using nlohmann::json;

namespace {

void require_object(const json& j, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
}

void reject_unknown(const json& j, std::string_view where, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T get(const json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) throw ConfigError("missing '" + std::string(key) + "' in " + std::string(where));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + std::string(where));
  }
}

template <typename T>
T get_or(const json& j, const char* key, std::string_view where, T fallback) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

std::optional<double> get_optional(const json& j, const char* key, std::string_view where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<double>(j, key, where);
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

ScenarioParams params_from_json(const json& j) {
  constexpr std::string_view where = "params";
  require_object(j, where);
  reject_unknown(j, where, {"xi_x", "xi_y", "r", "R", "mu", "d_prime", "n_particles", "pointer"});
  ScenarioParams p;
  p.xi_x = get<double>(j, "xi_x", where);
  p.xi_y = get<double>(j, "xi_y", where);
  p.r = get<double>(j, "r", where);
  p.R = get<double>(j, "R", where);
  p.mu = get<double>(j, "mu", where);
  p.d_prime = get<double>(j, "d_prime", where);
  const auto n = get<std::size_t>(j, "n_particles", where);

  const json& ptr = j.contains("pointer") ? j.at("pointer") : throw ConfigError("missing 'pointer' in params");
  constexpr std::string_view pwhere = "params.pointer";
  require_object(ptr, pwhere);
  const auto mode = get<std::string>(ptr, "mode", pwhere);
  if (mode == "single") {
    reject_unknown(ptr, pwhere, {"mode", "xi"});
    p = with_single_pointer(p, get<double>(ptr, "xi", pwhere), n);
  } else if (mode == "two") {
    reject_unknown(ptr, pwhere, {"mode", "xi"});
    if (n != 2) throw ConfigError("two-pointer mode needs n_particles = 2");
    p = with_two_pointers(p, get<double>(ptr, "xi", pwhere));
  } else if (mode == "explicit") {
    reject_unknown(ptr, pwhere, {"mode", "velocities"});
    const auto table = get<std::vector<std::array<double, 2>>>(ptr, "velocities", pwhere);
    if (table.size() != n) throw ConfigError("pointer velocity table must have n_particles rows");
    for (const auto& row : table) p.pointer_velocities.push_back({row[0], row[1]});
  } else {
    throw ConfigError("pointer mode must be single, two or explicit");
  }
  p.validate();
  return p;
}

json params_to_json(const ScenarioParams& p) {
  json ptr;
  const auto n = p.n_particles();
  if (const auto xi = p.common_xi()) {
    ptr = {{"mode", "single"}, {"xi", *xi}};
  } else if (n == 2 && p.pointer_velocities[0].lower == 0.0 && p.pointer_velocities[1].upper == 0.0 &&
             p.pointer_velocities[0].upper == p.pointer_velocities[1].lower) {
    ptr = {{"mode", "two"}, {"xi", p.pointer_velocities[0].upper}};
  } else {
    json rows = json::array();
    for (const auto& pv : p.pointer_velocities) rows.push_back({pv.upper, pv.lower});
    ptr = {{"mode", "explicit"}, {"velocities", rows}};
  }
  return {{"xi_x", p.xi_x}, {"xi_y", p.xi_y}, {"r", p.r},       {"R", p.R},
          {"mu", p.mu},     {"d_prime", p.d_prime}, {"n_particles", n}, {"pointer", ptr}};
}

PointerInit z_init_from_json(const json& j) {
  constexpr std::string_view where = "ensemble.z_init";
  require_object(j, where);
  PointerInit z;
  const auto mode = get<std::string>(j, "mode", where);
  if (mode == "common") {
    reject_unknown(j, where, {"mode", "value"});
    z.mode = PointerInit::Mode::Common;
    z.value = get<double>(j, "value", where);
  } else if (mode == "explicit") {
    reject_unknown(j, where, {"mode", "values"});
    z.mode = PointerInit::Mode::Explicit;
    z.values = get<std::vector<double>>(j, "values", where);
  } else if (mode == "gaussian") {
    reject_unknown(j, where, {"mode", "seed", "sigma_hat"});
    z.mode = PointerInit::Mode::Gaussian;
    z.seed = get<std::uint64_t>(j, "seed", where);
    z.sigma_hat = get_optional(j, "sigma_hat", where);
  } else {
    throw ConfigError("z_init mode must be common, explicit or gaussian");
  }
  return z;
}

json z_init_to_json(const PointerInit& z) {
  switch (z.mode) {
    case PointerInit::Mode::Common: return {{"mode", "common"}, {"value", z.value}};
    case PointerInit::Mode::Explicit: return {{"mode", "explicit"}, {"values", z.values}};
    case PointerInit::Mode::Gaussian:
      return {{"mode", "gaussian"}, {"seed", z.seed}, {"sigma_hat", optional_to_json(z.sigma_hat)}};
  }
  return {};
}

EnsembleSpec ensemble_from_json(const json& j) {
  constexpr std::string_view where = "ensemble";
  require_object(j, where);
  reject_unknown(j, where, {"count_per_slit", "extent", "z_init", "backend", "reconstruct"});
  EnsembleSpec e;
  e.count_per_slit = get_or<int>(j, "count_per_slit", where, e.count_per_slit);
  e.extent = get_or<double>(j, "extent", where, e.extent);
  if (j.contains("z_init")) e.z_init = z_init_from_json(j.at("z_init"));
  if (j.contains("backend")) e.backend = parse_backend(get<std::string>(j, "backend", where));
  e.reconstruct = get_or<bool>(j, "reconstruct", where, e.reconstruct);
  e.validate();
  return e;
}

json ensemble_to_json(const EnsembleSpec& e) {
  return {{"count_per_slit", e.count_per_slit},
          {"extent", e.extent},
          {"z_init", z_init_to_json(e.z_init)},
          {"backend", std::string(to_string(e.backend))},
          {"reconstruct", e.reconstruct}};
}

IntegratorOptions integrator_from_json(const json& j) {
  constexpr std::string_view where = "integrator";
  require_object(j, where);
  reject_unknown(j, where, {"rel_tol", "abs_tol", "max_step", "t_end", "stride", "node_epsilon", "fd_step"});
  IntegratorOptions o;
  o.rel_tol = get_or<double>(j, "rel_tol", where, o.rel_tol);
  o.abs_tol = get_or<double>(j, "abs_tol", where, o.abs_tol);
  o.max_step = get_or<double>(j, "max_step", where, o.max_step);
  o.t_end = get_optional(j, "t_end", where);
  o.stride = get_optional(j, "stride", where);
  o.node_epsilon = get_or<double>(j, "node_epsilon", where, o.node_epsilon);
  o.fd_step = get_or<double>(j, "fd_step", where, o.fd_step);
  o.validate();
  return o;
}

json integrator_to_json(const IntegratorOptions& o) {
  return {{"rel_tol", o.rel_tol},   {"abs_tol", o.abs_tol},
          {"max_step", o.max_step}, {"t_end", optional_to_json(o.t_end)},
          {"stride", optional_to_json(o.stride)}, {"node_epsilon", o.node_epsilon},
          {"fd_step", o.fd_step}};
}

OutputSpec outputs_from_json(const json& j) {
  constexpr std::string_view where = "outputs";
  require_object(j, where);
  reject_unknown(j, where, {"formats", "dir", "stride"});
  OutputSpec o;
  o.formats = get_or<std::vector<std::string>>(j, "formats", where, o.formats);
  for (const auto& f : o.formats) {
    if (f != "csv" && f != "manifest") throw ConfigError("unknown output format '" + f + "'");
  }
  o.dir = get_or<std::string>(j, "dir", where, o.dir);
  o.stride = get_or<int>(j, "stride", where, o.stride);
  if (o.stride < 1) throw ConfigError("outputs.stride must be at least 1");
  return o;
}

json outputs_to_json(const OutputSpec& o) {
  return {{"formats", o.formats}, {"dir", o.dir}, {"stride", o.stride}};
}

}  // namespace

ScenarioFile scenario_from_json(const json& doc) {
  require_object(doc, "scenario");
  reject_unknown(doc, "scenario", {"schema_version", "name", "params", "ensemble", "integrator", "outputs"});
  ScenarioFile s;
  s.schema_version = get<int>(doc, "schema_version", "scenario");
  if (s.schema_version != kScenarioSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(s.schema_version));
  }
  s.name = get_or<std::string>(doc, "name", "scenario", "");
  if (!doc.contains("params")) throw ConfigError("missing 'params' block");
  s.params = params_from_json(doc.at("params"));
  if (doc.contains("ensemble")) s.ensemble = ensemble_from_json(doc.at("ensemble"));
  if (doc.contains("integrator")) s.integrator = integrator_from_json(doc.at("integrator"));
  if (doc.contains("outputs")) s.outputs = outputs_from_json(doc.at("outputs"));
  return s;
}

json to_json(const ScenarioFile& s) {
  return {{"schema_version", s.schema_version},
          {"name", s.name},
          {"params", params_to_json(s.params)},
          {"ensemble", ensemble_to_json(s.ensemble)},
          {"integrator", integrator_to_json(s.integrator)},
          {"outputs", outputs_to_json(s.outputs)}};
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario file " + path.string() + " is not valid JSON: " + e.what());
  }
  return scenario_from_json(doc);
}

void save_scenario(const ScenarioFile& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write scenario file " + path.string());
  out << to_json(scenario).dump(2) << '\n';
}

namespace {

ScenarioFile base_preset(std::string name, double R, double xi) {
  ScenarioFile s;
  s.name = std::move(name);
  ScenarioParams p;
  p.xi_x = 10.0;
  p.xi_y = 10.0;
  p.r = 1.0;
  p.R = R;
  p.mu = 1.0;
  p.d_prime = 3.0;
  s.params = with_single_pointer(p, xi, 1);
  s.outputs.dir = "runs/" + s.name;
  return s;
}

ScenarioFile many_particle_preset(std::string name, std::size_t n, double sigma_hat, std::uint64_t seed) {
  ScenarioFile s = base_preset(std::move(name), 0.2, 10.0);
  s.params = with_single_pointer(s.params, 10.0, n);
  s.ensemble.z_init.mode = PointerInit::Mode::Gaussian;
  s.ensemble.z_init.seed = seed;
  s.ensemble.z_init.sigma_hat = sigma_hat;
  s.ensemble.backend = Backend::Reduced;
  return s;
}

ScenarioFile two_pointer_preset(std::string name, double z1, double z2) {
  ScenarioFile s = base_preset(std::move(name), 0.2, 10.0);
  s.params = with_two_pointers(s.params, 10.0);
  s.ensemble.count_per_slit = 1;
  s.ensemble.z_init.mode = PointerInit::Mode::Explicit;
  s.ensemble.z_init.values = {z1, z2};
  return s;
}

ScenarioFile with_common_z(ScenarioFile s, double z0) {
  s.ensemble.z_init.mode = PointerInit::Mode::Common;
  s.ensemble.z_init.value = z0;
  return s;
}

}  // namespace

ScenarioFile preset(std::string_view name) {
  if (name == "fig2") return base_preset("fig2", 1.0, 0.0);
  if (name == "fig3") return base_preset("fig3", 1.0, 10.0);
  if (name == "fig4") return base_preset("fig4", 0.2, 10.0);
  // Caption value Z′₀ = 0.3; the running text quotes 0.5 (fig5-text).
  if (name == "fig5") return with_common_z(base_preset("fig5", 0.2, 10.0), 0.3);
  if (name == "fig5-text") return with_common_z(base_preset("fig5-text", 0.2, 10.0), 0.5);
  if (name == "fig6") return with_common_z(base_preset("fig6", 0.2, 10.0), 0.3);
  if (name == "fig7") return two_pointer_preset("fig7", 0.01, 0.01);
  if (name == "fig8") return two_pointer_preset("fig8", 0.5, 0.9);
  if (name == "fig9") return many_particle_preset("fig9", 10, 0.0, 9);
  if (name == "fig10") return many_particle_preset("fig10", 10, 0.3, 10);
  if (name == "fig11") return many_particle_preset("fig11", 10, 1.0, 11);
  if (name == "fig12") return many_particle_preset("fig12", 200, 0.3, 12);
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "fig5", "fig5-text", "fig6", "fig7",
          "fig8", "fig9", "fig10", "fig11", "fig12"};
}

void override_particle_count(ScenarioFile& scenario, std::size_t n) {
  const auto xi = scenario.params.common_xi();
  if (!xi) throw ConfigError("--n needs a single-pointer scenario");
  scenario.params = with_single_pointer(scenario.params, *xi, n);
  if (scenario.ensemble.z_init.mode == PointerInit::Mode::Explicit) {
    throw ConfigError("--n cannot resize an explicit z_init list");
  }
}

}  // namespace bohm
