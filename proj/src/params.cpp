#include "bohm/params.hpp"

#include <cmath>
#include <string>

#include "bohm/errors.hpp"

namespace bohm {

std::optional<double> ScenarioParams::common_xi() const {
  if (pointer_velocities.empty()) return std::nullopt;
  const double xi = pointer_velocities.front().upper;
  for (const auto& pv : pointer_velocities) {
    if (pv.upper != xi || pv.lower != -xi) return std::nullopt;
  }
  return xi;
}

void ScenarioParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(name) + " must be positive and finite");
    }
  };
  positive(xi_y, "xi_y");
  positive(r, "r");
  positive(R, "R");
  positive(mu, "mu");
  positive(d_prime, "d_prime");
  if (!std::isfinite(xi_x)) throw ConfigError("xi_x must be finite");
  for (const auto& pv : pointer_velocities) {
    if (!std::isfinite(pv.upper) || !std::isfinite(pv.lower)) {
      throw ConfigError("pointer velocities must be finite");
    }
  }
}

ScenarioParams with_single_pointer(ScenarioParams base, double xi, std::size_t n) {
  base.pointer_velocities.assign(n, PointerVelocity{xi, -xi});
  return base;
}

ScenarioParams with_two_pointers(ScenarioParams base, double xi) {
  base.pointer_velocities = {PointerVelocity{xi, 0.0}, PointerVelocity{0.0, xi}};
  return base;
}

double fast_pointer_E(const ScenarioParams& params) {
  const auto xi = params.common_xi();
  if (!xi) throw ModeError("fast-pointer parameter E needs a single pointer with common Xi");
  return (*xi / params.xi_x) * params.R * params.R * params.d_prime * params.mu;
}

void check_configuration(const Configuration& config, const ScenarioParams& params) {
  if (static_cast<std::size_t>(config.z.size()) != params.n_particles()) {
    throw ConfigError("configuration has " + std::to_string(config.z.size()) +
                      " pointer coordinates, scenario has " +
                      std::to_string(params.n_particles()));
  }
  if (!std::isfinite(config.t) || !std::isfinite(config.x) || !std::isfinite(config.y) ||
      !config.z.allFinite()) {
    throw ConfigError("configuration has non-finite entries");
  }
}

}  // namespace bohm
