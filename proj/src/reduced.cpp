#include "bohm/reduced.hpp"

#include <cmath>
#include <string>

#include "bohm/errors.hpp"

namespace bohm {

ScenarioParams reduced_params(const ScenarioParams& params) {
  const auto xi = params.common_xi();
  if (!xi) throw ModeError("reduced dynamics need a single pointer with common Xi");
  const double n = static_cast<double>(params.n_particles());
  return with_single_pointer(params, *xi * std::sqrt(n), 1);
}

std::pair<double, double> reduced_velocity(const ReducedState& state, const ScenarioParams& params,
                                           double node_epsilon) {
  const ScenarioParams single = reduced_params(params);
  Configuration config;
  config.t = state.t;
  config.x = state.x;
  config.y = state.t;  // y decouples; any value gives the same dx, dz
  config.z = Eigen::VectorXd::Constant(1, state.sigma_hat);
  const auto v = velocity_analytic(config, single, node_epsilon);
  return {v.dx, v.dz(0)};
}

double pointer_spreading(double t_prime, const ScenarioParams& params) {
  const double beta = 2.0 * params.velocity_scale_z() * t_prime;
  return std::sqrt(1.0 + beta * beta);
}

Eigen::MatrixXd reconstruct_pointers(std::span<const double> t, std::span<const double> sigma_hat,
                                     const Eigen::VectorXd& z0, const ScenarioParams& params) {
  if (t.size() != sigma_hat.size() || t.empty()) {
    throw ConfigError("reduced trajectory needs matching, non-empty t and sigma_hat series");
  }
  const Eigen::Index n = z0.size();
  if (n == 0) throw ConfigError("pointer reconstruction needs at least one particle");
  const double root_n = std::sqrt(static_cast<double>(n));
  const double sigma0 = sigma_hat.front();
  if (std::abs(z0.sum() / root_n - sigma0) > 1e-12) {
    throw ConfigError("initial pointer positions do not sum to the reduced trajectory's sigma_hat");
  }
  const Eigen::ArrayXd deviation = z0.array() - sigma0 / root_n;

  Eigen::MatrixXd z(static_cast<Eigen::Index>(t.size()), n);
  for (std::size_t i = 0; i < t.size(); ++i) {
    // Written relative to z0 so that t′ = 0 returns z0 bit for bit.
    const double shift = (sigma_hat[i] - sigma0) / root_n;
    const double growth = pointer_spreading(t[i], params) - 1.0;
    z.row(static_cast<Eigen::Index>(i)) = (z0.array() + shift + deviation * growth).matrix().transpose();
  }
  return z;
}

}  // namespace bohm
