#pragma once

#include <span>
#include <utility>

#include <Eigen/Core>

#include "bohm/params.hpp"
#include "bohm/velocity.hpp"

namespace bohm {

/// (X′, Σ̂′) at t′, with Σ̂′ = (1/√N) Σ Z′ₙ.
struct ReducedState {
  double t = 0.0;
  double x = 0.0;
  double sigma_hat = 0.0;
};

/// The N = 1 scenario with Ξ replaced by Ξ√N. Its single pointer coordinate
/// is Σ̂′. Throws ModeError unless `params` is in single-pointer mode.
ScenarioParams reduced_params(const ScenarioParams& params);

/// (dX′/dt′, dΣ̂′/dt′): the N = 1 analytic velocity field under reduced_params.
std::pair<double, double> reduced_velocity(const ReducedState& state, const ScenarioParams& params,
                                           double node_epsilon = kNodeEpsilon);

/// √(1 + 4μ²R⁴t′²/(r⁴ξy²)), the width growth of one pointer packet.
double pointer_spreading(double t_prime, const ScenarioParams& params);

/// Individual pointer trajectories from a reduced (Σ̂′) run. Deviations from
/// the mean obey dδ/dt′ = α(t′)δ with α shared by all particles, hence
///   Z′ₙ(t′) = Σ̂′(t′)/√N + (z0ₙ − Σ̂′(0)/√N)·s(t′).
/// Returns a (samples × N) matrix. Throws ConfigError if z0 is inconsistent
/// with Σ̂′(0) beyond 1e-12.
Eigen::MatrixXd reconstruct_pointers(std::span<const double> t, std::span<const double> sigma_hat,
                                     const Eigen::VectorXd& z0, const ScenarioParams& params);

}  // namespace bohm
