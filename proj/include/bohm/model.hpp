#pragma once

#include <cmath>

#include <Eigen/Core>

#include "bohm/errors.hpp"
#include "bohm/params.hpp"

namespace bohm {

/// Default floor on the normalized density ρ / max(R₁², R₂²).
inline constexpr double kNodeEpsilon = 1e-13;

enum class Branch { Upper, Lower };

/// Log-amplitude and phase of a free 1D Gaussian packet, with derivatives
/// along its coordinate.
template <typename Scalar>
struct PacketTerms {
  Scalar log_amp;
  Scalar phase;
  Scalar dlog_amp;
  Scalar dphase;
};

/// Free packet of unit initial width centred at q0 with momentum p:
///   exp{ i p q − i p² β/4 − (q − q0 − p β/2)² / (1 + iβ) },
/// where β = 2κt′ is the spreading parameter of the coordinate. This solves
/// i ∂ψ/∂t′ = −(κ/2) ∂²ψ/∂q² and covers every factor of the two-slit
/// wave function (x, y and each pointer particle).
template <typename Scalar>
PacketTerms<Scalar> free_packet(Scalar q, Scalar q0, Scalar p, Scalar beta) {
  const Scalar spread = Scalar(1) + beta * beta;
  const Scalar u = q - (q0 + p * beta / Scalar(2));
  const Scalar u2 = u * u;
  return {-u2 / spread,
          p * q - p * p * beta / Scalar(4) + beta * u2 / spread,
          Scalar(-2) * u / spread,
          p + Scalar(2) * beta * u / spread};
}

template <typename Scalar>
struct PacketSpec {
  Scalar q0;
  Scalar p;
  Scalar beta;
};

/// Packet data of coordinate `coord` (0 = x, 1 = y, 2 + n = z_n) in a branch.
/// The upper-slit x packet starts at +d′ and moves with −ξx; the pointer
/// packets move with Ξₙ⁺ in that branch.
template <typename Scalar>
PacketSpec<Scalar> packet_spec(const ScenarioParams& params, Scalar t, Eigen::Index coord,
                               Branch branch) {
  const bool upper = branch == Branch::Upper;
  if (coord == 0) {
    const Scalar d(params.d_prime), xi(params.xi_x);
    return {upper ? d : -d, upper ? -xi : xi, Scalar(2) * Scalar(params.velocity_scale_x()) * t};
  }
  if (coord == 1) {
    return {Scalar(0), Scalar(params.xi_y), Scalar(2) * Scalar(params.velocity_scale_y()) * t};
  }
  const auto& pv = params.pointer_velocities[static_cast<std::size_t>(coord - 2)];
  return {Scalar(0), Scalar(upper ? pv.upper : pv.lower),
          Scalar(2) * Scalar(params.velocity_scale_z()) * t};
}

template <typename Scalar>
Scalar coordinate(const BasicConfiguration<Scalar>& config, Eigen::Index coord) {
  if (coord == 0) return config.x;
  if (coord == 1) return config.y;
  return config.z(coord - 2);
}

template <typename Scalar>
PacketTerms<Scalar> packet_terms(const BasicConfiguration<Scalar>& config,
                                 const ScenarioParams& params, Eigen::Index coord,
                                 Branch branch) {
  const auto spec = packet_spec(params, config.t, coord, branch);
  return free_packet(coordinate(config, coord), spec.q0, spec.p, spec.beta);
}

/// Φ₊ = R₁e^{iS₁} and Φ₋ = R₂e^{iS₂} at a configuration, normalization dropped.
template <typename Scalar>
struct BasicBranchEval {
  Scalar log_r1{0};
  Scalar log_r2{0};
  Scalar s1{0};
  Scalar s2{0};
  Scalar log_omega{0};  // log R₁ − log R₂
  Scalar delta_s{0};    // S₁ − S₂
};

using BranchEval = BasicBranchEval<double>;

/// ∂ log R and ∂S of each branch, indexed like `coordinate`.
template <typename Scalar>
struct BranchGradients {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector dlog_r1, dlog_r2, ds1, ds2;
};

namespace detail {

template <typename Scalar, bool WithGradients>
BasicBranchEval<Scalar> eval_branches_impl(const BasicConfiguration<Scalar>& config,
                                           const ScenarioParams& params,
                                           BranchGradients<Scalar>* grads) {
  const Eigen::Index dims = 2 + config.z.size();
  if constexpr (WithGradients) {
    grads->dlog_r1.resize(dims);
    grads->dlog_r2.resize(dims);
    grads->ds1.resize(dims);
    grads->ds2.resize(dims);
  }
  BasicBranchEval<Scalar> be;
  for (Eigen::Index j = 0; j < dims; ++j) {
    const auto up = packet_terms(config, params, j, Branch::Upper);
    const auto lo = packet_terms(config, params, j, Branch::Lower);
    be.log_r1 += up.log_amp;
    be.log_r2 += lo.log_amp;
    be.s1 += up.phase;
    be.s2 += lo.phase;
    if constexpr (WithGradients) {
      grads->dlog_r1(j) = up.dlog_amp;
      grads->dlog_r2(j) = lo.dlog_amp;
      grads->ds1(j) = up.dphase;
      grads->ds2(j) = lo.dphase;
    }
  }
  be.log_omega = be.log_r1 - be.log_r2;
  be.delta_s = be.s1 - be.s2;
  return be;
}

}  // namespace detail

template <typename Scalar>
BasicBranchEval<Scalar> eval_branches(const BasicConfiguration<Scalar>& config,
                                      const ScenarioParams& params) {
  return detail::eval_branches_impl<Scalar, false>(config, params, nullptr);
}

template <typename Scalar>
BasicBranchEval<Scalar> eval_branches(const BasicConfiguration<Scalar>& config,
                                      const ScenarioParams& params,
                                      BranchGradients<Scalar>& grads) {
  return detail::eval_branches_impl<Scalar, true>(config, params, &grads);
}

/// Pointer contribution to log Ω (the x and y factors left out).
template <typename Scalar>
Scalar pointer_log_omega(const BasicConfiguration<Scalar>& config, const ScenarioParams& params) {
  Scalar acc(0);
  for (Eigen::Index j = 2; j < 2 + config.z.size(); ++j) {
    acc += packet_terms(config, params, j, Branch::Upper).log_amp -
           packet_terms(config, params, j, Branch::Lower).log_amp;
  }
  return acc;
}

/// w1 = R₁²/ρ, w2 = R₂²/ρ, wc = R₁R₂/ρ.
template <typename Scalar>
struct BasicMixingWeights {
  Scalar w1;
  Scalar w2;
  Scalar wc;
};

using MixingWeights = BasicMixingWeights<double>;

/// ρ / max(R₁², R₂²), evaluated without forming either amplitude.
template <typename Scalar>
Scalar normalized_density(Scalar log_omega, Scalar delta_s) {
  using std::cos;
  using std::exp;
  using std::abs;
  const Scalar q = exp(-abs(log_omega));  // min(R₁,R₂)/max(R₁,R₂)
  return Scalar(1) + q * q + Scalar(2) * q * cos(delta_s);
}

template <typename Scalar>
BasicMixingWeights<Scalar> mixing_weights(const BasicBranchEval<Scalar>& be,
                                          double node_epsilon = kNodeEpsilon) {
  using std::exp;
  using std::abs;
  const Scalar q = exp(-abs(be.log_omega));
  const Scalar rho = normalized_density(be.log_omega, be.delta_s);
  if (!(rho >= Scalar(node_epsilon))) {
    throw NodeError("configuration sits on a node of the wave function");
  }
  const Scalar big = Scalar(1) / rho;
  const Scalar small = q * q / rho;
  const Scalar cross = q / rho;
  if (be.log_omega >= Scalar(0)) return {big, small, cross};
  return {small, big, cross};
}

}  // namespace bohm
