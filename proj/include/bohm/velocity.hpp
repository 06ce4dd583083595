#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Core>

#include "bohm/model.hpp"

namespace bohm {

/// Beyond this |log Ω| only the dominant branch guides the motion; the
/// neglected terms are O(e^{-40}).
inline constexpr double kDominantBranchLogOmega = 40.0;

inline constexpr double kDefaultFiniteDifferenceStep = 1e-5;

template <typename Scalar>
struct BasicVelocity {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Scalar dx{0};
  Scalar dy{0};
  Vector dz;
};

using VelocityVector = BasicVelocity<double>;

namespace detail {

template <typename Scalar>
Scalar velocity_scale(const ScenarioParams& params, Eigen::Index coord) {
  if (coord == 0) return Scalar(params.velocity_scale_x());
  if (coord == 1) return Scalar(params.velocity_scale_y());
  return Scalar(params.velocity_scale_z());
}

template <typename Scalar>
void store(BasicVelocity<Scalar>& v, Eigen::Index coord, Scalar value) {
  if (coord == 0) {
    v.dx = value;
  } else if (coord == 1) {
    v.dy = value;
  } else {
    v.dz(coord - 2) = value;
  }
}

}  // namespace detail

/// Closed-form Bohmian velocity in the compact two-branch form
///   κ { ∇S̄ + (R₁²−R₂²)/(2ρ) ∇δS + (R₁R₂/ρ) sin δS [∇R₁/R₁ − ∇R₂/R₂] },
/// κ being the per-coordinate scale of the primed guiding equation.
/// Throws NodeError at (near-)nodes.
template <typename Scalar>
BasicVelocity<Scalar> velocity_analytic(const BasicConfiguration<Scalar>& config,
                                        const ScenarioParams& params,
                                        double node_epsilon = kNodeEpsilon) {
  using std::abs;
  using std::sin;
  BranchGradients<Scalar> g;
  const auto be = eval_branches(config, params, g);
  const Eigen::Index dims = 2 + config.z.size();

  BasicVelocity<Scalar> v;
  v.dz.resize(config.z.size());

  if (abs(be.log_omega) > Scalar(kDominantBranchLogOmega)) {
    const auto& ds = be.log_omega > Scalar(0) ? g.ds1 : g.ds2;
    for (Eigen::Index j = 0; j < dims; ++j) {
      detail::store(v, j, detail::velocity_scale<Scalar>(params, j) * ds(j));
    }
    return v;
  }

  const auto w = mixing_weights(be, node_epsilon);
  const Scalar half_diff = (w.w1 - w.w2) / Scalar(2);
  const Scalar amp_weight = w.wc * sin(be.delta_s);
  for (Eigen::Index j = 0; j < dims; ++j) {
    const Scalar mean_phase = (g.ds1(j) + g.ds2(j)) / Scalar(2);
    const Scalar grad = mean_phase + half_diff * (g.ds1(j) - g.ds2(j)) +
                        amp_weight * (g.dlog_r1(j) - g.dlog_r2(j));
    detail::store(v, j, detail::velocity_scale<Scalar>(params, j) * grad);
  }
  return v;
}

/// Im(Ψ*∂Ψ)/|Ψ|² per coordinate from central differences of the complex
/// Ψ = Φ₊ + Φ₋, Richardson-combined over steps h and h/2. Independent of
/// the gradient formulas used by velocity_analytic.
template <typename Scalar>
BasicVelocity<Scalar> velocity_numeric(const BasicConfiguration<Scalar>& config,
                                       const ScenarioParams& params,
                                       Scalar h = Scalar(kDefaultFiniteDifferenceStep),
                                       double node_epsilon = kNodeEpsilon) {
  using Complex = std::complex<Scalar>;
  using std::max;
  if (!(h > Scalar(0)) || h > Scalar(1e-4)) {
    throw ConfigError("finite-difference step must lie in (0, 1e-4]");
  }
  const auto be = eval_branches(config, params);
  // Common modulus and phase are factored out; they cancel in Im(Ψ*∂Ψ)/|Ψ|².
  const Scalar m = max(be.log_r1, be.log_r2);
  const Scalar s_mean = (be.s1 + be.s2) / Scalar(2);
  const Complex e1(be.log_r1 - m, be.s1 - s_mean);
  const Complex e2(be.log_r2 - m, be.s2 - s_mean);
  const Complex psi = std::exp(e1) + std::exp(e2);
  const Scalar density = std::norm(psi);
  if (!(density >= Scalar(node_epsilon))) {
    throw NodeError("|Psi|^2 below node epsilon at finite-difference stencil centre");
  }

  const Eigen::Index dims = 2 + config.z.size();
  BasicVelocity<Scalar> v;
  v.dz.resize(config.z.size());

  for (Eigen::Index j = 0; j < dims; ++j) {
    const Scalar q = coordinate(config, j);
    const auto up = packet_spec(params, config.t, j, Branch::Upper);
    const auto lo = packet_spec(params, config.t, j, Branch::Lower);
    const auto up0 = free_packet(q, up.q0, up.p, up.beta);
    const auto lo0 = free_packet(q, lo.q0, lo.p, lo.beta);

    auto psi_at = [&](Scalar delta) {
      const auto a = free_packet(q + delta, up.q0, up.p, up.beta);
      const auto b = free_packet(q + delta, lo.q0, lo.p, lo.beta);
      const Complex d1(a.log_amp - up0.log_amp, a.phase - up0.phase);
      const Complex d2(b.log_amp - lo0.log_amp, b.phase - lo0.phase);
      return std::exp(e1 + d1) + std::exp(e2 + d2);
    };
    auto central = [&](Scalar step) { return (psi_at(step) - psi_at(-step)) / (Scalar(2) * step); };

    const Complex d_coarse = central(h);
    const Complex d_fine = central(h / Scalar(2));
    const Complex dpsi = (Scalar(4) * d_fine - d_coarse) / Scalar(3);
    const Scalar grad = std::imag(std::conj(psi) * dpsi) / density;
    detail::store(v, j, detail::velocity_scale<Scalar>(params, j) * grad);
  }
  return v;
}

/// Y′(t′) = t′ + Y′₀ √(1 + 4t′²/ξy²).
inline double y_closed_form(double t_prime, double y0_prime, double xi_y) {
  if (!(xi_y > 0.0)) throw ConfigError("xi_y must be positive");
  return t_prime + y0_prime * std::sqrt(1.0 + 4.0 * t_prime * t_prime / (xi_y * xi_y));
}

}  // namespace bohm
