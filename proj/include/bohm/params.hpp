#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace bohm {

/// Dimensionless velocities (Ξₙ⁺, Ξₙ⁻) of one pointer particle's packet in the
/// branch where the test particle went through the upper / lower slit.
struct PointerVelocity {
  double upper = 0.0;
  double lower = 0.0;

  friend bool operator==(const PointerVelocity&, const PointerVelocity&) = default;
};

/// Dimensionless scenario. All lengths are in units of the initial packet
/// width of the corresponding coordinate and time is t′ = v_y t / b.
struct ScenarioParams {
  double xi_x = 10.0;     // m v_x a / ħ
  double xi_y = 10.0;     // m v_y b / ħ
  double r = 1.0;         // a / b
  double R = 1.0;         // a / c
  double mu = 1.0;        // m / M
  double d_prime = 3.0;   // d / a
  std::vector<PointerVelocity> pointer_velocities;

  std::size_t n_particles() const { return pointer_velocities.size(); }

  /// Common Ξ when every entry is (+Ξ, −Ξ); empty otherwise (and for N = 0).
  std::optional<double> common_xi() const;
  bool single_pointer() const { return common_xi().has_value(); }

  /// Throws ConfigError on non-positive widths, velocities or masses.
  void validate() const;

  // Phase-gradient → velocity factors of the guiding equation in primed units.
  double velocity_scale_x() const { return 1.0 / (r * r * xi_y); }
  double velocity_scale_y() const { return 1.0 / xi_y; }
  double velocity_scale_z() const { return mu * R * R / (r * r * xi_y); }

  friend bool operator==(const ScenarioParams&, const ScenarioParams&) = default;
};

/// N pointer particles sharing the same ±Ξ (one solid pointer).
ScenarioParams with_single_pointer(ScenarioParams base, double xi, std::size_t n);

/// Two one-particle pointers, one per slit: (Ξ, 0) and (0, Ξ).
ScenarioParams with_two_pointers(ScenarioParams base, double xi);

/// E = (Ξ/ξx)·R²·d′·μ; E > 1 marks a fast pointer. Throws ModeError unless
/// the scenario is in single-pointer mode.
double fast_pointer_E(const ScenarioParams& params);

/// The Bohmian point (X′, Y′, Z′₁..Z′_N) at time t′.
template <typename Scalar>
struct BasicConfiguration {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Scalar t{0};
  Scalar x{0};
  Scalar y{0};
  Vector z;

  /// Σ̂′ = (1/√N) Σ Z′ₙ; zero when N = 0.
  Scalar sigma_hat() const {
    using std::sqrt;
    if (z.size() == 0) return Scalar(0);
    return z.sum() / sqrt(Scalar(z.size()));
  }
};

using Configuration = BasicConfiguration<double>;

/// Checks finiteness and that z matches the scenario's particle count.
void check_configuration(const Configuration& config, const ScenarioParams& params);

}  // namespace bohm
