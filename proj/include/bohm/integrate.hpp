#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "bohm/model.hpp"
#include "bohm/ode.hpp"
#include "bohm/params.hpp"
#include "bohm/velocity.hpp"

namespace bohm {

enum class Backend { FullAnalytic, FullNumeric, Reduced };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view name);  // throws ConfigError

struct IntegratorOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 1e-2;                 // fraction of the horizon
  std::optional<double> t_end;            // defaults to 2.5 · t′_cross
  std::optional<double> stride;           // defaults to t_end / 500
  double node_epsilon = kNodeEpsilon;
  double fd_step = kDefaultFiniteDifferenceStep;

  void validate() const;
  double resolved_t_end(const ScenarioParams& params) const;
  double resolved_stride(double t_end) const;

  friend bool operator==(const IntegratorOptions&, const IntegratorOptions&) = default;
};

inline constexpr double kDefaultHorizonFactor = 2.5;
/// Upper bound on reconstructed pointer samples (trajectories × samples × N)
/// held by one ensemble run.
inline constexpr double kMaxReconstructedValues = 5e7;
inline constexpr std::size_t kDefaultSamplesPerRun = 500;

/// How the initial pointer positions are chosen.
struct PointerInit {
  enum class Mode { Explicit, Common, Gaussian };
  Mode mode = Mode::Common;
  std::vector<double> values;          // Explicit
  double value = 0.0;                  // Common
  std::uint64_t seed = 0;              // Gaussian
  std::optional<double> sigma_hat;     // Gaussian: shift the draw to this Σ̂′(0)

  friend bool operator==(const PointerInit&, const PointerInit&) = default;
};

struct EnsembleSpec {
  int count_per_slit = 9;
  double extent = 0.8;   // grid spans ±extent initial widths around each slit
  PointerInit z_init;
  Backend backend = Backend::FullAnalytic;
  bool reconstruct = true;  // reduced backend: rebuild every Z′ₙ(t′)
  unsigned threads = 0;     // 0 = hardware concurrency

  void validate() const;

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

/// Sampled Bohmian trajectory (structure of arrays).
struct Trajectory {
  std::shared_ptr<const ScenarioParams> params;
  Backend backend = Backend::FullAnalytic;
  Configuration initial;

  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sigma_hat;
  std::vector<double> log_omega;
  std::vector<double> delta_s;
  Eigen::MatrixXd z;  // samples × N; empty for a reduced run without reconstruction

  IntegratorStats stats;
  bool degenerate = false;

  std::size_t size() const { return t.size(); }
  bool has_pointers() const { return z.rows() == static_cast<Eigen::Index>(t.size()) && z.cols() > 0; }
  Configuration configuration(std::size_t i) const;
};

/// t′_cross = d′ r² ξy / ξx.
double crossing_time(const ScenarioParams& params);

/// Integrates from `init` (at t′ = 0) to the horizon with the chosen backend.
/// A trajectory that runs into a node is truncated and flagged degenerate.
Trajectory integrate_trajectory(const Configuration& init, const ScenarioParams& params,
                                const IntegratorOptions& opts,
                                Backend backend = Backend::FullAnalytic);

std::shared_ptr<const ScenarioParams> share(const ScenarioParams& params);

Trajectory integrate_trajectory(const Configuration& init,
                                std::shared_ptr<const ScenarioParams> params,
                                const IntegratorOptions& opts, Backend backend,
                                bool reconstruct = true);

/// The N-particle scenario together with its N = 1 image under Ξ√N. Building
/// it is O(N); integrating with it is not.
struct ReducedSystem {
  std::shared_ptr<const ScenarioParams> params;
  ScenarioParams field;
};

/// Throws ModeError unless single-pointer mode.
ReducedSystem make_reduced_system(std::shared_ptr<const ScenarioParams> params);

/// Reduced-backend core: integrates (X′, Y′, Σ̂′) from a collective start.
/// Cost does not depend on N. The result carries no pointer samples and an
/// empty initial.z.
Trajectory integrate_reduced_core(double x0, double y0, double sigma_hat0, const ReducedSystem& sys,
                                  const IntegratorOptions& opts);

/// Initial pointer positions for an ensemble (one draw, shared by all X′₀).
Eigen::VectorXd sample_pointer_positions(const PointerInit& init, std::size_t n);

/// Upper-slit grid first (ascending X′₀), then the lower slit; Y′₀ = 0.
std::vector<Configuration> sample_initials(const EnsembleSpec& spec, const ScenarioParams& params);

/// Integrates every initial condition, in input order regardless of thread
/// scheduling.
std::vector<Trajectory> run_ensemble(const EnsembleSpec& spec, const ScenarioParams& params,
                                     const IntegratorOptions& opts);

/// Thread count from BOHM_SIM_THREADS (0 or unset = auto).
unsigned threads_from_environment();

}  // namespace bohm
