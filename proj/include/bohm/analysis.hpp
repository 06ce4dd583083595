#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bohm/integrate.hpp"
#include "bohm/params.hpp"

namespace bohm {

enum class Slit { Upper, Lower };

struct TrajectoryClass {
  Slit initial_slit = Slit::Upper;
  bool crossed_plane = false;            // X′ changes sign at some sample
  std::optional<double> crossing_time;   // first sign change, linearly interpolated
  int final_direction = 0;               // sign of dX′/dt′ at the horizon
  bool degenerate = false;

  bool bounced() const { return !degenerate && !crossed_plane; }
};

struct ClassificationSummary {
  std::vector<TrajectoryClass> records;
  double bounce_fraction = 0.0;
  double crossing_fraction = 0.0;
  double downward_fraction = 0.0;
  std::size_t excluded = 0;  // degenerate trajectories left out of the fractions
};

/// Bounce/cross verdict. Degenerate trajectories come back flagged; a
/// non-degenerate one must reach t′_cross (AnalysisError otherwise).
TrajectoryClass classify(const Trajectory& traj);

ClassificationSummary summarize(std::span<const Trajectory> trajectories);

/// Empty/effective amplitude ratio along a trajectory, as logs. The effective
/// branch is the one of the slit the trajectory started from.
struct EmptyWaveReport {
  std::vector<double> t;
  std::vector<double> log_k_exact;    // full ratio at the Bohmian configuration
  std::vector<double> log_k_pointer;  // pointer factor of the ratio only
  std::vector<double> log_k_lin;      // −N[2⟨Z⟩δz + δz²]
  std::vector<double> log_k_gauss;    // −N δz²
  std::vector<double> mean_offset;    // ⟨Z⟩ measured from the effective packet centre
  double tau = 0.0;
  std::size_t n = 0;
};

/// δz′ = 2·μΞR²t′/(r²ξy): distance between the two pointer packet centres.
double pointer_separation(double t_prime, double xi, const ScenarioParams& params);

/// τ′ = r²ξy/(μR²Ξ√N), the primed image of c/(V√N).
double overlap_time(const ScenarioParams& params);

double log_k_lin(std::size_t n, double mean_offset, double dz);
double log_k_gauss(std::size_t n, double dz);

/// Throws ModeError unless single-pointer mode; needs pointer samples (a full
/// run, or a reduced run with reconstruction).
EmptyWaveReport empty_wave_ratio(const Trajectory& traj, const ScenarioParams& params);

/// First t′ at which the pointer factor K falls to `threshold` (log-linear
/// interpolation between samples); empty when it never does.
std::optional<double> threshold_crossing_time(const EmptyWaveReport& report, double threshold);

struct TauFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<std::size_t> n_values;
  std::vector<double> times;
};

/// For each N, integrates the reduced reference trajectory from the upper
/// slit centre with Σ̂′(0) = 0, finds the time at which K drops below
/// `threshold`, and fits log t against log N by least squares.
TauFit tau_scaling_fit(const ScenarioParams& params, std::span<const std::size_t> n_list,
                       double threshold, const IntegratorOptions& opts = {});

struct SurrealRow {
  std::size_t n = 0;
  double bounce_fraction = 0.0;
  double downward_fraction = 0.0;
  std::size_t excluded = 0;
};

/// Bounce fraction of the slit-grid ensemble for each N (reduced backend).
/// The base scenario must be a slow pointer (E < 1 at N = 1).
std::vector<SurrealRow> surreal_fraction_vs_n(const ScenarioParams& base,
                                              std::span<const std::size_t> n_list,
                                              const EnsembleSpec& spec,
                                              const IntegratorOptions& opts = {});

}  // namespace bohm
