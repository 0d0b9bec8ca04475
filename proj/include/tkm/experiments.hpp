#pragma once

// Batch studies over (n, eps, seed): three-way convergence (Kuramoto, nonlocal
// integral equation, heat equation), twisted-state persistence and degree
// concentration. Each study writes CSV tables and a manifest.json into
// cfg.outdir; wall-clock timings only ever go to the manifest.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tkm/config.hpp"
#include "tkm/phase_field.hpp"
#include "tkm/rgg.hpp"

namespace tkm {

struct RunResult {
  std::size_t n = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;

  double sup_kur_heat = 0.0;
  double sup_kur_int = 0.0;
  /// Integral vs heat, sup over the integral grid and sampled times.
  double sup_int_heat = 0.0;
  /// Integral vs heat at the cloud nodes (the leg used by the triangle check).
  double sup_int_heat_nodes = 0.0;
  double cond1_diag = 0.0;
  double mean_drift = 0.0;
  bool triangle_ok = true;

  std::vector<double> times;
  /// Shift-quotient sup distance to the target twisted state per snapshot.
  std::vector<double> target_distance;
  WindingVector winding;

  std::optional<DegreeStats> degrees;
  double lambda = 0.0;
  double lambda_textbook = 0.0;
  std::size_t isolated = 0;

  double wall_seconds = 0.0;

  std::string key() const;
  bool in_regime() const noexcept { return cond1_diag >= 1.0; }
  double max_target_distance() const;
};

struct ExperimentReport {
  std::string command;
  std::vector<RunResult> runs;
  std::vector<std::string> warnings;

  const RunResult* first_failure() const;
};

InitialCondition make_initial_condition(const ExperimentConfig& cfg);
/// The twisted state a configuration is meant to stay near (k = 0 gives the constant state).
InitialCondition target_state(const ExperimentConfig& cfg);

/// Step size and snapshot stride: dt = spacing / ceil(spacing / dt0) with
/// spacing = T / snapshots and dt0 = cfg.dt or min(1e-3, 0.1 eps^2).
struct TimeGrid {
  double dt = 0.0;
  std::size_t stride = 1;
};
TimeGrid time_grid(const ExperimentConfig& cfg, double eps);

/// Where the configuration came from, recorded in the manifest.
struct ConfigSource {
  std::string path;
  std::vector<std::string> overrides;
};

/// When `write` is false nothing touches the filesystem.
ExperimentReport run_convergence(const ExperimentConfig& cfg, bool write = true, const ConfigSource& source = {});
ExperimentReport run_twisted_persistence(const ExperimentConfig& cfg, bool write = true,
                                         const ConfigSource& source = {});
ExperimentReport run_degree_concentration(const ExperimentConfig& cfg, bool write = true,
                                          const ConfigSource& source = {});

/// errors.csv content for a finished report.
std::string errors_csv(const ExperimentReport& report);
std::string degrees_csv(const ExperimentReport& report);
std::string persistence_csv(const ExperimentReport& report);

}  // namespace tkm
