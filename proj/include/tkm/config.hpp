#pragma once

// Flat "key = value" experiment configuration. Lines starting with '#' are
// comments; lists are comma separated. Unknown keys and bad values raise
// ConfigError naming the key.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tkm {

struct ExperimentConfig {
  int dim = 1;
  std::string kernel = "indicator";
  /// sine | twist | diag | twist_sine | constant
  std::string ic = "sine";
  int ic_k = 1;
  int ic_ell = 1;
  double ic_amp = 1.0;
  int ic_sine_axis = 1;
  std::vector<std::size_t> n_list{2000};
  std::vector<double> eps_list;
  /// Used when eps_list is empty: compliant | borderline.
  std::string eps_rule = "compliant";
  double T = 1.0;
  /// 0 selects min(1e-3, 0.1 eps^2), shrunk to divide the snapshot spacing.
  double dt = 0.0;
  double c_stab = 0.1;
  std::vector<std::uint64_t> seeds{1};
  /// 0 selects the smallest power of two with h <= eps/8 (at least 256).
  int grid_M = 0;
  std::string outdir = "out";
  bool render = false;
  bool add_time_offset = false;
  int snapshots = 200;
  std::vector<double> render_times;
  bool integral = true;
  int threads = 0;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// All recognised keys in echo order.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
/// "key=value" (whitespace around '=' allowed).
void apply_override(ExperimentConfig& cfg, std::string_view assignment);
/// Applies every setting in `text` on top of `cfg`.
void apply_config_text(ExperimentConfig& cfg, std::string_view text);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
/// Text form accepted by parse_config; parse_config(echo_config(c)) == c.
std::string echo_config(const ExperimentConfig& cfg);

/// Checks cross-key consistency (dimension ranges, list lengths, names).
void validate(const ExperimentConfig& cfg);

/// eps for the i-th entry of n_list (eps_list, broadcast when it has one entry, or eps_rule).
double epsilon_for(const ExperimentConfig& cfg, std::size_t index);

}  // namespace tkm
