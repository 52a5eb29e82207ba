#pragma once

// Flat `key = value` run configuration. '#' starts a comment; keys are
// case-sensitive; unknown keys and duplicates are errors.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace polaron {

enum class RunKind { lp, bogoliubov, oracle, sweep, compare };
enum class Phi0Family { gaussian, sigma };

struct RunConfig {
  RunKind kind = RunKind::lp;
  RunKind sweep_kind = RunKind::lp;   // pipeline run at each sweep point

  int d = 1;
  int N = 64;
  double L = 8.0;
  double cutoff = 4.0;
  std::vector<double> alphas{4.0};    // first entry used by single runs

  double dt = 0.0;                    // 0: 0.05 / max(1, cutoff^2)
  double t_final = 0.5;
  bool t_in_alpha2 = true;            // t_final measured in units of alpha^2
  int order = 2;
  int record_stride = 1;
  int gs_stride = 1;                  // steps between lazy ground-state refreshes

  // phi0 = A exp(-k^2/w^2) on the mode set, or phi0 = -c sigma of a
  // normalized Gaussian trial state of width s.
  Phi0Family phi0 = Phi0Family::gaussian;
  double phi0_amplitude = -1.0;
  double phi0_width = 2.0;
  double phi0_scale = 1.0;
  double phi0_trial_width = 1.0;

  int n_max = 4;                      // Fock truncation (0: Gaussian path only)
  double leak_tol = 1e-3;
  double window_k = 0.0;              // 0: cutoff / 2
  std::uint64_t dim_cap = 5'000'000;

  double eig_tol = 1e-10;
  double cg_tol = 1e-10;
  double gap_floor = 0.1;             // fraction of the initial gap
  double tol_norm = 1e-8;
  double min_initial_gap = 0.5;

  std::uint64_t seed = 1;

  std::string output_dir = "out";
  std::string output_prefix = "run";
  bool write_checkpoint = true;
  bool write_plots = true;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Applies one `key = value` assignment (used by parse_config and --set).
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Range and consistency checks. Throws ConfigError.
void validate(const RunConfig& cfg);

/// All keys, one per line, in fixed order with round-trip number formatting.
std::string canonical_text(const RunConfig& cfg, bool with_outputs = true);

/// FNV-1a over the canonical text without the output keys, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

std::string kind_name(RunKind k);
std::string family_name(Phi0Family f);

double time_horizon(const RunConfig& cfg, double alpha);
double time_step(const RunConfig& cfg);
double window_cutoff(const RunConfig& cfg);

}  // namespace polaron
