#pragma once

// Orchestration: config -> pipelines -> tables, summaries, checkpoints, plots.

#include <string>
#include <vector>

#include "json.hpp"
#include "polaron/config.hpp"
#include "polaron/io.hpp"
#include "polaron/pipeline.hpp"
#include "polaron/plot.hpp"

namespace polaron {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitGapAbort = 2, kExitLeakage = 3 };

std::string code_version();

/// POLARON_WORKERS if set (must be a positive integer), else the hardware
/// concurrency. Throws ConfigError on malformed values.
int workers_from_env();

struct RunContext {
  int workers = 1;
  bool write_files = true;
};

/// Grid, modes and solver settings for one alpha, plus the checked initial
/// field. Throws ConfigError when e(phi0) >= 0 or the initial gap is below
/// min_initial_gap. gap_floor is converted to an absolute value here.
struct Setup {
  LpSystem sys;
  ComplexField phi0;
  GroundStateData gs0;
};
Setup prepare(const RunConfig& cfg, double alpha);
ComplexField initial_field(const RunConfig& cfg, const GridPtr& grid, const ModeSet& modes);

struct LpRun {
  Trajectory traj;
  PekarState final_state;
  double gap0 = 0.0;
  double e0 = 0.0;
  double energy0 = 0.0;
  double norm_drift = 0.0;      // max | ||psi_t|| - 1 |
  double energy_drift = 0.0;    // max |E_t - E_0| / |E_0|
  double max_adiabatic = 0.0;
  double min_gap_ratio = 1.0;   // min gap_t / gap_0
};

LpRun lp_run(const RunConfig& cfg, double alpha);
FluctuationRun bogoliubov_run(const RunConfig& cfg, double alpha, int workers);
OracleRun oracle_run(const RunConfig& cfg, double alpha);

Table lp_table(const LpRun& r);
Table bogoliubov_table(const FluctuationRun& r);
Table oracle_table(const OracleRun& r, double alpha);

struct CompareReport {
  Table table;               // t, corrected, uncorrected, ratio, departure, lower_curve, above_curve
  double c0 = 0.0;
  double c_fit = 0.0;        // quadratic coefficient fitted to the departure
  double delta = 0.0;        // t_final / alpha^2
  double final_corrected = 0.0;
  double final_uncorrected = 0.0;
  double lower_bound = 0.0;  // 0.5 c0 delta
};
CompareReport compare_ansatz(const OracleRun& r, double alpha);

struct SweepResult {
  RunKind kind = RunKind::lp;
  std::vector<double> alphas;
  std::vector<std::string> names;            // diagnostics
  std::vector<std::vector<double>> values;   // values[diagnostic][alpha]
  std::vector<LogLogFit> fits;
  std::vector<std::string> status;           // per alpha
  int exit_code = kExitOk;

  const std::vector<double>& column(const std::string& name) const;
  const LogLogFit& fit(const std::string& name) const;
};

/// One pipeline per alpha (fanned out over `workers` threads, results
/// collected in alpha order) and a log-log fit per diagnostic.
SweepResult sweep_alpha(const RunConfig& cfg, int workers);
Table sweep_table(const SweepResult& s);
std::vector<ScalingPanel> scaling_panels(const SweepResult& s);

struct RunOutcome {
  int exit_code = kExitOk;
  std::string status;           // ok | gap_abort | leakage_flag
  std::string message;
  nlohmann::json summary;
  std::vector<std::string> files;
};

/// Runs cfg.kind and writes the artifacts under cfg.output_dir.
RunOutcome execute(const RunConfig& cfg, const RunContext& ctx);

}  // namespace polaron
