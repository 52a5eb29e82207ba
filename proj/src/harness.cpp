#include "polaron/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <mutex>
#include <thread>

#include "polaron/kernels.hpp"

#ifndef POLARON_VERSION
#define POLARON_VERSION "dev"
#endif

namespace polaron {

std::string code_version() { return POLARON_VERSION; }

int workers_from_env() {
  const char* raw = std::getenv("POLARON_WORKERS");
  if (raw == nullptr || *raw == '\0') {
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  char* end = nullptr;
  const long n = std::strtol(raw, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) {
    throw ConfigError("POLARON_WORKERS must be a positive integer (got '" + std::string(raw) + "')");
  }
  return static_cast<int>(n);
}

ComplexField initial_field(const RunConfig& cfg, const GridPtr& grid, const ModeSet& modes) {
  if (cfg.phi0 == Phi0Family::gaussian) {
    const double w2 = cfg.phi0_width * cfg.phi0_width;
    CVec vals(modes.size());
    for (std::size_t j = 0; j < modes.size(); ++j) {
      const double k = modes.abs_k(j);
      vals[j] = cfg.phi0_amplitude * std::exp(-k * k / w2);
    }
    return scatter_modes(vals, modes);
  }
  // -c sigma of a normalized Gaussian trial state centred at the origin
  ComplexField trial(grid, Basis::position);
  const double s2 = cfg.phi0_trial_width * cfg.phi0_trial_width;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto x = grid->position(i);
    trial.values[i] = std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * s2));
  }
  const double nrm = norm(trial);
  for (auto& v : trial.values) v /= nrm;
  ComplexField phi = sigma_from_psi(trial, modes);
  for (auto& v : phi.values) v *= -cfg.phi0_scale;
  return phi;
}

Setup prepare(const RunConfig& cfg, double alpha) {
  validate(cfg);
  GridPtr grid = make_grid(cfg.d, cfg.N, cfg.L);
  ModeSet modes = make_modes(grid, cfg.cutoff);
  if (modes.size() == 0) throw ConfigError("cutoff leaves no phonon modes on this grid");
  LpSystem sys;
  sys.grid = grid;
  sys.modes = std::move(modes);
  sys.alpha = alpha;
  sys.order = cfg.order;
  sys.eig.eig_tol = cfg.eig_tol;
  sys.eig.seed = cfg.seed;
  sys.tol_norm = cfg.tol_norm;
  ComplexField phi0 = initial_field(cfg, grid, sys.modes);
  GroundStateData gs = ground_state(potential_from_field(phi0, sys.modes), grid, sys.eig);
  if (!(gs.energy < -cfg.eig_tol)) {
    std::ostringstream os;
    os << "initial field does not bind the electron: e(phi0) = " << gs.energy << " must be below -" << cfg.eig_tol;
    throw ConfigError(os.str());
  }
  if (gs.gap < cfg.min_initial_gap) {
    throw ConfigError("initial spectral gap " + std::to_string(gs.gap) + " is below min_initial_gap " +
                      std::to_string(cfg.min_initial_gap));
  }
  sys.gap_floor = cfg.gap_floor * gs.gap;
  return Setup{std::move(sys), std::move(phi0), std::move(gs)};
}

namespace {

ResolventOptions resolvent_options(const RunConfig& cfg) {
  ResolventOptions r;
  r.cg_tol = cfg.cg_tol;
  return r;
}

std::string status_name(int code) {
  switch (code) {
    case kExitGapAbort: return "gap_abort";
    case kExitLeakage: return "leakage_flag";
    default: return "ok";
  }
}

}  // namespace

LpRun lp_run(const RunConfig& cfg, double alpha) {
  Setup setup = prepare(cfg, alpha);
  LpRun out;
  PekarState s = make_initial_state(setup.sys, setup.phi0);
  out.gap0 = s.gs.gap;
  out.e0 = s.gs.energy;
  out.energy0 = lp_energy(setup.sys, s);
  EvolveOptions eo;
  eo.dt = time_step(cfg);
  eo.t_final = time_horizon(cfg, alpha);
  eo.record_stride = cfg.record_stride;
  eo.gs_stride = cfg.gs_stride;
  out.traj = evolve(setup.sys, s, eo);
  for (const LpRecord& r : out.traj.records) {
    out.norm_drift = std::max(out.norm_drift, std::abs(r.norm - 1.0));
    out.energy_drift = std::max(out.energy_drift, std::abs(r.energy - out.energy0) / std::abs(out.energy0));
    out.max_adiabatic = std::max(out.max_adiabatic, r.adiabatic_error);
    out.min_gap_ratio = std::min(out.min_gap_ratio, r.gap / out.gap0);
  }
  out.final_state = std::move(s);
  return out;
}

FluctuationRun bogoliubov_run(const RunConfig& cfg, double alpha, int workers) {
  Setup setup = prepare(cfg, alpha);
  FluctuationRunOptions o;
  o.dt = time_step(cfg);
  o.t_final = time_horizon(cfg, alpha);
  o.record_stride = cfg.record_stride;
  o.n_max = cfg.n_max;
  o.leak_tol = cfg.leak_tol;
  o.ropts = resolvent_options(cfg);
  o.workers = workers;
  return run_fluctuations(setup.sys, setup.phi0, o);
}

OracleRun oracle_run(const RunConfig& cfg, double alpha) {
  validate(cfg);
  // dimension check before any solver work
  {
    GridPtr grid = make_grid(cfg.d, cfg.N, cfg.L);
    ModeSet modes = make_modes(grid, cfg.cutoff);
    make_oracle_space(grid, std::move(modes), alpha, cfg.n_max, cfg.dim_cap);
  }
  Setup setup = prepare(cfg, alpha);
  OracleRunOptions o;
  o.dt = time_step(cfg);
  o.t_final = time_horizon(cfg, alpha);
  o.record_stride = cfg.record_stride;
  o.n_max = cfg.n_max;
  o.window_k = window_cutoff(cfg);
  o.leak_tol = cfg.leak_tol;
  o.dim_cap = cfg.dim_cap;
  o.ropts = resolvent_options(cfg);
  return run_oracle(setup.sys, setup.phi0, o);
}

Table lp_table(const LpRun& r) {
  Table t;
  t.columns = {"t", "norm", "energy", "e", "gap", "omega", "theta_e", "theta_omega", "adiabatic_error", "phi_norm"};
  for (const LpRecord& x : r.traj.records) {
    t.add_row({x.t, x.norm, x.energy, x.e, x.gap, x.omega, x.theta_e, x.theta_omega, x.adiabatic_error, x.phi_norm});
  }
  return t;
}

Table bogoliubov_table(const FluctuationRun& r) {
  Table t;
  t.columns = {"t",           "e",          "gap",        "c_trace",           "n_gauss",         "n_fock",
               "overlap_gauss", "overlap_fock", "departure", "symplectic_defect", "symmetry_defect", "leakage"};
  for (const FluctuationSample& x : r.samples) {
    t.add_row({x.t, x.e, x.gap, x.c_trace, x.n_gauss, x.n_fock, std::abs(x.overlap_gauss), std::abs(x.overlap_fock),
               x.departure, x.symplectic_defect, x.symmetry_defect, x.leakage});
  }
  return t;
}

Table oracle_table(const OracleRun& r, double alpha) {
  Table t;
  t.columns = {"t",        "t_over_alpha2", "err_corrected", "err_uncorrected", "departure", "trace_el",
               "trace_ph", "n_leq",         "n_gt",          "n_total",         "xi_norm",   "leakage",
               "fock_leakage", "n_gauss",   "n_fock",        "adiabatic_error", "gap"};
  for (const OracleSample& x : r.samples) {
    t.add_row({x.t, x.t / (alpha * alpha), x.err_corrected, x.err_uncorrected, x.departure, x.trace_el, x.trace_ph,
               x.windows.n_leq, x.windows.n_gt, x.windows.n_total, x.xi_norm, x.leakage, x.fock_leakage, x.n_gauss,
               x.n_fock, x.adiabatic_error, x.gap});
  }
  return t;
}

CompareReport compare_ansatz(const OracleRun& r, double alpha) {
  if (r.samples.empty()) throw ConfigError("no oracle samples to compare");
  CompareReport rep;
  rep.c0 = r.c0;
  const double a2 = alpha * alpha;
  // least-squares C in c0 t/a^2 - C t^2/a^4 ~ ||Y_t - Omega||, clipped at 0
  double num = 0.0, den = 0.0;
  for (const OracleSample& x : r.samples) {
    const double lin = r.c0 * x.t / a2, quad = x.t * x.t / (a2 * a2);
    num += (lin - x.departure) * quad;
    den += quad * quad;
  }
  rep.c_fit = den > 0.0 ? std::max(0.0, num / den) : 0.0;
  rep.table.columns = {"t", "t_over_alpha2", "err_corrected", "err_uncorrected", "ratio", "departure", "lower_curve",
                       "above_curve"};
  for (const OracleSample& x : r.samples) {
    const double curve = r.c0 * x.t / a2 - rep.c_fit * x.t * x.t / (a2 * a2);
    const double ratio = x.err_corrected > 0.0 ? x.err_uncorrected / x.err_corrected
                                               : std::numeric_limits<double>::quiet_NaN();
    rep.table.add_row({x.t, x.t / a2, x.err_corrected, x.err_uncorrected, ratio, x.departure, curve,
                       x.err_uncorrected > curve ? 1.0 : 0.0});
  }
  const OracleSample& last = r.samples.back();
  rep.delta = last.t / a2;
  rep.final_corrected = last.err_corrected;
  rep.final_uncorrected = last.err_uncorrected;
  rep.lower_bound = 0.5 * r.c0 * rep.delta;
  return rep;
}

const std::vector<double>& SweepResult::column(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError("sweep has no diagnostic '" + name + "'");
  return values[static_cast<std::size_t>(it - names.begin())];
}

const LogLogFit& SweepResult::fit(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError("sweep has no diagnostic '" + name + "'");
  return fits[static_cast<std::size_t>(it - names.begin())];
}

namespace {

struct SweepPoint {
  std::vector<double> values;
  int code = kExitOk;
};

std::vector<std::string> sweep_names(RunKind k) {
  switch (k) {
    case RunKind::lp: return {"adiabatic_error", "norm", "norm_drift", "energy_drift", "min_gap_ratio"};
    case RunKind::bogoliubov: return {"vacuum_departure", "n_fluctuations", "c0"};
    case RunKind::oracle:
      return {"err_corrected", "err_corrected_max", "err_uncorrected", "trace_el", "trace_ph", "n_displaced"};
    default: throw ConfigError("sweep_kind must be lp, bogoliubov or oracle");
  }
}

SweepPoint sweep_point(const RunConfig& cfg, double alpha) {
  SweepPoint p;
  switch (cfg.sweep_kind) {
    case RunKind::lp: {
      const LpRun r = lp_run(cfg, alpha);
      p.values = {r.max_adiabatic, r.traj.records.back().norm, r.norm_drift, r.energy_drift, r.min_gap_ratio};
      if (r.traj.status == RunStatus::gap_abort) p.code = kExitGapAbort;
      break;
    }
    case RunKind::bogoliubov: {
      const FluctuationRun r = bogoliubov_run(cfg, alpha, 1);
      p.values = {r.samples.back().departure, r.samples.back().n_gauss, r.c0};
      if (r.status == RunStatus::gap_abort) p.code = kExitGapAbort;
      else if (r.leakage_flag) p.code = kExitLeakage;
      break;
    }
    case RunKind::oracle: {
      const OracleRun r = oracle_run(cfg, alpha);
      const OracleSample& last = r.samples.back();
      double mx = 0.0;
      for (const auto& x : r.samples) mx = std::max(mx, x.err_corrected);
      p.values = {last.err_corrected, mx, last.err_uncorrected, last.trace_el, last.trace_ph, last.windows.n_total};
      if (r.status == RunStatus::gap_abort) p.code = kExitGapAbort;
      else if (r.leakage_flag) p.code = kExitLeakage;
      break;
    }
    default: throw ConfigError("sweep_kind must be lp, bogoliubov or oracle");
  }
  return p;
}

int combine(int a, int b) {
  if (a == kExitGapAbort || b == kExitGapAbort) return kExitGapAbort;
  if (a == kExitLeakage || b == kExitLeakage) return kExitLeakage;
  return kExitOk;
}

}  // namespace

SweepResult sweep_alpha(const RunConfig& cfg, int workers) {
  validate(cfg);
  SweepResult out;
  out.kind = cfg.sweep_kind;
  out.alphas = cfg.alphas;
  out.names = sweep_names(cfg.sweep_kind);
  const std::size_t n = cfg.alphas.size();
  std::vector<SweepPoint> points(n);
  std::vector<std::exception_ptr> errors(n);
  std::size_t next = 0;
  std::mutex m;
  auto work = [&]() {
    while (true) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(m);
        if (next >= n) return;
        i = next++;
      }
      try {
        points[i] = sweep_point(cfg, cfg.alphas[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nthreads = std::clamp(workers, 1, static_cast<int>(n));
  if (nthreads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  out.values.assign(out.names.size(), std::vector<double>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t d = 0; d < out.names.size(); ++d) out.values[d][a] = points[a].values[d];
    out.status.push_back(status_name(points[a].code));
    out.exit_code = combine(out.exit_code, points[a].code);
  }
  for (const auto& col : out.values) out.fits.push_back(fit_loglog(out.alphas, col));
  return out;
}

Table sweep_table(const SweepResult& s) {
  Table t;
  t.columns = {"alpha"};
  for (const auto& n : s.names) t.columns.push_back(n);
  for (std::size_t a = 0; a < s.alphas.size(); ++a) {
    std::vector<double> row{s.alphas[a]};
    for (const auto& col : s.values) row.push_back(col[a]);
    t.add_row(std::move(row));
  }
  return t;
}

std::vector<ScalingPanel> scaling_panels(const SweepResult& s) {
  std::vector<ScalingPanel> out;
  for (std::size_t d = 0; d < s.names.size(); ++d) out.push_back({s.names[d], s.alphas, s.values[d], s.fits[d]});
  return out;
}

namespace {

nlohmann::json fit_json(const LogLogFit& f) {
  nlohmann::json j;
  j["fitted"] = f.fitted;
  j["points"] = f.points;
  if (f.fitted) {
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["residuals"] = f.residuals;
  }
  return j;
}

nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  const std::string text = canonical_text(cfg);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string line = text.substr(pos, nl - pos);
    const auto eq = line.find(" = ");
    j[line.substr(0, eq)] = line.substr(eq + 3);
    pos = nl + 1;
  }
  return j;
}

Checkpoint checkpoint_of(const RunConfig& cfg, double alpha, const PekarState& s) {
  Checkpoint c;
  c.d = cfg.d;
  c.N = cfg.N;
  c.L = cfg.L;
  c.alpha = alpha;
  c.t = s.t;
  c.psi.assign(s.psi.values.begin(), s.psi.values.end());
  c.phi.assign(s.phi.values.begin(), s.phi.values.end());
  return c;
}

class Artifacts {
 public:
  Artifacts(const RunConfig& cfg, const RunContext& ctx, RunOutcome& out) : cfg_(cfg), ctx_(ctx), out_(out) {}

  std::string path(const std::string& suffix) const {
    return (std::filesystem::path(cfg_.output_dir) / (cfg_.output_prefix + suffix)).string();
  }

  void table(const std::string& suffix, Table t, const std::string& kind, double alpha) {
    t.meta.emplace_back("config_hash", config_hash(cfg_));
    t.meta.emplace_back("code_version", code_version());
    t.meta.emplace_back("kind", kind);
    if (alpha > 0.0) t.meta.emplace_back("alpha", std::to_string(alpha));
    if (!ctx_.write_files) return;
    write_tsv(path(suffix), t);
    out_.files.push_back(path(suffix));
  }

  void checkpoint(double alpha, const PekarState& s) {
    if (!ctx_.write_files || !cfg_.write_checkpoint) return;
    write_checkpoint(path(".ckpt"), checkpoint_of(cfg_, alpha, s));
    out_.files.push_back(path(".ckpt"));
  }

  template <class Render>
  void plot(const std::string& suffix, Render render) {
    if (!ctx_.write_files || !cfg_.write_plots) return;
    try {
      write_file(path(suffix), render());
      out_.files.push_back(path(suffix));
    } catch (const ConfigError& e) {
      out_.summary["warnings"].push_back(std::string("plot ") + suffix + ": " + e.what());
    }
  }

 private:
  const RunConfig& cfg_;
  const RunContext& ctx_;
  RunOutcome& out_;
};

Series column_series(const Table& t, const std::string& x, const std::string& y, const std::string& label = {}) {
  return Series{label.empty() ? y : label, t.values(x), t.values(y)};
}

}  // namespace

RunOutcome execute(const RunConfig& cfg, const RunContext& ctx) {
  const auto start = std::chrono::steady_clock::now();
  validate(cfg);
  RunOutcome out;
  Artifacts art(cfg, ctx, out);
  nlohmann::json& j = out.summary;
  j["schema_version"] = kSchemaVersion;
  j["config_hash"] = config_hash(cfg);
  j["code_version"] = code_version();
  j["kind"] = kind_name(cfg.kind);
  j["config"] = config_json(cfg);
  j["workers"] = ctx.workers;
  j["simd_backend"] = std::string(kernels::backend_name(kernels::active_backend()));
  const double alpha = cfg.alphas.front();

  switch (cfg.kind) {
    case RunKind::lp: {
      const LpRun r = lp_run(cfg, alpha);
      j["alpha"] = alpha;
      j["initial"] = {{"e", r.e0}, {"gap", r.gap0}, {"energy", r.energy0}};
      j["metrics"] = {{"norm_drift", r.norm_drift},
                      {"energy_drift", r.energy_drift},
                      {"max_adiabatic_error", r.max_adiabatic},
                      {"min_gap_ratio", r.min_gap_ratio},
                      {"records", r.traj.records.size()}};
      if (r.traj.status == RunStatus::gap_abort) {
        out.exit_code = kExitGapAbort;
        out.message = r.traj.message;
      }
      const Table t = lp_table(r);
      art.table(".tsv", t, "lp", alpha);
      art.checkpoint(alpha, r.final_state);
      art.plot(".svg", [&] {
        Table d = t;
        d.columns.push_back("norm_drift");
        d.columns.push_back("energy_drift");
        for (auto& row : d.rows) {
          row.push_back(std::abs(row[1] - 1.0));
          row.push_back(std::abs(row[2] - r.energy0) / std::abs(r.energy0));
        }
        return render_lines({"classical trajectory, alpha = " + std::to_string(alpha), "t", "value", false, true},
                            {column_series(d, "t", "adiabatic_error"), column_series(d, "t", "norm_drift"),
                             column_series(d, "t", "energy_drift")});
      });
      break;
    }
    case RunKind::bogoliubov: {
      const FluctuationRun r = bogoliubov_run(cfg, alpha, ctx.workers);
      const FluctuationSample& last = r.samples.back();
      j["alpha"] = alpha;
      j["initial"] = {{"e", r.samples.front().e}, {"gap", r.samples.front().gap}, {"c0", r.c0},
                      {"kernel_hermiticity_defect", r.kernel0.hermiticity_defect},
                      {"kernel_min_diagonal", r.kernel0.min_diagonal}};
      j["metrics"] = {{"final_departure", last.departure},
                      {"final_n_gauss", last.n_gauss},
                      {"final_n_fock", std::isnan(last.n_fock) ? nlohmann::json(nullptr) : nlohmann::json(last.n_fock)},
                      {"final_symplectic_defect", last.symplectic_defect},
                      {"max_leakage", r.max_leakage}};
      if (r.status == RunStatus::gap_abort) {
        out.exit_code = kExitGapAbort;
        out.message = r.message;
      } else if (r.leakage_flag) {
        out.exit_code = kExitLeakage;
        out.message = "truncated Fock leakage " + std::to_string(r.max_leakage) + " exceeds leak_tol";
      }
      const Table t = bogoliubov_table(r);
      art.table(".tsv", t, "bogoliubov", alpha);
      art.checkpoint(alpha, r.final_state);
      art.plot(".svg", [&] {
        std::vector<Series> s{column_series(t, "t", "departure"), column_series(t, "t", "n_gauss")};
        if (cfg.n_max > 0) s.push_back(column_series(t, "t", "n_fock"));
        return render_lines({"quadratic fluctuations, alpha = " + std::to_string(alpha), "t", "value", false, true}, s);
      });
      break;
    }
    case RunKind::oracle:
    case RunKind::compare: {
      const OracleRun r = oracle_run(cfg, alpha);
      const OracleSample& last = r.samples.back();
      j["alpha"] = alpha;
      j["initial"] = {{"gap", r.samples.front().gap}, {"c0", r.c0}};
      j["metrics"] = {{"final_err_corrected", last.err_corrected}, {"final_err_uncorrected", last.err_uncorrected},
                      {"final_trace_el", last.trace_el},         {"final_trace_ph", last.trace_ph},
                      {"final_n_displaced", last.windows.n_total}, {"max_leakage", r.max_leakage}};
      if (r.status == RunStatus::gap_abort) {
        out.exit_code = kExitGapAbort;
        out.message = r.message;
      } else if (r.leakage_flag) {
        out.exit_code = kExitLeakage;
        out.message = "oracle leakage " + std::to_string(r.max_leakage) + " exceeds leak_tol";
      }
      art.checkpoint(alpha, r.final_state);
      if (cfg.kind == RunKind::oracle) {
        const Table t = oracle_table(r, alpha);
        art.table(".tsv", t, "oracle", alpha);
        art.plot(".svg", [&] {
          return render_lines({"exact fluctuation vector, alpha = " + std::to_string(alpha), "t", "value", false, true},
                              {column_series(t, "t", "err_corrected"), column_series(t, "t", "err_uncorrected"),
                               column_series(t, "t", "trace_el"), column_series(t, "t", "trace_ph")});
        });
      } else {
        const CompareReport rep = compare_ansatz(r, alpha);
        j["compare"] = {{"c0", rep.c0},
                        {"c_fit", rep.c_fit},
                        {"delta", rep.delta},
                        {"final_corrected", rep.final_corrected},
                        {"final_uncorrected", rep.final_uncorrected},
                        {"final_ratio", rep.final_uncorrected / rep.final_corrected},
                        {"lower_bound", rep.lower_bound},
                        {"lower_bound_met", rep.final_uncorrected >= rep.lower_bound}};
        art.table(".tsv", rep.table, "compare", alpha);
        art.plot(".svg", [&] {
          return render_lines({"corrected vs uncorrected product state, alpha = " + std::to_string(alpha), "t",
                               "norm error", false, false},
                              {column_series(rep.table, "t", "err_corrected", "with Bogoliubov factor"),
                               column_series(rep.table, "t", "err_uncorrected", "vacuum factor"),
                               column_series(rep.table, "t", "lower_curve", "lower-bound curve")});
        });
      }
      break;
    }
    case RunKind::sweep: {
      const SweepResult s = sweep_alpha(cfg, ctx.workers);
      j["sweep_kind"] = kind_name(s.kind);
      j["alphas"] = s.alphas;
      j["point_status"] = s.status;
      nlohmann::json fits = nlohmann::json::object();
      for (std::size_t d = 0; d < s.names.size(); ++d) {
        fits[s.names[d]] = fit_json(s.fits[d]);
        fits[s.names[d]]["values"] = s.values[d];
      }
      j["fits"] = fits;
      out.exit_code = s.exit_code;
      if (s.exit_code != kExitOk) out.message = "at least one sweep point ended with " + status_name(s.exit_code);
      art.table("_sweep.tsv", sweep_table(s), "sweep", 0.0);
      art.plot("_scaling.svg", [&] { return render_scaling("alpha sweep (" + kind_name(s.kind) + ")", scaling_panels(s)); });
      break;
    }
  }
  out.status = status_name(out.exit_code);
  j["status"] = out.status;
  j["exit_code"] = out.exit_code;
  if (!out.message.empty()) j["message"] = out.message;
  j["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (ctx.write_files) {
    const std::string p = art.path(".json");
    out.files.push_back(p);
    j["files"] = out.files;
    write_file(p, j.dump(2) + "\n");
  }
  return out;
}

}  // namespace polaron
