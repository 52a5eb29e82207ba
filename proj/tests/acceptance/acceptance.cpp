// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "../support.hpp"
#include "polaron/harness.hpp"

#ifndef POLARON_CONFIG_DIR
#define POLARON_CONFIG_DIR "configs"
#endif

namespace {

using namespace polaron;
using Clock = std::chrono::steady_clock;

RunConfig config(const std::string& name) { return load_config(std::string(POLARON_CONFIG_DIR) + "/" + name); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <typename... A>
std::string fmt(const char* f, A... args) {
  if constexpr (sizeof...(A) == 0) {
    return f;
  } else {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
  }
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + fmt("%.3e", x);
  return "[" + s + "]";
}

// Raises the cutoff; an explicit step is scaled like the default 0.05 / cutoff^2.
void rescale_cutoff(RunConfig& c, double s) {
  c.cutoff *= s;
  c.dt /= s * s;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Results shared between criteria so each expensive run happens once.
struct Cache {
  int workers = 1;
  std::optional<SweepResult> adiabatic;
  std::optional<SweepResult> adiabatic_wide;
  std::optional<SweepResult> oracle;

  const SweepResult& adiabatic_sweep(bool wide) {
    auto& slot = wide ? adiabatic_wide : adiabatic;
    if (!slot) {
      RunConfig c = config("adiabatic_sweep.cfg");
      if (wide) rescale_cutoff(c, 1.5);
      slot = sweep_alpha(c, workers);
    }
    return *slot;
  }
  const SweepResult& oracle_sweep() {
    if (!oracle) oracle = sweep_alpha(config("oracle_sweep.cfg"), workers);
    return *oracle;
  }
};

Verdict conservation(double cutoff_scale) {
  Verdict v{true, {}};
  const auto t0 = Clock::now();
  for (const char* name : {"lp_1d.cfg", "lp_3d.cfg"}) {
    RunConfig c = config(name);
    rescale_cutoff(c, cutoff_scale);
    const LpRun r = lp_run(c, c.alphas.front());
    const bool ok = r.traj.status == RunStatus::ok && r.norm_drift <= 1e-8 && r.energy_drift <= 1e-6;
    v.pass = v.pass && ok;
    v.detail += fmt("d=%d N=%d: norm drift %.2e, energy drift %.2e; ", c.d, c.N, r.norm_drift, r.energy_drift);
  }
  const double wall = seconds_since(t0);
  v.pass = v.pass && wall <= 600.0;
  v.detail += fmt("%.1f s (limit 600 s)", wall);
  return v;
}

Verdict adiabatic_scaling(Cache& cache, bool wide) {
  const SweepResult& s = cache.adiabatic_sweep(wide);
  const LogLogFit& f = s.fit("adiabatic_error");
  Verdict v;
  v.pass = s.exit_code == kExitOk && f.fitted && f.slope >= -2.3 && f.slope <= -1.7;
  v.detail = fmt("slope %.3f (target -2 +- 0.3), max adiabatic error ", f.slope) + list(s.column("adiabatic_error"));
  return v;
}

Verdict gap_persistence(Cache& cache, bool wide) {
  const SweepResult& s = cache.adiabatic_sweep(wide);
  const RunConfig c = config("adiabatic_sweep.cfg");
  const auto& ratios = s.column("min_gap_ratio");
  const double worst = *std::min_element(ratios.begin(), ratios.end());
  Verdict v;
  v.pass = c.record_stride == 1 && s.exit_code == kExitOk && worst >= 0.5;
  v.detail = fmt("min over alpha and steps of gap_t / gap_0 = %.4f (limit 0.5), recorded every step", worst);
  return v;
}

Verdict kernel_correctness() {
  // d=1, N=16, every non-Nyquist mode, at the initial field and after a
  // stretch of classical evolution.
  LpSystem sys;
  sys.grid = make_grid(1, 16, 3.0);
  sys.modes = make_modes(sys.grid, 100.0);
  sys.alpha = 1.0;
  sys.eig.eig_tol = 1e-12;
  const ComplexField phi0 = testing::gaussian_field(sys.modes, -1.5, 2.0);
  PekarState s = make_initial_state(sys, phi0);
  ResolventOptions ro;
  ro.cg_tol = 1e-13;
  double herm = 0.0, agree = 0.0, min_diag = 1e300;
  for (int stage = 0; stage < 2; ++stage) {
    if (stage == 1) {
      for (int i = 0; i < 100; ++i) lp_step(sys, s, 0.01);
      refresh_ground_state(sys, s, true);
    }
    const KernelF k = assemble_kernel(s.gs, sys.modes, ro);
    const MatC ref = testing::dense_kernel(*sys.grid, sys.modes, s.gs.potential, s.gs.psi);
    herm = std::max(herm, k.hermiticity_defect);
    min_diag = std::min(min_diag, k.min_diagonal);
    agree = std::max(agree, testing::max_abs_diff(k.F, ref));
  }
  Verdict v;
  v.pass = herm <= 1e-10 && min_diag >= 0.0 && agree <= 1e-8;
  v.detail = fmt("%zu modes: hermiticity defect %.2e, min diagonal %.3e, max |F - F_dense| %.2e",
                 sys.modes.size(), herm, min_diag, agree);
  return v;
}

Verdict bogoliubov_cross() {
  Verdict v{true, {}};
  RunConfig c = config("bogoliubov_m2.cfg");
  for (double alpha : {2.0, 4.0}) {
    const FluctuationRun r = bogoliubov_run(c, alpha, 1);
    double dn = 0.0, dov = 0.0;
    for (const auto& x : r.samples) {
      dn = std::max(dn, std::abs(x.n_gauss - x.n_fock));
      dov = std::max(dov, std::abs(std::abs(x.overlap_gauss) - std::abs(x.overlap_fock)));
    }
    const bool ok = r.status == RunStatus::ok && r.samples.back().t >= 1.0 - 1e-12 && dn <= 1e-6 && dov <= 1e-6;
    v.pass = v.pass && ok;
    v.detail += fmt("alpha %g: |dN| %.2e, |d overlap| %.2e, leakage %.1e; ", alpha, dn, dov, r.max_leakage);
  }
  // 10^4 Gaussian steps with every step recorded
  c.n_max = 0;
  c.record_stride = 1;
  c.t_final = 1e4 * c.dt;
  const FluctuationRun r = bogoliubov_run(c, 4.0, 1);
  double sym = 0.0, tsym = 0.0;
  for (const auto& x : r.samples) {
    sym = std::max(sym, x.symplectic_defect);
    tsym = std::max(tsym, x.symmetry_defect);
  }
  const bool ok = r.status == RunStatus::ok && r.samples.size() >= 10001 && sym <= 1e-9 && tsym <= 1e-9;
  v.pass = v.pass && ok;
  v.detail += fmt("%zu steps: symplectic defect %.2e, symmetry defect %.2e", r.samples.size() - 1, sym, tsym);
  return v;
}

Verdict norm_trend(Cache& cache) {
  const auto t0 = Clock::now();
  const SweepResult& s = cache.oracle_sweep();
  const double wall = seconds_since(t0);
  const auto& e = s.column("err_corrected");
  const LogLogFit& f = s.fit("err_corrected");
  const LogLogFit& fm = s.fit("err_corrected_max");
  Verdict v;
  v.pass = s.exit_code == kExitOk && strictly_decreasing(e) && f.fitted && f.slope <= -0.7 &&
           strictly_decreasing(s.column("err_corrected_max")) && fm.slope <= -0.7 && wall <= 1800.0;
  v.detail = fmt("corrected error at t = 0.25 alpha^2 ") + list(e) +
             fmt(", slope %.3f (limit -0.7); max over the window slope %.3f; %.1f s", f.slope, fm.slope, wall);

  // Not part of the verdict: the single-time values carry an oscillating
  // transient, so the trend depends on where t = 0.25 alpha^2 falls in its
  // period. Scan the initial amplitude and report both readings.
  RunConfig c = config("oracle_sweep.cfg");
  int n = 0, single = 0;
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i <= 36; ++i) {
    c.phi0_amplitude = -0.9 - 0.025 * i;
    const SweepResult r = sweep_alpha(c, cache.workers);
    const auto& ei = r.column("err_corrected");
    ++n;
    single += strictly_decreasing(ei) && r.fit("err_corrected").slope <= -0.7;
    lo = std::min(lo, r.fit("err_corrected_max").slope);
    hi = std::max(hi, r.fit("err_corrected_max").slope);
  }
  v.detail += fmt("; amplitude scan -0.9..-1.8: single-time trend holds for %d/%d, window-max slope in [%.2f, %.2f]",
                  single, n, lo, hi);
  return v;
}

Verdict correction_needed() {
  const RunConfig c = config("oracle_1d.cfg");
  const double alpha = 4.0;
  const OracleRun r = oracle_run(c, alpha);
  const CompareReport rep = compare_ansatz(r, alpha);
  Verdict v;
  v.pass = r.status == RunStatus::ok && std::abs(rep.delta - 0.25) < 1e-12 &&
           rep.final_uncorrected >= 2.0 * rep.final_corrected && rep.final_uncorrected >= 0.5 * r.c0 * 0.25;
  v.detail = fmt("alpha 4: uncorrected %.4f, corrected %.4f (ratio %.2f, need 2), bound 0.5 c0 0.25 = %.4f", rep.final_uncorrected,
                 rep.final_corrected, rep.final_uncorrected / rep.final_corrected, 0.5 * r.c0 * 0.25);
  return v;
}

Verdict density_trends(Cache& cache) {
  const SweepResult& s = cache.oracle_sweep();
  const auto& el = s.column("trace_el");
  const auto& ph = s.column("trace_ph");
  const LogLogFit& f = s.fit("trace_el");
  Verdict v;
  v.pass = s.exit_code == kExitOk && strictly_decreasing(el) && strictly_decreasing(ph) && f.slope <= -0.7;
  v.detail = "electron " + list(el) + fmt(" slope %.3f (limit -0.7); phonon ", f.slope) + list(ph) +
             fmt(" slope %.3f", s.fit("trace_ph").slope);
  return v;
}

Verdict window_identity(Cache& cache) {
  // Displaced states W(alpha^2 phi_t) (psi_t (x) chi) with phi_t, psi_t from
  // a classical run on four modes split by K, chi spread over low shells.
  LpSystem sys;
  sys.grid = make_grid(1, 8, 2.9);
  sys.modes = make_modes(sys.grid, 2.5);
  sys.alpha = 1.0;
  PekarState s = make_initial_state(sys, testing::gaussian_field(sys.modes, -0.5, 1e6));
  for (int i = 0; i < 56; ++i) lp_step(sys, s, 0.01);
  const OracleSpace sp = make_oracle_space(sys.grid, sys.modes, sys.alpha, 24);
  const CVec phi = gather_modes(s.phi, sys.modes);
  CVec f(phi.size());
  for (std::size_t j = 0; j < phi.size(); ++j) f[j] = sys.alpha * sys.alpha * phi[j];
  const double K = 1.5;
  double worst = 0.0, n_sum = 0.0;
  std::size_t n_leq_modes = 0;
  for (std::size_t j = 0; j < sys.modes.size(); ++j) n_leq_modes += sys.modes.abs_k(j) <= K;
  for (std::uint64_t seed : {1U, 2U, 3U}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    CVec chi(sp.fock.size());
    for (std::size_t i = 0; i < chi.size(); ++i) {
      if (sp.fock.total(i) <= 2) chi[i] = {nd(rng), nd(rng)};
    }
    double nrm = 0.0;
    for (const auto& c : chi) nrm += std::norm(c);
    for (auto& c : chi) c /= std::sqrt(nrm);
    const OracleState xi = product_state(sp, s.psi, chi);
    OracleState psi = xi;
    apply_weyl(sp, f, psi);
    const PhononWindows direct = number_windows(sp, xi, K);
    const PhononWindows w = phonon_number_windows_shifted(sp, psi, phi, K);
    worst = std::max({worst, std::abs(w.n_leq + w.n_gt - direct.n_total), std::abs(w.n_leq - direct.n_leq),
                      std::abs(w.n_gt - direct.n_gt)});
    n_sum += direct.n_total;
  }
  const SweepResult& o = cache.oracle_sweep();
  const auto& nd = o.column("n_displaced");
  Verdict v;
  v.pass = worst <= 1e-12 && n_leq_modes > 0 && n_leq_modes < sys.modes.size() && strictly_decreasing(nd);
  v.detail = fmt("max |N_leq + N_gt - <N>_displaced| %.2e over 3 states (mean <N> %.3f); displaced <N> at t = "
                 "0.25 alpha^2 ",
                 worst, n_sum / 3) +
             list(nd);
  return v;
}

Verdict cutoff_robustness(Cache& cache) {
  Verdict v{true, {}};
  const Verdict c1 = conservation(1.5);
  const Verdict c2 = adiabatic_scaling(cache, true);
  const Verdict c3 = gap_persistence(cache, true);
  v.pass = c1.pass && c2.pass && c3.pass;
  const SweepResult& a = cache.adiabatic_sweep(false);
  const SweepResult& b = cache.adiabatic_sweep(true);
  // drift diagnostics sit at round-off and have no meaningful slope
  for (const char* name : {"adiabatic_error", "norm", "min_gap_ratio"}) {
    const double ds = std::abs(a.fit(name).slope - b.fit(name).slope);
    v.pass = v.pass && a.fit(name).fitted && b.fit(name).fitted && ds <= 0.15;
    v.detail += fmt("%s slope %.3f -> %.3f; ", name, a.fit(name).slope, b.fit(name).slope);
  }
  v.detail += std::string("at 1.5x cutoff criteria 1-3: ") + (c1.pass ? "pass" : "FAIL") + "/" +
              (c2.pass ? "pass" : "FAIL") + "/" + (c3.pass ? "pass" : "FAIL") + " (" + c1.detail + ")";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  Cache cache;
  cache.workers = workers_from_env();

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"conservation", [] { return conservation(1.0); }},
      {"adiabatic scaling", [&] { return adiabatic_scaling(cache, false); }},
      {"gap persistence", [&] { return gap_persistence(cache, false); }},
      {"kernel correctness", kernel_correctness},
      {"Gaussian vs Fock", bogoliubov_cross},
      {"norm-approximation trend", [&] { return norm_trend(cache); }},
      {"necessity of the correction", correction_needed},
      {"reduced-density trends", [&] { return density_trends(cache); }},
      {"phonon windows", [&] { return window_identity(cache); }},
      {"cutoff robustness", [&] { return cutoff_robustness(cache); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("criterion %2d %-28s %s  %s [%.1f s]\n", id, criteria[i].first.c_str(), v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
