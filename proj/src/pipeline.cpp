#include "polaron/pipeline.hpp"

#include <cmath>
#include <limits>

namespace polaron {

namespace {

long step_count(double span, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (span < 0.0) throw ConfigError("t_final must not be negative");
  return std::lround(std::ceil(span / dt - 1e-9));
}

ComplexField checked_gap(const LpSystem& sys, GroundStateData& gs, const ComplexField& phi, double t) {
  GroundStateData next = ground_state(potential_from_field(phi, sys.modes), sys.grid, sys.eig, &gs);
  if (next.gap <= sys.gap_floor) {
    throw GapCollapse("spectral gap fell to the floor inside a step", next.gap, t);
  }
  gs = std::move(next);
  return gs.psi;
}

}  // namespace

FluctuationRun run_fluctuations(const LpSystem& sys, const ComplexField& phi0, const FluctuationRunOptions& opts) {
  FluctuationRun run;
  PekarState s = make_initial_state(sys, phi0);
  const long steps = step_count(opts.t_final, opts.dt);
  const double dt = steps > 0 ? opts.t_final / static_cast<double>(steps) : 0.0;
  const double alpha = sys.alpha;

  run.kernel0 = assemble_kernel(s.gs, sys.modes, opts.ropts, opts.workers);
  run.c0 = run.kernel0.trace_term();
  BogoliubovState bog = bogoliubov_vacuum(sys.modes.size());
  std::optional<FockBasis> fb;
  FockVector fv;
  if (opts.n_max > 0) {
    fb.emplace(sys.modes.size(), opts.n_max);
    fv = fock_vacuum(*fb, alpha);
  }
  auto sample = [&](double c_trace) {
    FluctuationSample r;
    r.t = s.t;
    r.e = s.gs.energy;
    r.gap = s.gs.gap;
    r.c_trace = c_trace;
    const Moments m = moments(bog, alpha);
    r.n_gauss = m.n_expect;
    r.overlap_gauss = m.vacuum_overlap;
    r.departure = vacuum_distance(m.vacuum_overlap);
    r.symplectic_defect = symplectic_defect(bog);
    r.symmetry_defect = symmetry_defect(bog);
    if (fb) {
      const FockMoments fm = fock_moments(fv, *fb);
      r.n_fock = fm.n_expect;
      r.overlap_fock = fm.vacuum_overlap;
      r.leakage = top_shell_weight(*fb, fv.c);
    } else {
      r.n_fock = std::numeric_limits<double>::quiet_NaN();
    }
    run.samples.push_back(r);
  };
  sample(run.c0);
  GroundStateData mid = s.gs;
  std::vector<Substep> trace;
  try {
    for (long n = 1; n <= steps; ++n) {
      trace.clear();
      lp_step(sys, s, dt, &trace);
      double c_trace = 0.0;
      for (const Substep& st : trace) {
        checked_gap(sys, mid, st.phi_avg, s.t);
        const KernelF K = assemble_kernel(mid, sys.modes, opts.ropts, opts.workers);
        c_trace = K.trace_term();
        bogoliubov_step(bog, quadratic_generator(K, sys.modes), alpha, st.dt);
        if (fb) fock_step(fv, *fb, fock_generator(*fb, K, sys.modes, alpha), st.dt);
      }
      refresh_ground_state(sys, s, true);
      if (n % opts.record_stride == 0 || n == steps) sample(c_trace);
    }
  } catch (const GapCollapse& e) {
    run.status = RunStatus::gap_abort;
    run.message = e.what();
  }
  if (fb) {
    run.max_leakage = fv.max_leakage;
    run.leakage_flag = opts.leak_tol > 0.0 && fv.max_leakage > opts.leak_tol;
  }
  run.final_state = std::move(s);
  return run;
}

OracleRun run_oracle(const LpSystem& sys, const ComplexField& phi0, const OracleRunOptions& opts) {
  OracleRun run;
  const OracleSpace space = make_oracle_space(sys.grid, sys.modes, sys.alpha, opts.n_max, opts.dim_cap);
  PekarState s = make_initial_state(sys, phi0);
  const long steps = step_count(opts.t_final, opts.dt);
  const double dt = steps > 0 ? opts.t_final / static_cast<double>(steps) : 0.0;
  const double alpha = sys.alpha;

  const KernelF K0 = assemble_kernel(s.gs, sys.modes, opts.ropts);
  run.c0 = K0.trace_term();
  const FockVector vac = fock_vacuum(space.fock, alpha);
  FockVector ups = vac;
  BogoliubovState bog = bogoliubov_vacuum(sys.modes.size());
  OracleState xi = product_state(space, s.gs.psi, vac.c);

  auto sample = [&]() {
    OracleSample r;
    r.t = s.t;
    const OracleState corrected = product_state(space, s.gs.psi, ups.c);
    const OracleState bare = product_state(space, s.gs.psi, vac.c);
    double dc = 0.0, du = 0.0;
    for (std::size_t i = 0; i < xi.c.size(); ++i) {
      dc += std::norm(xi.c[i] - corrected.c[i]);
      du += std::norm(xi.c[i] - bare.c[i]);
    }
    r.err_corrected = std::sqrt(dc);
    r.err_uncorrected = std::sqrt(du);
    r.departure = vacuum_distance(ups.c[0]);
    const CVec phi_modes = gather_modes(s.phi, sys.modes);
    const ReducedDensities rd = reduced_densities(space, xi, phi_modes);
    r.trace_el = electron_trace_distance(rd, s.psi);
    r.trace_ph = phonon_trace_distance(space, rd, phi_modes);
    r.windows = number_windows(space, xi, opts.window_k);
    r.xi_norm = oracle_norm(xi);
    r.leakage = top_shell_weight(space, xi);
    r.fock_leakage = top_shell_weight(space.fock, ups.c);
    r.n_gauss = moments(bog, alpha).n_expect;
    r.n_fock = fock_moments(ups, space.fock).n_expect;
    r.adiabatic_error = adiabatic_error(sys, s);
    r.gap = s.gs.gap;
    run.max_leakage = std::max({run.max_leakage, r.leakage, r.fock_leakage});
    run.samples.push_back(r);
  };
  sample();
  GroundStateData mid = s.gs;
  std::vector<Substep> trace;
  try {
    for (long n = 1; n <= steps; ++n) {
      trace.clear();
      lp_step(sys, s, dt, &trace);
      for (const Substep& st : trace) {
        checked_gap(sys, mid, st.phi_avg, s.t);
        // Frame generator averaged over the substep: the field enters affinely
        // and sigma is frozen, so this is the midpoint Magnus step.
        const FrohlichOperator L(space, mid.potential, -mid.energy, gather_modes(st.sigma, sys.modes));
        krylov_propagate(L, xi, st.dt, opts.expm);
        const KernelF K = assemble_kernel(mid, sys.modes, opts.ropts);
        bogoliubov_step(bog, quadratic_generator(K, sys.modes), alpha, st.dt);
        fock_step(ups, space.fock, fock_generator(space.fock, K, sys.modes, alpha), st.dt, 0.0, opts.expm);
      }
      refresh_ground_state(sys, s, true);
      if (n % opts.record_stride == 0 || n == steps) sample();
    }
  } catch (const GapCollapse& e) {
    run.status = RunStatus::gap_abort;
    run.message = e.what();
  }
  run.leakage_flag = run.max_leakage > opts.leak_tol;
  run.final_state = std::move(s);
  return run;
}

}  // namespace polaron
