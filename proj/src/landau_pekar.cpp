#include "polaron/landau_pekar.hpp"

#include <cmath>
#include <sstream>

#include "polaron/kernels.hpp"

namespace polaron {

namespace {

// psi <- e^{i tau Laplacian} psi.
void kinetic_flow(const Grid& g, CVec& psi, double tau) {
  g.dft_forward(psi);
  const auto k2 = g.k_squared();
  const double inv = 1.0 / static_cast<double>(g.size());
  CVec phase(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) phase[i] = std::polar(inv, -k2[i] * tau);
  kernels::cmul(psi, phase);
  g.dft_backward(psi);
}

// Exact flow of the coupling + field part. |psi|^2 is invariant, so sigma is
// frozen and phi solves a linear ODE with constant source.
void coupling_flow(const LpSystem& sys, PekarState& s, double tau, std::vector<Substep>* trace) {
  ComplexField sigma = sigma_from_psi(s.psi, sys.modes);
  const double a2 = sys.alpha * sys.alpha;
  const cplx rot = std::polar(1.0, -tau / a2);
  const cplx integ = cplx(0.0, a2) * (rot - 1.0);  // int_0^tau e^{-is/a2} ds
  ComplexField phi_bar(s.phi.grid, Basis::momentum);
  ComplexField start = trace ? s.phi : ComplexField{};
  for (std::size_t f : sys.modes.flat) {
    const cplx c = s.phi.values[f] + sigma.values[f];
    phi_bar.values[f] = integ * c - tau * sigma.values[f];
    s.phi.values[f] = rot * c - sigma.values[f];
  }
  const RVec v = potential_from_field(phi_bar, sys.modes);
  for (std::size_t i = 0; i < v.size(); ++i) s.psi.values[i] *= std::polar(1.0, -v[i]);
  if (trace) {
    Substep st;
    st.dt = tau;
    st.phi_start = std::move(start);
    for (auto& x : phi_bar.values) x /= tau;
    st.phi_avg = std::move(phi_bar);
    st.sigma = std::move(sigma);
    trace->push_back(std::move(st));
  }
}

void strang(const LpSystem& sys, PekarState& s, double dt, std::vector<Substep>* trace) {
  const Grid& g = *sys.grid;
  kinetic_flow(g, s.psi.values, 0.5 * dt);
  coupling_flow(sys, s, dt, trace);
  kinetic_flow(g, s.psi.values, 0.5 * dt);
}

double field_distance(const ComplexField& a, const ComplexField& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(acc * a.measure());
}

}  // namespace

double default_dt(double cutoff) { return 0.05 / std::max(1.0, cutoff * cutoff); }

PekarState make_initial_state(const LpSystem& sys, const ComplexField& phi0) {
  if (phi0.basis != Basis::momentum) throw BasisMismatch("initial field must be in the momentum basis");
  if (!(sys.alpha >= 1.0)) throw ConfigError("alpha must be at least 1");
  PekarState s;
  s.phi = phi0;
  s.gs = ground_state(potential_from_field(phi0, sys.modes), sys.grid, sys.eig);
  // a free electron has e = 0 up to solver round-off
  if (!(s.gs.energy < -sys.eig.eig_tol)) {
    std::ostringstream os;
    os << "initial field does not bind the electron: e(phi0) = " << s.gs.energy
       << " must be below -" << sys.eig.eig_tol;
    throw ConfigError(os.str());
  }
  s.cached_phi = phi0;
  s.psi = s.gs.psi;
  s.omega = dynamical_phase_rate(sys, s);
  return s;
}

void lp_step(const LpSystem& sys, PekarState& s, double dt, std::vector<Substep>* trace) {
  if (sys.order == 4) {
    const double c = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - c);
    const double w0 = -c * w1;
    strang(sys, s, w1 * dt, trace);
    strang(sys, s, w0 * dt, trace);
    strang(sys, s, w1 * dt, trace);
  } else {
    strang(sys, s, dt, trace);
  }
  const double omega_new = dynamical_phase_rate(sys, s);
  s.theta_omega += 0.5 * dt * (s.omega + omega_new);
  s.omega = omega_new;
  s.t += dt;
  const double nrm = norm(s.psi);
  if (std::abs(nrm - 1.0) > sys.tol_norm) {
    std::ostringstream os;
    os << "electron norm drifted to " << nrm << " at t = " << s.t;
    throw SolverError(os.str(), std::abs(nrm - 1.0));
  }
}

bool refresh_ground_state(const LpSystem& sys, PekarState& s, bool force) {
  if (!force && field_distance(s.phi, s.cached_phi) <= sys.refresh_tol) return false;
  GroundStateData next = ground_state(potential_from_field(s.phi, sys.modes), sys.grid, sys.eig, &s.gs);
  if (next.gap <= sys.gap_floor) {
    std::ostringstream os;
    os << "spectral gap " << next.gap << " fell to the floor " << sys.gap_floor << " at t = " << s.t;
    throw GapCollapse(os.str(), next.gap, s.t);
  }
  s.theta_e += 0.5 * (s.t - s.gs_time) * (s.gs.energy + next.energy);
  s.gs = std::move(next);
  s.gs_time = s.t;
  s.cached_phi = s.phi;
  return true;
}

double lp_energy(const LpSystem& sys, const PekarState& s) {
  const RVec v = potential_from_field(s.phi, sys.modes);
  const ComplexField hpsi = apply_h(v, s.psi);
  const double n = norm(s.phi);
  return inner(s.psi, hpsi).real() + n * n;
}

double dynamical_phase_rate(const LpSystem& sys, const PekarState& s) {
  const ComplexField sigma = sigma_from_psi(s.psi, sys.modes);
  return -inner(s.phi, sigma).real();
}

double dynamical_phase_rate_direct(const LpSystem& sys, const PekarState& s, double h) {
  PekarState fwd = s, bwd = s;
  lp_step(sys, fwd, h);
  lp_step(sys, bwd, -h);
  ComplexField dphi(s.phi.grid, Basis::momentum);
  for (std::size_t i = 0; i < dphi.size(); ++i) {
    dphi.values[i] = (fwd.phi.values[i] - bwd.phi.values[i]) / (2.0 * h);
  }
  const double n = norm(s.phi);
  return sys.alpha * sys.alpha * inner(s.phi, dphi).imag() + n * n;
}

double adiabatic_error(const LpSystem& sys, const PekarState& s) {
  if (s.gs_time != s.t || field_distance(s.phi, s.cached_phi) > sys.refresh_tol) {
    throw SolverError("ground-state cache is stale for the adiabatic error", 0.0);
  }
  const cplx ph = std::polar(1.0, -s.theta_e);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.psi.size(); ++i) {
    acc += std::norm(s.psi.values[i] - ph * s.gs.psi.values[i]);
  }
  return std::sqrt(acc * s.psi.measure());
}

LpRecord make_record(const LpSystem& sys, PekarState& s) {
  if (s.gs_time != s.t) refresh_ground_state(sys, s, true);
  LpRecord r;
  r.t = s.t;
  r.norm = norm(s.psi);
  r.energy = lp_energy(sys, s);
  r.e = s.gs.energy;
  r.gap = s.gs.gap;
  r.omega = s.omega;
  r.theta_e = s.theta_e;
  r.theta_omega = s.theta_omega;
  r.adiabatic_error = adiabatic_error(sys, s);
  r.phi_norm = norm(s.phi);
  return r;
}

Trajectory evolve(const LpSystem& sys, PekarState& s, const EvolveOptions& opts,
                  const Observer& observer) {
  if (!(opts.dt > 0.0)) throw ConfigError("dt must be positive");
  if (opts.record_stride < 1 || opts.gs_stride < 1) throw ConfigError("strides must be positive");
  Trajectory traj;
  const double span = std::abs(opts.t_final - s.t);
  const long steps = std::lround(std::ceil(span / opts.dt - 1e-9));
  const double dt = steps > 0 ? (opts.t_final - s.t) / static_cast<double>(steps) : 0.0;
  try {
    traj.records.push_back(make_record(sys, s));
    if (observer) observer(s, traj.records.back());
    for (long n = 1; n <= steps; ++n) {
      lp_step(sys, s, dt);
      const bool record = n % opts.record_stride == 0 || n == steps;
      if (record) {
        refresh_ground_state(sys, s, true);
        traj.records.push_back(make_record(sys, s));
        if (observer) observer(s, traj.records.back());
      } else if (n % opts.gs_stride == 0) {
        refresh_ground_state(sys, s);
      }
    }
  } catch (const GapCollapse& e) {
    traj.status = RunStatus::gap_abort;
    traj.message = e.what();
  }
  return traj;
}

}  // namespace polaron
