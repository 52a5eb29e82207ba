#pragma once

// Coupled electron / classical-field dynamics
//   i d/dt psi = h_phi psi,   i alpha^2 d/dt phi = phi + sigma_psi
// with energy and phase bookkeeping.

#include <functional>
#include <optional>
#include <string>

#include "polaron/electron.hpp"

namespace polaron {

struct LpSystem {
  GridPtr grid;
  ModeSet modes;
  double alpha = 1.0;
  int order = 2;               // 2: Strang; 4: triple-jump composition of Strang
  EigenOptions eig;
  double gap_floor = 0.0;      // absolute; harness sets 0.1 * initial gap by default
  double tol_norm = 1e-8;
  double refresh_tol = 1e-6;   // ground state recomputed once ||phi - phi_cached|| exceeds this
};

struct PekarState {
  double t = 0.0;
  ComplexField psi;            // position basis
  ComplexField phi;            // momentum basis, supported on the mode set
  GroundStateData gs;          // ground state of h at cached_phi
  ComplexField cached_phi;
  double gs_time = 0.0;        // time at which gs was last refreshed
  double theta_e = 0.0;        // trapezoid integral of e(phi_u) over refresh times
  double theta_omega = 0.0;    // trapezoid integral of omega over steps
  double omega = 0.0;          // omega at t
};

/// State (psi_{phi0}, phi0). Throws ConfigError unless e(phi0) < -eig_tol.
PekarState make_initial_state(const LpSystem& sys, const ComplexField& phi0);

/// Within one Strang substep the field follows
///   phi(s) = e^{-is/alpha^2} (phi_start + sigma) - sigma
/// exactly, with sigma frozen at its value after the first kinetic half step.
struct Substep {
  double dt = 0.0;
  ComplexField phi_start;
  ComplexField phi_avg;   // (1/dt) int phi(s) ds
  ComplexField sigma;
};

/// One step of size dt (negative dt runs backwards). Does not refresh the
/// ground-state cache; updates theta_omega and omega. Substeps are appended
/// to `trace` when given.
void lp_step(const LpSystem& sys, PekarState& s, double dt, std::vector<Substep>* trace = nullptr);

/// Recompute the ground state if phi moved more than refresh_tol (or always
/// when `force`). Accumulates theta_e by the trapezoid rule between refreshes.
/// Throws GapCollapse when the gap falls to gap_floor.
bool refresh_ground_state(const LpSystem& sys, PekarState& s, bool force = false);

/// <psi, h_phi psi> + ||phi||^2.
double lp_energy(const LpSystem& sys, const PekarState& s);

/// omega = alpha^2 Im<phi, d_t phi> + ||phi||^2 reduced with the field
/// equation to -Re<phi, sigma_psi>.
double dynamical_phase_rate(const LpSystem& sys, const PekarState& s);

/// The unreduced expression with d_t phi from a centered difference of two
/// integrator steps of size h.
double dynamical_phase_rate_direct(const LpSystem& sys, const PekarState& s, double h);

/// ||psi_t - e^{-i theta_e} psi_{phi_t}||. Throws SolverError if the cache is stale.
double adiabatic_error(const LpSystem& sys, const PekarState& s);

struct LpRecord {
  double t = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  double e = 0.0;
  double gap = 0.0;
  double omega = 0.0;
  double theta_e = 0.0;
  double theta_omega = 0.0;
  double adiabatic_error = 0.0;
  double phi_norm = 0.0;
};

enum class RunStatus { ok, gap_abort };

struct Trajectory {
  std::vector<LpRecord> records;
  RunStatus status = RunStatus::ok;
  std::string message;
};

struct EvolveOptions {
  double dt = 0.0;
  double t_final = 0.0;
  int record_stride = 1;     // steps between records
  int gs_stride = 1;         // steps between ground-state refresh checks
};

/// Called after every recorded step with the current state and record.
using Observer = std::function<void(const PekarState&, const LpRecord&)>;

LpRecord make_record(const LpSystem& sys, PekarState& s);

/// Fixed-step evolution to t_final (sign of t_final sets direction).
/// A gap collapse ends the run with status gap_abort; records so far are kept.
Trajectory evolve(const LpSystem& sys, PekarState& s, const EvolveOptions& opts,
                  const Observer& observer = {});

/// Default step 0.05 / max(1, cutoff^2).
double default_dt(double cutoff);

}  // namespace polaron
