#pragma once

// Lockstep drivers: the classical trajectory together with the quadratic
// fluctuation dynamics and, on tiny instances, the exact fluctuation vector.

#include "polaron/landau_pekar.hpp"
#include "polaron/oracle.hpp"

namespace polaron {

struct FluctuationSample {
  double t = 0.0;
  double e = 0.0;
  double gap = 0.0;
  double c_trace = 0.0;          // tr W at t
  double n_gauss = 0.0;
  double n_fock = 0.0;           // NaN without the Fock path
  cplx overlap_gauss{1.0, 0.0};
  cplx overlap_fock{1.0, 0.0};
  double departure = 0.0;        // ||Y_t - Omega|| from the Gaussian overlap
  double symplectic_defect = 0.0;
  double symmetry_defect = 0.0;
  double leakage = 0.0;
};

struct FluctuationRunOptions {
  double dt = 0.0;
  double t_final = 0.0;
  int record_stride = 1;
  int n_max = 0;                 // 0: Gaussian path only
  double leak_tol = 0.0;         // flag threshold for the Fock path
  ResolventOptions ropts;
  int workers = 1;
};

struct FluctuationRun {
  std::vector<FluctuationSample> samples;
  double c0 = 0.0;
  KernelF kernel0;
  double max_leakage = 0.0;      // Fock path only
  bool leakage_flag = false;
  RunStatus status = RunStatus::ok;
  std::string message;
  PekarState final_state;
};

/// Gaussian (and optionally truncated-Fock) vacuum evolution along the
/// classical trajectory from (psi_{phi0}, phi0). Kernels are evaluated at the
/// time-averaged field of every integrator substep.
FluctuationRun run_fluctuations(const LpSystem& sys, const ComplexField& phi0,
                                const FluctuationRunOptions& opts);

struct OracleSample {
  double t = 0.0;
  double err_corrected = 0.0;     // ||xi_t - psi_{phi_t} (x) Y_t||
  double err_uncorrected = 0.0;   // ||xi_t - psi_{phi_t} (x) Omega||
  double departure = 0.0;         // ||Y_t - Omega||
  double trace_el = 0.0;          // ||gamma_el - |psi_t><psi_t| ||_tr
  double trace_ph = 0.0;          // ||gamma_ph - |phi_t><phi_t| ||_tr
  PhononWindows windows;          // on xi_t
  double xi_norm = 1.0;
  double leakage = 0.0;           // top-shell weight of xi_t
  double fock_leakage = 0.0;      // top-shell weight of Y_t
  double n_gauss = 0.0;
  double n_fock = 0.0;
  double adiabatic_error = 0.0;
  double gap = 0.0;
};

struct OracleRunOptions {
  double dt = 0.0;
  double t_final = 0.0;
  int record_stride = 1;
  int n_max = 4;
  double window_k = 0.0;          // K for the N_<= / N_> split
  double leak_tol = 1e-3;
  std::size_t dim_cap = 5'000'000;
  ExpmOptions expm;
  ResolventOptions ropts;
};

struct OracleRun {
  std::vector<OracleSample> samples;
  double c0 = 0.0;
  double max_leakage = 0.0;
  bool leakage_flag = false;
  RunStatus status = RunStatus::ok;
  std::string message;
  PekarState final_state;
};

/// Evolves the fluctuation vector directly in the moving coherent frame,
///   i d/dt xi = [h_phi - e(phi) + N + phi(G_x - sigma)] xi,  xi_0 = psi_{phi0} (x) Omega,
/// which avoids representing the alpha-dependent coherent amplitude in the
/// truncated space. The frame follows the integrator's piecewise-exact field
/// path, so no consistency error enters from the classical solver.
OracleRun run_oracle(const LpSystem& sys, const ComplexField& phi0, const OracleRunOptions& opts);

}  // namespace polaron
