#pragma once

// The electron Hamiltonian h_phi = -Laplacian + V_phi on the periodic grid:
// potential and density-source assembly, ground state with spectral gap,
// and the reduced resolvent R = q (h - e)^{-1} q.

#include <span>

#include "polaron/grid.hpp"
#include "polaron/krylov.hpp"

namespace polaron {

/// V_phi(x) = sum_j dk^d g_j [e^{ik_j.x} phi_j + c.c.], real.
/// Throws BasisMismatch if phi is not a momentum field supported on `modes`.
RVec potential_from_field(const ComplexField& phi, const ModeSet& modes);

/// sigma_psi(k_j) = (2 pi)^{d/2} g_j |psi|^2^(k_j), momentum field on `modes`.
ComplexField sigma_from_psi(const ComplexField& psi, const ModeSet& modes);

/// -Laplacian psi (spectral) + V psi.
ComplexField apply_h(std::span<const double> potential, const ComplexField& psi);

struct EigenOptions {
  double eig_tol = 1e-10;
  int max_matvecs = 6000;
  int subspace = 48;
  std::uint64_t seed = 0x5eed1234abcdULL;
};

struct GroundStateData {
  double energy = 0.0;
  ComplexField psi;       // normalized, sum_x psi(x) real and positive
  double gap = 0.0;
  RVec potential;
  double residual = 0.0;
  ComplexField excited;   // a first-excited eigenvector
  double excited_residual = 0.0;
};

/// Two lowest eigenpairs of -Laplacian + V. `warm` seeds the Krylov basis.
/// Throws SolverError on non-convergence.
GroundStateData ground_state(RVec potential, GridPtr grid, const EigenOptions& opts,
                             const GroundStateData* warm = nullptr);

struct ResolventOptions {
  double cg_tol = 1e-10;   // relative residual
  int max_iter = 5000;
  double gap_floor = 0.0;
};

struct ResolventResult {
  ComplexField y;
  double residual = 0.0;   // relative
  int iterations = 0;
};

/// y = q (h - e)^{-1} q x by preconditioned conjugate gradients on the
/// orthogonal complement of the ground state.
/// Throws GapCollapse if gs.gap <= gap_floor and SolverError on stagnation.
ResolventResult solve_resolvent(const GroundStateData& gs, const ComplexField& x,
                                const ResolventOptions& opts);

inline ComplexField apply_resolvent(const GroundStateData& gs, const ComplexField& x,
                                    const ResolventOptions& opts = {}) {
  return solve_resolvent(gs, x, opts).y;
}

/// Kinetic energy <psi, -Laplacian psi> and the H^1 norm.
double kinetic_energy(const ComplexField& psi);
double h1_norm(const ComplexField& psi);

}  // namespace polaron
