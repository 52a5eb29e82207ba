#pragma once

// Krylov-subspace tools for Hermitian operators given as matrix-free
// actions: restarted Lanczos for the lowest eigenpairs, and the short-iterate
// Lanczos approximation of exp(-i t H) v.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "polaron/types.hpp"

namespace polaron {

/// out = H in. `out` is pre-sized and must be fully overwritten.
using LinearOp = std::function<void(std::span<const cplx> in, std::span<cplx> out)>;

struct LanczosOptions {
  double tol = 1e-10;      // residual norm ||H x - theta x|| per converged pair
  int max_matvecs = 6000;
  int subspace = 48;       // basis size before a thick restart
  std::uint64_t seed = 0x5eed1234abcdULL;
};

struct EigenResult {
  RVec values;
  std::vector<CVec> vectors;  // unit norm (unweighted)
  RVec residuals;
  int matvecs = 0;
  bool converged = false;
};

/// Lowest `nev` eigenpairs by thick-restart Lanczos with full
/// reorthogonalization. `start` may hold warm-start vectors.
EigenResult lowest_eigenpairs(const LinearOp& op, std::size_t n, int nev,
                              std::vector<CVec> start, const LanczosOptions& opts);

struct ExpmOptions {
  double tol = 1e-10;   // a-posteriori error estimate, relative to ||v||
  int max_dim = 40;
  int max_halvings = 12;
};

struct ExpmResult {
  CVec v;
  int matvecs = 0;
  int substeps = 1;
  double error_estimate = 0.0;
};

/// exp(-i t H) v. Splits t into equal substeps when the Krylov dimension
/// needed for `tol` exceeds max_dim; throws SolverError past max_halvings.
ExpmResult expm_hermitian(const LinearOp& op, std::span<const cplx> v, double t,
                          const ExpmOptions& opts);

}  // namespace polaron
