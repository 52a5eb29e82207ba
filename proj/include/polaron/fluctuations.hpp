#pragma once

// Quadratic phonon fluctuation dynamics i d/dt Y = (N - A_t) Y.
//
// Mode operators are normalized, a_j = alpha^{-1} dk^{-d/2} B_j with
// [B_j, B*_l] = delta_jl, so N = alpha^{-2} sum B*_j B_j and, with
// W = dk^d F,
//   N - A = alpha^{-2} [ B* P B - (B* Q B* + h.c.) - tr W ],
//   P = 1 - 2W,  Q_jl = W_{j, -l}.
// Two representations are provided: the Gaussian (u, v) flow, and a state
// vector in the occupation basis truncated at total occupation n_max.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "polaron/electron.hpp"

namespace polaron {

using MatC = Eigen::MatrixXcd;

struct KernelF {
  MatC F;                          // F(k_j, k_l), Hermitian after assembly
  double t = 0.0;
  double hermiticity_defect = 0.0; // max |F - F^dagger| before symmetrization
  double reflection_defect = 0.0;  // max |F(-l,-j) - F(j,l)| before symmetrization
  double min_diagonal = 0.0;       // min Re F(j,j) before symmetrization
  double measure = 0.0;            // dk^d

  /// c0 = sum_j dk^d F(j,j).
  double trace_term() const;
};

/// Column l is one resolvent solve on e^{ik_l.x} psi_phi. Columns are
/// independent and may run on `workers` threads; the result does not depend
/// on the worker count.
KernelF assemble_kernel(const GroundStateData& gs, const ModeSet& modes,
                        const ResolventOptions& ropts = {}, int workers = 1);

struct Generator {
  MatC P;             // Hermitian, coefficient of B* B
  MatC Q;             // symmetric, coefficient of B* B*
  double constant = 0.0;  // tr W
};

/// Throws ConfigError if the mode set is not closed under negation.
Generator quadratic_generator(const KernelF& F, const ModeSet& modes);

/// Affine combination (1 - s) a + s b of generator blocks.
Generator blend(const Generator& a, const Generator& b, double s);

/// Heisenberg-picture B_j(t) = sum_l u_jl B_l + conj(v_jl) B*_l.
struct BogoliubovState {
  MatC u;
  MatC v;
  double theta = 0.0;      // alpha^{-2} int (tr P / 2 + const) dt
  double log_det_arg = 0.0;  // continuous branch of arg det conj(u)
  double t = 0.0;
  int reconditioned = 0;   // count of polar corrections applied
};

BogoliubovState bogoliubov_vacuum(std::size_t modes);

/// max |u^dagger u - v^dagger v - 1| and max |u^T v - (u^T v)^T|.
double symplectic_defect(const BogoliubovState& s);
double symmetry_defect(const BogoliubovState& s);

/// Implicit-midpoint (Cayley) step of d/dt [u; v] = -i alpha^{-2} K [u; v],
/// K = [[P, -2Q], [2 conj(Q), -conj(P)]], with P, Q held at their midpoint
/// values. Throws SolverError if the invariants drift beyond 1e-6.
void bogoliubov_step(BogoliubovState& s, const Generator& g, double alpha, double dt);

struct Moments {
  double n_expect = 0.0;
  MatC occupation;          // <B*_l B_j> at (j, l)
  cplx vacuum_overlap{1.0, 0.0};
};

Moments moments(const BogoliubovState& s, double alpha);

/// ||Y - Omega|| from the vacuum overlap of a normalized Y.
inline double vacuum_distance(cplx overlap) {
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - overlap.real())));
}

// ---- truncated occupation basis ----

/// Occupation tuples (n_1..n_M) with sum n_j <= n_max, ordered by total
/// occupation then lexicographically descending; index 0 is the vacuum.
class FockBasis {
 public:
  FockBasis(std::size_t modes, int n_max);

  std::size_t modes() const noexcept { return modes_; }
  int n_max() const noexcept { return n_max_; }
  std::size_t size() const noexcept { return total_.size(); }
  const std::vector<int>& occupation(std::size_t idx) const { return tuples_[idx]; }
  int total(std::size_t idx) const { return total_[idx]; }
  /// Index of the tuple with n_j raised (+1) or lowered (-1), or -1 if outside.
  long raise(std::size_t idx, std::size_t j) const { return up_[idx * modes_ + j]; }
  long lower(std::size_t idx, std::size_t j) const { return down_[idx * modes_ + j]; }

  static std::size_t dimension(std::size_t modes, int n_max);

 private:
  std::size_t modes_;
  int n_max_;
  std::vector<std::vector<int>> tuples_;
  std::vector<int> total_;
  std::vector<long> up_;
  std::vector<long> down_;
};

using SparseC = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Matrix of N - A in the truncated basis, built term by term from
///   A = alpha^{-2} sum_jl W_jl (B*_j B*_{-l} + B*_j B_l + B*_{-l} B_{-j} + B_{-j} B_l)
///       + alpha^{-2} tr W
/// with exact sqrt(n) matrix elements, then made exactly Hermitian by
/// averaging with its adjoint. Independent of the (P, Q) reduction.
SparseC fock_generator(const FockBasis& basis, const KernelF& F, const ModeSet& modes,
                       double alpha);

/// Blend of two kernels' generators, (1 - s) a + s b.
SparseC blend(const SparseC& a, const SparseC& b, double s);

struct FockVector {
  CVec c;                  // orthonormal-basis coefficients
  double alpha = 1.0;
  double t = 0.0;
  double max_leakage = 0.0;  // largest top-shell weight seen
};

FockVector fock_vacuum(const FockBasis& basis, double alpha);

/// Weight in the top shell sum n_j = n_max.
double top_shell_weight(const FockBasis& basis, std::span<const cplx> c);

/// exp(-i G dt) by Lanczos. Throws LeakageError when the top-shell weight
/// exceeds leak_tol (if leak_tol > 0).
void fock_step(FockVector& vec, const FockBasis& basis, const SparseC& G, double dt,
               double leak_tol = 0.0, const ExpmOptions& opts = {});

struct FockMoments {
  double n_expect = 0.0;
  cplx vacuum_overlap{1.0, 0.0};
  double norm = 1.0;
};

FockMoments fock_moments(const FockVector& vec, const FockBasis& basis);

// ---- departure from the vacuum ----

struct DepartureSample {
  double t = 0.0;
  double distance = 0.0;   // ||Y_t - Omega||
};

struct DepartureReport {
  double c0 = 0.0;
  double delta = 0.0;       // t / alpha^2 at the probe
  double measured = 0.0;    // ||Y_t - Omega|| at the probe
  double bound = 0.0;       // c0 * delta / 2
  double leading = 0.0;     // |e^{i c0 delta} - 1|
  bool satisfied = false;
};

/// Checks ||Y_t - Omega|| >= c0 delta / 2 at the sample nearest to t = delta alpha^2.
DepartureReport remark_lower_bound(const std::vector<DepartureSample>& samples, double alpha,
                                   double c0, double delta);

}  // namespace polaron
