#pragma once

// Exact reference dynamics on (grid) x (truncated occupation space).
//
// Vectors hold orthonormal-basis coefficients laid out Fock-major: entry
// f * n_grid + x is the amplitude of occupation tuple f at grid point x,
// equal to Psi(x, f) dx^{d/2}.

#include <optional>

#include "polaron/fluctuations.hpp"

namespace polaron {

struct OracleSpace {
  GridPtr grid;
  ModeSet modes;
  FockBasis fock;
  double alpha = 1.0;

  std::size_t grid_size() const { return grid->size(); }
  std::size_t dimension() const { return grid->size() * fock.size(); }
};

/// Throws ConfigError (with the computed dimension) past dim_cap.
OracleSpace make_oracle_space(GridPtr grid, ModeSet modes, double alpha, int n_max,
                              std::size_t dim_cap = 5'000'000);

struct OracleState {
  CVec c;
  double t = 0.0;
  double max_leakage = 0.0;
};

/// Operator of the form
///   -Laplacian + V(x) + shift + N + [sum_j c_j(x) B*_j + h.c.],
///   c_j(x) = alpha^{-1} dk^{d/2} (g_j e^{-ik_j.x} - s_j).
/// V = 0, shift = 0, s = 0 is the full Hamiltonian; V = V_phi, shift = -e(phi),
/// s = sigma_psi is the generator of the fluctuation vector in the frame of
/// the moving coherent state.
class FrohlichOperator {
 public:
  /// Full Hamiltonian.
  explicit FrohlichOperator(const OracleSpace& space);
  FrohlichOperator(const OracleSpace& space, RVec potential, double shift, CVec source);

  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  LinearOp as_linear_op() const;
  const OracleSpace& space() const { return *space_; }

  /// Switches the phonon coupling off (decoupled spectrum checks).
  void set_coupling(bool on) { coupling_ = on; }

 private:
  const OracleSpace* space_;
  RVec potential_;
  double shift_ = 0.0;
  std::vector<CVec> up_;     // c_j(x)
  std::vector<CVec> down_;   // conj c_j(x)
  RVec kin_;                 // k^2 / n_grid
  bool coupling_ = true;
};

OracleState product_state(const OracleSpace& space, const ComplexField& psi, std::span<const cplx> fock);

double oracle_norm(const OracleState& s);
double expectation(const FrohlichOperator& op, const OracleState& s);
double top_shell_weight(const OracleSpace& space, const OracleState& s);

/// exp(-i H dt) by Lanczos with adaptive dimension and substep halving.
void krylov_propagate(const FrohlichOperator& op, OracleState& s, double dt,
                      const ExpmOptions& opts = {});

/// W(sign * f) = exp(a*(f) - a(f)) with f given by its values on the mode set.
/// Throws LeakageError if the top shell ends up above leak_tol (when > 0).
void apply_weyl(const OracleSpace& space, std::span<const cplx> f, OracleState& s, int sign = +1,
                double leak_tol = 0.0);

/// e^{i(theta_e + theta_omega)} W*(alpha^2 phi_t) Psi_t.
OracleState fluctuation_vector(const OracleSpace& space, const OracleState& psi_t,
                               std::span<const cplx> phi_t, double theta_e, double theta_omega,
                               double leak_tol = 0.0);

struct ReducedDensities {
  MatC gamma_el;   // electron, orthonormal grid basis
  MatC gamma_ph;   // <a*_l a_j> at (j, l), continuum normalization
};

/// Reduced densities of W(alpha^2 phi) xi given xi; phi = empty means no shift.
ReducedDensities reduced_densities(const OracleSpace& space, const OracleState& xi,
                                   std::span<const cplx> phi = {});

/// Sum of singular values of A - B.
double trace_distance(const MatC& a, const MatC& b);

/// || gamma_el - |psi><psi| ||_tr for a position-basis field psi.
double electron_trace_distance(const ReducedDensities& rd, const ComplexField& psi);
/// || gamma_ph - |phi><phi| ||_tr as an operator on L^2(dk).
double phonon_trace_distance(const OracleSpace& space, const ReducedDensities& rd,
                             std::span<const cplx> phi);

struct PhononWindows {
  double n_leq = 0.0;
  double n_gt = 0.0;
  double n_total = 0.0;
};

/// N_<= and N_> (|k| <= K and |k| > K) on a vector already in the displaced frame.
PhononWindows number_windows(const OracleSpace& space, const OracleState& xi, double K);

/// Windows on W*(alpha^2 phi) Psi, by applying the Weyl operator.
PhononWindows phonon_number_windows(const OracleSpace& space, const OracleState& psi,
                                    std::span<const cplx> phi, double K, double leak_tol = 0.0);

/// Same quantity from the lab-frame vector through
///   W N_> W* = N_> - phi(chi phi) + ||chi phi||^2,
/// without applying any Weyl operator.
PhononWindows phonon_number_windows_shifted(const OracleSpace& space, const OracleState& psi,
                                            std::span<const cplx> phi, double K);

}  // namespace polaron
