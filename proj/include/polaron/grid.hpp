#pragma once

// Periodic box [-L, L]^d with N points per axis, its reciprocal lattice, a
// unitary continuum-normalized Fourier transform, and the phonon mode set.
//
// Conventions:
//   x_n  = -L + n dx,            dx = 2L / N
//   k_m  = m dk,                 dk = pi / L,  m in {-N/2, ..., N/2 - 1}
//   f^(k) = (2 pi)^{-d/2} sum_x e^{-ik.x} f(x) dx^d
// so sum |f|^2 dx^d = sum |f^|^2 dk^d, and lattice sums weighted by dk^d
// approximate continuum integrals over k.

#include <array>
#include <cstddef>
#include <memory>
#include <span>

#include "polaron/types.hpp"

namespace polaron {

enum class Basis { position, momentum };
enum class Direction { forward, inverse };

class FftEngine;

class Grid {
 public:
  Grid(int dim, int points, double half_length);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int dim() const noexcept { return dim_; }
  int points() const noexcept { return points_; }
  double half_length() const noexcept { return half_length_; }
  double dx() const noexcept { return dx_; }
  double dk() const noexcept { return dk_; }
  std::size_t size() const noexcept { return size_; }
  double measure(Basis b) const noexcept {
    return b == Basis::position ? position_measure_ : momentum_measure_;
  }

  /// Folded integer lattice coordinates of a flat index (unused axes are 0).
  std::array<int, 3> lattice(std::size_t flat) const noexcept;
  std::array<double, 3> momentum(std::size_t flat) const noexcept;
  std::array<double, 3> position(std::size_t flat) const noexcept;
  std::size_t flat_index(const std::array<int, 3>& lattice) const;
  /// Index of -k. The Nyquist component folds onto itself.
  std::size_t negate(std::size_t flat) const noexcept;
  bool has_nyquist_component(std::size_t flat) const noexcept;

  /// |k|^2 per flat index.
  std::span<const double> k_squared() const noexcept { return k2_; }
  /// (-1)^{sum m}: the e^{ik.L} factor from the box starting at -L.
  std::span<const double> origin_sign() const noexcept { return sign_; }

  /// Raw unnormalized DFTs, in place. Thread-safe.
  void dft_forward(std::span<cplx> data) const;
  void dft_backward(std::span<cplx> data) const;

  bool same_as(const Grid& other) const noexcept;

 private:
  int dim_;
  int points_;
  double half_length_;
  double dx_;
  double dk_;
  std::size_t size_;
  double position_measure_;
  double momentum_measure_;
  RVec k2_;
  RVec sign_;
  std::unique_ptr<FftEngine> fft_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Throws ConfigError on d not in {1,3}, odd N, N < 8 or L <= 0.
GridPtr make_grid(int dim, int points, double half_length);

struct ComplexField {
  GridPtr grid;
  Basis basis = Basis::position;
  CVec values;

  ComplexField() = default;
  ComplexField(GridPtr g, Basis b);
  ComplexField(GridPtr g, Basis b, CVec v);

  std::size_t size() const noexcept { return values.size(); }
  double measure() const noexcept { return grid->measure(basis); }
};

ComplexField transform(const ComplexField& field, Direction direction);

/// <a, b> including the measure weight; conjugate-linear in a.
cplx inner(const ComplexField& a, const ComplexField& b);
double norm(const ComplexField& f);
void require_compatible(const ComplexField& a, const ComplexField& b);

/// Phonon modes 0 < |k| <= cutoff, stored in (+k, -k) pairs so that the
/// partner of mode j is j ^ 1.
struct ModeSet {
  GridPtr grid;
  double cutoff = 0.0;
  std::vector<std::size_t> flat;
  std::vector<std::size_t> partner;

  std::size_t size() const noexcept { return flat.size(); }
  std::array<double, 3> momentum(std::size_t j) const { return grid->momentum(flat[j]); }
  double abs_k(std::size_t j) const;
};

/// Nyquist-component lattice points are excluded so that negation is an
/// involution on the set. Throws ConfigError if the set would be empty.
ModeSet make_modes(GridPtr grid, double cutoff);

/// g(k_j) = 1/|k_j| for every mode.
RVec coupling_amplitudes(const Grid& grid, const ModeSet& modes);

/// Values of a momentum-basis field on the mode set.
CVec gather_modes(const ComplexField& field, const ModeSet& modes);
/// Momentum-basis field supported on the mode set.
ComplexField scatter_modes(std::span<const cplx> values, const ModeSet& modes);
/// Largest |value| outside the mode set.
double off_support(const ComplexField& field, const ModeSet& modes);

/// Plane wave e^{ik.x} for lattice point `flat`, position basis.
ComplexField plane_wave(GridPtr grid, std::size_t flat);

}  // namespace polaron
