#pragma once

// Dense reference computations shared by the unit and acceptance tests.
// Everything here is built from explicit matrices so it shares no code path
// with the iterative solvers under test.

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "polaron/fluctuations.hpp"

namespace polaron::testing {

/// Electron Hamiltonian on a d=1 grid as a dense matrix in the orthonormal
/// grid basis: h_ab = (1/N) sum_m k_m^2 e^{ik_m (x_a - x_b)} + V_a delta_ab.
inline Eigen::MatrixXcd dense_h(const Grid& g, const RVec& v) {
  const int n = g.points();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      cplx s{};
      const double dxab = (a - b) * g.dx();
      for (int m = -n / 2; m < n / 2; ++m) {
        const double k = m * g.dk();
        s += k * k * std::polar(1.0, k * dxab);
      }
      h(a, b) = s / double(n);
    }
    h(a, a) += v[a];
  }
  return h;
}

struct DenseSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;   // orthonormal columns
  Eigen::MatrixXcd reduced_resolvent;
};

inline DenseSpectrum dense_spectrum(const Grid& g, const RVec& v) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_h(g, v));
  DenseSpectrum out{es.eigenvalues(), es.eigenvectors(), {}};
  const Eigen::Index n = out.values.size();
  out.reduced_resolvent = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    const Eigen::VectorXcd c = out.vectors.col(i);
    out.reduced_resolvent += c * c.adjoint() / (out.values(i) - out.values(0));
  }
  return out;
}

/// F(j, l) = g_j g_l dx sum_x conj(e^{ik_j x} psi) (R e^{ik_l x} psi) with R
/// from a full eigendecomposition.
inline Eigen::MatrixXcd dense_kernel(const Grid& g, const ModeSet& modes, const RVec& v,
                                     const ComplexField& psi) {
  const DenseSpectrum sp = dense_spectrum(g, v);
  const std::size_t m = modes.size();
  const int n = g.points();
  Eigen::MatrixXcd x(n, static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    const double k = modes.momentum(j)[0];
    for (int a = 0; a < n; ++a) x(a, j) = std::polar(1.0, k * g.position(a)[0]) * psi.values[a];
  }
  const Eigen::MatrixXcd rx = sp.reduced_resolvent * x;
  Eigen::MatrixXcd f = g.dx() * (x.adjoint() * rx);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t l = 0; l < m; ++l) f(j, l) *= 1.0 / (modes.abs_k(j) * modes.abs_k(l));
  }
  return f;
}

inline ComplexField random_field(const GridPtr& g, Basis b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ComplexField f(g, b);
  for (auto& v : f.values) v = {nd(rng), nd(rng)};
  return f;
}

/// A smooth bound-state potential: Gaussian field of amplitude a on the modes.
inline ComplexField gaussian_field(const ModeSet& modes, double a, double w) {
  CVec vals(modes.size());
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const double k = modes.abs_k(j);
    vals[j] = a * std::exp(-k * k / (w * w));
  }
  return scatter_modes(vals, modes);
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace polaron::testing
