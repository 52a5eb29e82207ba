#include <cmath>

#include "doctest.h"
#include "polaron/electron.hpp"
#include "polaron/fluctuations.hpp"
#include "support.hpp"

using namespace polaron;

TEST_SUITE("electron") {

TEST_CASE("potential of a single mode pair") {
  GridPtr g = make_grid(1, 32, 4.0);
  const ModeSet m = make_modes(g, g->dk() * 1.5);   // one pair, k = +-dk
  REQUIRE(m.size() == 2);
  const cplx a{0.7, -0.2}, b{-0.1, 0.4};
  CVec vals(2);
  const std::size_t plus = m.momentum(0)[0] > 0 ? 0 : 1;
  vals[plus] = a;
  vals[plus ^ 1U] = b;
  const RVec v = potential_from_field(scatter_modes(vals, m), m);
  const double k = g->dk();
  double err = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->position(i)[0];
    const double expect = 2.0 * g->dk() / k * (( a + std::conj(b)) * std::polar(1.0, k * x)).real();
    err = std::max(err, std::abs(v[i] - expect));
  }
  CHECK(err < 1e-13);

  CHECK_THROWS_AS(potential_from_field(ComplexField(g, Basis::position), m), BasisMismatch);
}

TEST_CASE("density source of a Gaussian") {
  // |psi|^2 = pi^{-1/2} e^{-x^2}, int e^{-ikx} |psi|^2 dx = e^{-k^2/4}
  GridPtr g = make_grid(1, 64, 8.0);
  const ModeSet m = make_modes(g, 4.0);
  ComplexField psi(g, Basis::position);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->position(i)[0];
    psi.values[i] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  }
  const CVec sig = gather_modes(sigma_from_psi(psi, m), m);
  double err = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double k = m.abs_k(j);
    err = std::max(err, std::abs(sig[j] - std::exp(-0.25 * k * k) / k));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("ground state and resolvent against dense diagonalization") {
  GridPtr g = make_grid(1, 16, 3.0);
  const ModeSet m = make_modes(g, 3.5);
  const RVec v = potential_from_field(testing::gaussian_field(m, -1.5, 2.0), m);
  EigenOptions eo;
  eo.eig_tol = 1e-12;
  const GroundStateData gs = ground_state(v, g, eo);
  const testing::DenseSpectrum sp = testing::dense_spectrum(*g, v);
  CHECK(gs.energy == doctest::Approx(sp.values(0)).epsilon(1e-11));
  CHECK(gs.gap == doctest::Approx(sp.values(1) - sp.values(0)).epsilon(1e-9));
  CHECK(norm(gs.psi) == doctest::Approx(1.0).epsilon(1e-13));
  cplx ov{};
  cplx sum{};
  for (std::size_t i = 0; i < g->size(); ++i) {
    ov += std::conj(sp.vectors(i, 0)) * gs.psi.values[i] * std::sqrt(g->dx());
    sum += gs.psi.values[i];
  }
  CHECK(std::abs(ov) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(std::abs(sum.imag()) < 1e-12);
  CHECK(sum.real() > 0.0);

  const ComplexField x = testing::random_field(g, Basis::position, 11);
  ResolventOptions ro;
  ro.cg_tol = 1e-13;
  const ResolventResult rr = solve_resolvent(gs, x, ro);
  Eigen::VectorXcd xv(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) xv(i) = x.values[i];
  const Eigen::VectorXcd yv = sp.reduced_resolvent * xv;
  double err = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) err = std::max(err, std::abs(yv(i) - rr.y.values[i]));
  CHECK(err < 1e-9);
  CHECK(std::abs(inner(gs.psi, rr.y)) < 1e-11);

  ro.gap_floor = gs.gap * 1.01;
  CHECK_THROWS_AS(solve_resolvent(gs, x, ro), GapCollapse);
}

TEST_CASE("kernel against dense resolvent") {
  GridPtr g = make_grid(1, 16, 3.0);
  const ModeSet m = make_modes(g, 5.0);
  const RVec v = potential_from_field(testing::gaussian_field(m, -1.5, 2.0), m);
  EigenOptions eo;
  eo.eig_tol = 1e-12;
  const GroundStateData gs = ground_state(v, g, eo);
  ResolventOptions ro;
  ro.cg_tol = 1e-13;
  const KernelF k = assemble_kernel(gs, m, ro);
  const MatC ref = testing::dense_kernel(*g, m, v, gs.psi);
  CHECK(testing::max_abs_diff(k.F, ref) < 1e-8);
  CHECK(k.hermiticity_defect < 1e-10);
  CHECK(k.reflection_defect < 1e-10);
  CHECK(k.min_diagonal >= 0.0);
  double tr = 0.0;
  for (Eigen::Index j = 0; j < ref.rows(); ++j) tr += g->dk() * ref(j, j).real();
  CHECK(k.trace_term() == doctest::Approx(tr).epsilon(1e-9));

  // worker count does not change the result
  const KernelF k3 = assemble_kernel(gs, m, ro, 3);
  CHECK(testing::max_abs_diff(k.F, k3.F) == 0.0);
}

TEST_CASE("kinetic energy of a plane wave") {
  GridPtr g = make_grid(1, 32, 4.0);
  ComplexField p = plane_wave(g, g->flat_index({3, 0, 0}));
  for (auto& c : p.values) c /= std::sqrt(8.0);
  const double k = 3 * g->dk();
  CHECK(kinetic_energy(p) == doctest::Approx(k * k));
  CHECK(h1_norm(p) == doctest::Approx(std::sqrt(1.0 + k * k)));
}

}
