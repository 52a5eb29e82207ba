#include <cmath>
#include <random>

#include "doctest.h"
#include "polaron/oracle.hpp"
#include "polaron/pipeline.hpp"
#include "support.hpp"

using namespace polaron;

namespace {

OracleState random_state(const OracleSpace& sp, std::uint64_t seed, int max_total) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  OracleState s;
  s.c.assign(sp.dimension(), cplx{});
  const std::size_t n = sp.grid_size();
  for (std::size_t f = 0; f < sp.fock.size(); ++f) {
    if (sp.fock.total(f) > max_total) continue;
    for (std::size_t x = 0; x < n; ++x) s.c[f * n + x] = {nd(rng), nd(rng)};
  }
  const double nrm = oracle_norm(s);
  for (auto& c : s.c) c /= nrm;
  return s;
}

cplx dot(const CVec& a, const CVec& b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("dimension cap") {
  GridPtr g = make_grid(1, 8, 3.0);
  CHECK_THROWS_WITH_AS(make_oracle_space(g, make_modes(g, 1.1), 2.0, 4, 100),
                       doctest::Contains("120"), ConfigError);
  CHECK(make_oracle_space(g, make_modes(g, 1.1), 2.0, 4).dimension() == 120);
}

TEST_CASE("Hamiltonian is Hermitian and decouples") {
  GridPtr g = make_grid(1, 8, 3.0);
  const OracleSpace sp = make_oracle_space(g, make_modes(g, 2.5), 1.5, 3);
  FrohlichOperator h(sp);
  const OracleState a = random_state(sp, 1, 3), b = random_state(sp, 2, 3);
  CVec ha(sp.dimension()), hb(sp.dimension());
  h.apply(a.c, ha);
  h.apply(b.c, hb);
  CHECK(std::abs(dot(a.c, hb) - std::conj(dot(b.c, ha))) < 1e-12);

  // without coupling: kinetic energy plus alpha^{-2} times the occupation
  h.set_coupling(false);
  OracleState e;
  e.c.assign(sp.dimension(), cplx{});
  const std::size_t one = 1;   // first one-phonon tuple
  for (std::size_t x = 0; x < 8; ++x) e.c[one * 8 + x] = 1.0 / std::sqrt(8.0);
  CHECK(expectation(h, e) == doctest::Approx(1.0 / (1.5 * 1.5)).epsilon(1e-12));
}

TEST_CASE("coherent state number expectation") {
  // <N> in W(alpha^2 phi) Omega equals ||phi||^2 in L^2(dk)
  GridPtr g = make_grid(1, 8, 3.0);
  const ModeSet m = make_modes(g, 1.1);
  const double alpha = 1.3;
  const OracleSpace sp = make_oracle_space(g, m, alpha, 40);
  ComplexField psi(g, Basis::position);
  for (auto& c : psi.values) c = 1.0 / std::sqrt(6.0);
  CVec vac(sp.fock.size());
  vac[0] = 1.0;
  OracleState s = product_state(sp, psi, vac);
  const CVec phi{cplx(0.4, -0.3), cplx(-0.2, 0.1)};
  CVec f(phi.size());
  double phi2 = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    f[j] = alpha * alpha * phi[j];
    phi2 += g->dk() * std::norm(phi[j]);
  }
  apply_weyl(sp, f, s);
  CHECK(oracle_norm(s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(number_windows(sp, s, 10.0).n_total == doctest::Approx(phi2).epsilon(1e-11));
  // and W* undoes it
  apply_weyl(sp, f, s, -1);
  const OracleState back = product_state(sp, psi, vac);
  double err = 0.0;
  for (std::size_t i = 0; i < s.c.size(); ++i) err = std::max(err, std::abs(s.c[i] - back.c[i]));
  CHECK(err < 1e-11);
}

TEST_CASE("window identity on displaced states") {
  GridPtr g = make_grid(1, 8, 3.0);
  const ModeSet m = make_modes(g, 2.5);   // two pairs, split by K
  const double alpha = 2.0;
  const OracleSpace sp = make_oracle_space(g, m, alpha, 24);
  const OracleState xi = random_state(sp, 9, 2);
  CVec phi{cplx(0.1, 0.05), cplx(-0.08, 0.02), cplx(0.03, -0.04), cplx(0.06, 0.01)};
  CVec f(phi.size());
  for (std::size_t j = 0; j < phi.size(); ++j) f[j] = alpha * alpha * phi[j];
  OracleState psi = xi;
  apply_weyl(sp, f, psi);
  const double K = 1.5;
  const PhononWindows direct = number_windows(sp, xi, K);
  const PhononWindows shifted = phonon_number_windows_shifted(sp, psi, phi, K);
  const PhononWindows weyl = phonon_number_windows(sp, psi, phi, K);
  CHECK(std::abs(shifted.n_leq + shifted.n_gt - direct.n_total) < 1e-12);
  CHECK(std::abs(shifted.n_leq - direct.n_leq) < 1e-12);
  CHECK(std::abs(weyl.n_total - direct.n_total) < 1e-12);
  CHECK(direct.n_gt > 0.0);
}

TEST_CASE("reduced densities of a product state") {
  GridPtr g = make_grid(1, 8, 3.0);
  const ModeSet m = make_modes(g, 1.1);
  const OracleSpace sp = make_oracle_space(g, m, 2.0, 4);
  ComplexField psi = testing::random_field(g, Basis::position, 4);
  const double nrm = norm(psi);
  for (auto& c : psi.values) c /= nrm;
  CVec vac(sp.fock.size());
  vac[0] = 1.0;
  const OracleState s = product_state(sp, psi, vac);
  const ReducedDensities rd = reduced_densities(sp, s);
  CHECK(electron_trace_distance(rd, psi) < 1e-13);
  CHECK(rd.gamma_ph.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(phonon_trace_distance(sp, rd, CVec(m.size())) < 1e-14);
  MatC a = MatC::Identity(3, 3), b = MatC::Zero(3, 3);
  CHECK(trace_distance(a, b) == doctest::Approx(3.0));
}

TEST_CASE("moving-frame evolution matches the lab frame") {
  // At alpha = 1 the coherent amplitude is small enough to hold the lab
  // vector W(alpha^2 phi_t) xi_t in a deeper truncation.
  LpSystem sys;
  sys.grid = make_grid(1, 8, 2.9);
  sys.modes = make_modes(sys.grid, 1.2);
  sys.alpha = 1.0;
  const ComplexField phi0 = testing::gaussian_field(sys.modes, -1.25, 1e6);
  OracleRunOptions o;
  o.dt = 0.005;
  o.t_final = 0.3;
  o.record_stride = 60;
  o.n_max = 14;
  o.leak_tol = 1.0;
  const OracleRun fr = run_oracle(sys, phi0, o);
  REQUIRE(fr.status == RunStatus::ok);
  const OracleSample& last = fr.samples.back();

  const OracleSpace sp = make_oracle_space(sys.grid, sys.modes, sys.alpha, 24);
  const PekarState s0 = make_initial_state(sys, phi0);
  CVec vac(sp.fock.size());
  vac[0] = 1.0;
  OracleState lab = product_state(sp, s0.gs.psi, vac);
  const CVec f0 = gather_modes(s0.phi, sys.modes);
  apply_weyl(sp, f0, lab);   // alpha = 1
  FrohlichOperator h(sp);
  ExpmOptions eo;
  eo.tol = 1e-12;
  krylov_propagate(h, lab, o.t_final, eo);
  const PekarState& st = fr.final_state;
  const CVec phit = gather_modes(st.phi, sys.modes);
  const OracleState xi = fluctuation_vector(sp, lab, phit, st.theta_e, st.theta_omega);
  const OracleState ref = product_state(sp, st.gs.psi, vac);
  double d2 = 0.0;
  for (std::size_t i = 0; i < xi.c.size(); ++i) d2 += std::norm(xi.c[i] - ref.c[i]);
  const ReducedDensities rd = reduced_densities(sp, xi, phit);
  CHECK(std::sqrt(d2) == doctest::Approx(last.err_uncorrected).epsilon(1e-3));
  CHECK(electron_trace_distance(rd, st.psi) == doctest::Approx(last.trace_el).epsilon(1e-3));
  CHECK(number_windows(sp, xi, 10.0).n_total == doctest::Approx(last.windows.n_total).epsilon(1e-3));
}

}
