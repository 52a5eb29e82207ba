#include <random>

#include "doctest.h"
#include "polaron/kernels.hpp"
#include "polaron/landau_pekar.hpp"
#include "support.hpp"

using namespace polaron;

namespace {

std::vector<double> random_doubles(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]) / (1.0 + std::abs(a[i])));
  return e;
}

struct BackendGuard {
  kernels::Backend saved = kernels::active_backend();
  ~BackendGuard() { kernels::set_backend(saved); }
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("backend selection") {
  BackendGuard guard;
  CHECK(kernels::available(kernels::Backend::scalar));
  kernels::set_backend(kernels::Backend::scalar);
  CHECK(kernels::active_backend() == kernels::Backend::scalar);
  CHECK(kernels::parse_backend("scalar") == kernels::Backend::scalar);
  CHECK(kernels::parse_backend("avx2") == kernels::Backend::avx2);
  CHECK_THROWS_AS(kernels::parse_backend("sse9"), ConfigError);
  if (!kernels::available(kernels::Backend::avx2)) {
    CHECK_THROWS_AS(kernels::set_backend(kernels::Backend::avx2), ConfigError);
  }
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const kernels::KernelTable* v = kernels::avx2_table();
  if (v == nullptr || !kernels::available(kernels::Backend::avx2)) {
    MESSAGE("AVX2 unavailable on this machine; equivalence not exercised");
    return;
  }
  const kernels::KernelTable& s = kernels::scalar_table();
  // odd lengths exercise the remainder loops
  for (std::size_t n : {1U, 2U, 3U, 7U, 64U, 1001U}) {
    CAPTURE(n);
    const auto a0 = random_doubles(2 * n, 1 + n);
    const auto b = random_doubles(2 * n, 2 + n);
    const auto p = random_doubles(2 * n, 3 + n);
    const auto r = random_doubles(n, 4 + n);

    auto a1 = a0, a2 = a0;
    s.cmul(a1.data(), b.data(), n);
    v->cmul(a2.data(), b.data(), n);
    CHECK(max_rel(a1, a2) < 1e-15);

    a1 = a0, a2 = a0;
    s.caxpy(a1.data(), 0.3, -1.7, b.data(), n);
    v->caxpy(a2.data(), 0.3, -1.7, b.data(), n);
    CHECK(max_rel(a1, a2) < 1e-15);

    a1 = a0, a2 = a0;
    s.cmul_acc(a1.data(), -0.8, 0.45, p.data(), b.data(), n);
    v->cmul_acc(a2.data(), -0.8, 0.45, p.data(), b.data(), n);
    CHECK(max_rel(a1, a2) < 1e-14);

    a1 = a0, a2 = a0;
    s.rmul_acc(a1.data(), r.data(), b.data(), n);
    v->rmul_acc(a2.data(), r.data(), b.data(), n);
    CHECK(max_rel(a1, a2) < 1e-15);

    a1 = a0, a2 = a0;
    s.rmul(a1.data(), r.data(), n);
    v->rmul(a2.data(), r.data(), n);
    CHECK(max_rel(a1, a2) < 1e-15);

    double re1, im1, re2, im2;
    s.cdot(a0.data(), b.data(), n, &re1, &im1);
    v->cdot(a0.data(), b.data(), n, &re2, &im2);
    CHECK(std::abs(re1 - re2) < 1e-13 * (1.0 + n));
    CHECK(std::abs(im1 - im2) < 1e-13 * (1.0 + n));
    CHECK(std::abs(s.norm2(a0.data(), n) - v->norm2(a0.data(), n)) < 1e-13 * (1.0 + n));
  }
}

TEST_CASE("classical step agrees across backends") {
  if (!kernels::available(kernels::Backend::avx2)) return;
  BackendGuard guard;
  auto run = [](kernels::Backend b) {
    kernels::set_backend(b);
    LpSystem sys;
    sys.grid = make_grid(1, 64, 8.0);
    sys.modes = make_modes(sys.grid, 4.0);
    sys.alpha = 2.0;
    const ComplexField phi0 = testing::gaussian_field(sys.modes, -1.0, 2.0);
    PekarState s = make_initial_state(sys, phi0);
    for (int i = 0; i < 20; ++i) lp_step(sys, s, 0.01);
    return s;
  };
  const PekarState a = run(kernels::Backend::scalar);
  const PekarState b = run(kernels::Backend::avx2);
  double e = 0.0;
  for (std::size_t i = 0; i < a.psi.size(); ++i) e = std::max(e, std::abs(a.psi.values[i] - b.psi.values[i]));
  for (std::size_t i = 0; i < a.phi.size(); ++i) e = std::max(e, std::abs(a.phi.values[i] - b.phi.values[i]));
  CHECK(e < 1e-10);
}

}
