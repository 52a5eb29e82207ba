#include "polaron/electron.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "polaron/kernels.hpp"

namespace polaron {

namespace {

void require_position(const ComplexField& f) {
  if (f.basis != Basis::position) throw BasisMismatch("expected a position-basis field");
}

// -Laplacian applied spectrally, written into out.
void kinetic(const Grid& g, std::span<const cplx> in, std::span<cplx> out) {
  std::copy(in.begin(), in.end(), out.begin());
  g.dft_forward(out);
  RVec scale(g.k_squared().begin(), g.k_squared().end());
  const double inv = 1.0 / static_cast<double>(g.size());
  for (double& s : scale) s *= inv;
  kernels::rmul(out, scale);
  g.dft_backward(out);
}

LinearOp h_operator(const Grid& g, const RVec& potential) {
  return [&g, &potential](std::span<const cplx> in, std::span<cplx> out) {
    kinetic(g, in, out);
    kernels::rmul_acc(out, potential, in);
  };
}

ComplexField to_field(GridPtr grid, const CVec& unit) {
  // unit vectors (unweighted) -> L2-normalized fields
  const double s = 1.0 / std::sqrt(grid->measure(Basis::position));
  CVec v(unit);
  for (auto& x : v) x *= s;
  return ComplexField(std::move(grid), Basis::position, std::move(v));
}

CVec to_unit(const ComplexField& f) {
  const double s = std::sqrt(f.measure());
  CVec v(f.values);
  for (auto& x : v) x *= s;
  return v;
}

}  // namespace

RVec potential_from_field(const ComplexField& phi, const ModeSet& modes) {
  if (phi.basis != Basis::momentum) throw BasisMismatch("phi must be a momentum-basis field");
  if (!phi.grid->same_as(*modes.grid)) throw BasisMismatch("phi and mode set live on different grids");
  if (off_support(phi, modes) != 0.0) throw BasisMismatch("phi has support outside the mode set");
  const Grid& g = *phi.grid;
  const RVec amp = coupling_amplitudes(g, modes);
  const auto sign = g.origin_sign();
  CVec c(g.size(), cplx{});
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const std::size_t f = modes.flat[j];
    c[f] = amp[j] * phi.values[f] * sign[f];
  }
  g.dft_backward(c);
  RVec V(g.size());
  const double w = 2.0 * g.measure(Basis::momentum);
  for (std::size_t i = 0; i < g.size(); ++i) V[i] = w * c[i].real();
  return V;
}

ComplexField sigma_from_psi(const ComplexField& psi, const ModeSet& modes) {
  require_position(psi);
  const Grid& g = *psi.grid;
  const double nrm = norm(psi);
  if (std::abs(nrm - 1.0) > 1e-6) {
    std::clog << "warning: sigma_from_psi called with ||psi|| = " << nrm << "\n";
  }
  CVec dens(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) dens[i] = std::norm(psi.values[i]);
  g.dft_forward(dens);
  const RVec amp = coupling_amplitudes(g, modes);
  const auto sign = g.origin_sign();
  const double w = g.measure(Basis::position);
  ComplexField out(psi.grid, Basis::momentum);
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const std::size_t f = modes.flat[j];
    out.values[f] = amp[j] * w * sign[f] * dens[f];
  }
  return out;
}

ComplexField apply_h(std::span<const double> potential, const ComplexField& psi) {
  require_position(psi);
  if (potential.size() != psi.size()) throw BasisMismatch("potential length mismatch");
  ComplexField out(psi.grid, Basis::position);
  kinetic(*psi.grid, psi.values, out.values);
  kernels::rmul_acc(out.values, potential, psi.values);
  return out;
}

double kinetic_energy(const ComplexField& psi) {
  require_position(psi);
  ComplexField t(psi.grid, Basis::position);
  kinetic(*psi.grid, psi.values, t.values);
  return inner(psi, t).real();
}

double h1_norm(const ComplexField& psi) {
  const double n = norm(psi);
  return std::sqrt(n * n + kinetic_energy(psi));
}

GroundStateData ground_state(RVec potential, GridPtr grid, const EigenOptions& opts,
                             const GroundStateData* warm) {
  const Grid& g = *grid;
  if (potential.size() != g.size()) throw BasisMismatch("potential length mismatch");
  const LinearOp op = h_operator(g, potential);
  std::vector<CVec> start;
  if (warm && warm->psi.size() == g.size()) {
    start.push_back(to_unit(warm->psi));
    if (warm->excited.size() == g.size()) start.push_back(to_unit(warm->excited));
  }
  LanczosOptions lo;
  lo.tol = opts.eig_tol;
  lo.max_matvecs = opts.max_matvecs;
  lo.subspace = opts.subspace;
  lo.seed = opts.seed;
  EigenResult er = lowest_eigenpairs(op, g.size(), 2, std::move(start), lo);
  if (!er.converged) {
    std::ostringstream os;
    os << "ground state did not converge: residuals " << er.residuals[0] << ", "
       << er.residuals[1] << " after " << er.matvecs << " matvecs";
    throw SolverError(os.str(), er.residuals[0]);
  }

  // Phase convention: sum_x psi(x) real and positive, imaginary dust dropped.
  CVec& v = er.vectors[0];
  cplx total = std::accumulate(v.begin(), v.end(), cplx{});
  if (std::abs(total) > 0.0) {
    const cplx rot = std::conj(total) / std::abs(total);
    for (auto& x : v) x *= rot;
  }
  double max_imag = 0.0;
  for (const auto& x : v) max_imag = std::max(max_imag, std::abs(x.imag()));
  if (max_imag < 1e-10) {
    for (auto& x : v) x = cplx(x.real(), 0.0);
    const double s = 1.0 / std::sqrt(kernels::norm2(v));
    for (auto& x : v) x *= s;
  }

  GroundStateData gs;
  gs.energy = er.values[0];
  gs.gap = er.values[1] - er.values[0];
  gs.residual = er.residuals[0];
  gs.excited_residual = er.residuals[1];
  gs.psi = to_field(grid, v);
  gs.excited = to_field(grid, er.vectors[1]);
  gs.potential = std::move(potential);
  return gs;
}

ResolventResult solve_resolvent(const GroundStateData& gs, const ComplexField& x,
                                const ResolventOptions& opts) {
  require_position(x);
  require_compatible(gs.psi, x);
  if (gs.gap <= opts.gap_floor) {
    std::ostringstream os;
    os << "spectral gap " << gs.gap << " is at or below the floor " << opts.gap_floor;
    throw GapCollapse(os.str(), gs.gap, 0.0);
  }
  const Grid& g = *x.grid;
  const std::size_t n = g.size();
  const CVec p = to_unit(gs.psi);
  auto project = [&p](CVec& v) {
    const cplx c = kernels::cdot(p, v);
    kernels::caxpy(v, -c, p);
  };
  const LinearOp hop = h_operator(g, gs.potential);
  auto apply_a = [&](const CVec& in, CVec& out) {
    hop(in, out);
    kernels::caxpy(out, -gs.energy, in);
    project(out);
  };
  // Kinetic preconditioner (k^2 + s)^{-1}, s set by the mean of V - e.
  double mean_shift = 0.0;
  for (double v : gs.potential) mean_shift += v - gs.energy;
  mean_shift = std::max(gs.gap, mean_shift / static_cast<double>(n));
  RVec precond(g.k_squared().begin(), g.k_squared().end());
  for (double& s : precond) s = 1.0 / ((s + mean_shift) * static_cast<double>(n));
  auto apply_m = [&](const CVec& in, CVec& out) {
    out = in;
    g.dft_forward(out);
    kernels::rmul(out, precond);
    g.dft_backward(out);
    project(out);
  };

  CVec b = to_unit(x);
  project(b);
  ResolventResult res;
  const double bnorm = std::sqrt(kernels::norm2(b));
  CVec y(n, cplx{});
  if (bnorm == 0.0) {
    res.y = to_field(x.grid, y);
    return res;
  }
  CVec r = b, z(n), q(n), ap(n);
  apply_m(r, z);
  CVec dir = z;
  double rz = kernels::cdot(r, z).real();
  double rel = 1.0;
  double best = 1.0;
  int since_best = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    apply_a(dir, ap);
    const double pap = kernels::cdot(dir, ap).real();
    if (!(pap > 0.0)) throw SolverError("resolvent operator not positive on ran q", rel);
    const double a = rz / pap;
    kernels::caxpy(y, a, dir);
    kernels::caxpy(r, -a, ap);
    project(y);
    project(r);
    rel = std::sqrt(kernels::norm2(r)) / bnorm;
    res.iterations = it;
    if (rel <= opts.cg_tol) break;
    if (rel < 0.5 * best) {
      best = rel;
      since_best = 0;
    } else if (++since_best > 400) {
      throw SolverError("resolvent CG stagnated", rel);
    }
    apply_m(r, z);
    const double rz_new = kernels::cdot(r, z).real();
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) dir[i] = z[i] + beta * dir[i];
    project(dir);
  }
  // True residual, not the recurrence.
  CVec check(n);
  apply_a(y, check);
  for (std::size_t i = 0; i < n; ++i) check[i] = b[i] - check[i];
  res.residual = std::sqrt(kernels::norm2(check)) / bnorm;
  if (res.residual > std::max(opts.cg_tol * 10.0, 1e-13) && rel > opts.cg_tol) {
    std::ostringstream os;
    os << "resolvent CG reached " << opts.max_iter << " iterations at residual " << res.residual;
    throw SolverError(os.str(), res.residual);
  }
  res.y = to_field(x.grid, y);
  return res;
}

}  // namespace polaron
