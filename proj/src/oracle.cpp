#include "polaron/oracle.hpp"

#include <cmath>
#include <sstream>

#include "polaron/kernels.hpp"

namespace polaron {

OracleSpace make_oracle_space(GridPtr grid, ModeSet modes, double alpha, int n_max, std::size_t dim_cap) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  const std::size_t fock_dim = FockBasis::dimension(modes.size(), n_max);
  const double dim = static_cast<double>(grid->size()) * static_cast<double>(fock_dim);
  if (dim > static_cast<double>(dim_cap)) {
    std::ostringstream os;
    os << "oracle dimension " << grid->size() << " x " << fock_dim << " = "
       << static_cast<std::size_t>(dim) << " exceeds the cap " << dim_cap;
    throw ConfigError(os.str());
  }
  FockBasis fock(modes.size(), n_max);
  return OracleSpace{std::move(grid), std::move(modes), std::move(fock), alpha};
}

FrohlichOperator::FrohlichOperator(const OracleSpace& space)
    : FrohlichOperator(space, RVec(space.grid_size(), 0.0), 0.0, CVec(space.modes.size(), cplx{})) {}

FrohlichOperator::FrohlichOperator(const OracleSpace& space, RVec potential, double shift, CVec source)
    : space_(&space), potential_(std::move(potential)), shift_(shift) {
  const Grid& g = *space.grid;
  const std::size_t n = g.size();
  if (potential_.size() != n) throw BasisMismatch("potential length does not match the grid");
  if (source.size() != space.modes.size()) throw BasisMismatch("source length does not match the mode set");
  const RVec amp = coupling_amplitudes(g, space.modes);
  const double pref = std::pow(g.dk(), 0.5 * g.dim()) / space.alpha;
  up_.resize(space.modes.size());
  down_.resize(space.modes.size());
  for (std::size_t j = 0; j < space.modes.size(); ++j) {
    const auto k = space.modes.momentum(j);
    up_[j].resize(n);
    down_[j].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = g.position(i);
      const double kx = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
      up_[j][i] = pref * (amp[j] * std::polar(1.0, -kx) - source[j]);
      down_[j][i] = std::conj(up_[j][i]);
    }
  }
  kin_.assign(g.k_squared().begin(), g.k_squared().end());
  for (double& v : kin_) v /= static_cast<double>(n);
  for (double& v : potential_) v += shift_;
}

void FrohlichOperator::apply(std::span<const cplx> in, std::span<cplx> out) const {
  const OracleSpace& sp = *space_;
  const Grid& g = *sp.grid;
  const std::size_t n = g.size();
  const FockBasis& fb = sp.fock;
  const double a2 = 1.0 / (sp.alpha * sp.alpha);
  for (std::size_t f = 0; f < fb.size(); ++f) {
    std::span<cplx> o = out.subspan(f * n, n);
    std::span<const cplx> i = in.subspan(f * n, n);
    std::copy(i.begin(), i.end(), o.begin());
    g.dft_forward(o);
    kernels::rmul(o, kin_);
    g.dft_backward(o);
    kernels::rmul_acc(o, potential_, i);
    kernels::caxpy(o, a2 * fb.total(f), i);
  }
  if (!coupling_) return;
  for (std::size_t f = 0; f < fb.size(); ++f) {
    std::span<const cplx> i = in.subspan(f * n, n);
    const auto& occ = fb.occupation(f);
    for (std::size_t j = 0; j < fb.modes(); ++j) {
      const long up = fb.raise(f, j);
      if (up >= 0) {
        kernels::cmul_acc(out.subspan(static_cast<std::size_t>(up) * n, n), std::sqrt(occ[j] + 1.0), up_[j], i);
      }
      const long down = fb.lower(f, j);
      if (down >= 0) {
        kernels::cmul_acc(out.subspan(static_cast<std::size_t>(down) * n, n), std::sqrt(double(occ[j])),
                          down_[j], i);
      }
    }
  }
}

LinearOp FrohlichOperator::as_linear_op() const {
  return [this](std::span<const cplx> in, std::span<cplx> out) { apply(in, out); };
}

OracleState product_state(const OracleSpace& space, const ComplexField& psi, std::span<const cplx> fock) {
  if (psi.basis != Basis::position || !psi.grid->same_as(*space.grid)) {
    throw BasisMismatch("electron factor must be a position field on the oracle grid");
  }
  if (fock.size() != space.fock.size()) throw BasisMismatch("Fock factor has the wrong length");
  const std::size_t n = space.grid_size();
  const double w = std::sqrt(psi.measure());
  OracleState s;
  s.c.assign(space.dimension(), cplx{});
  for (std::size_t f = 0; f < fock.size(); ++f) {
    if (fock[f] == cplx{}) continue;
    for (std::size_t x = 0; x < n; ++x) s.c[f * n + x] = fock[f] * psi.values[x] * w;
  }
  return s;
}

double oracle_norm(const OracleState& s) { return std::sqrt(kernels::norm2(s.c)); }

double expectation(const FrohlichOperator& op, const OracleState& s) {
  CVec hs(s.c.size());
  op.apply(s.c, hs);
  return kernels::cdot(s.c, hs).real();
}

double top_shell_weight(const OracleSpace& space, const OracleState& s) {
  const std::size_t n = space.grid_size();
  double w = 0.0;
  for (std::size_t f = 0; f < space.fock.size(); ++f) {
    if (space.fock.total(f) != space.fock.n_max()) continue;
    w += kernels::norm2(std::span<const cplx>(s.c).subspan(f * n, n));
  }
  return w;
}

void krylov_propagate(const FrohlichOperator& op, OracleState& s, double dt, const ExpmOptions& opts) {
  s.c = expm_hermitian(op.as_linear_op(), s.c, dt, opts).v;
  s.t += dt;
  s.max_leakage = std::max(s.max_leakage, top_shell_weight(op.space(), s));
}

void apply_weyl(const OracleSpace& space, std::span<const cplx> f, OracleState& s, int sign, double leak_tol) {
  if (f.size() != space.modes.size()) throw BasisMismatch("Weyl argument must live on the mode set");
  const Grid& g = *space.grid;
  const std::size_t n = g.size();
  const FockBasis& fb = space.fock;
  const double pref = sign * std::pow(g.dk(), 0.5 * g.dim()) / space.alpha;
  CVec beta(f.size());
  double size = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    beta[j] = pref * f[j];
    size += std::norm(beta[j]);
  }
  if (size == 0.0) return;
  // exp(beta.B* - conj(beta).B) = exp(-i H_w) with H_w = i beta.B* - i conj(beta).B
  const LinearOp op = [&](std::span<const cplx> in, std::span<cplx> out) {
    std::fill(out.begin(), out.end(), cplx{});
    for (std::size_t st = 0; st < fb.size(); ++st) {
      std::span<const cplx> i = in.subspan(st * n, n);
      const auto& occ = fb.occupation(st);
      for (std::size_t j = 0; j < fb.modes(); ++j) {
        const long up = fb.raise(st, j);
        if (up >= 0) {
          kernels::caxpy(out.subspan(static_cast<std::size_t>(up) * n, n),
                         cplx(0.0, 1.0) * beta[j] * std::sqrt(occ[j] + 1.0), i);
        }
        const long down = fb.lower(st, j);
        if (down >= 0) {
          kernels::caxpy(out.subspan(static_cast<std::size_t>(down) * n, n),
                         cplx(0.0, -1.0) * std::conj(beta[j]) * std::sqrt(double(occ[j])), i);
        }
      }
    }
  };
  ExpmOptions eo;
  eo.tol = 1e-12;
  s.c = expm_hermitian(op, s.c, 1.0, eo).v;
  const double leak = top_shell_weight(space, s);
  s.max_leakage = std::max(s.max_leakage, leak);
  if (leak_tol > 0.0 && leak > leak_tol) {
    std::ostringstream os;
    os << "displaced state leaks " << leak << " into the top occupation shell (tolerance " << leak_tol << ")";
    throw LeakageError(os.str(), leak);
  }
}

OracleState fluctuation_vector(const OracleSpace& space, const OracleState& psi_t, std::span<const cplx> phi_t,
                               double theta_e, double theta_omega, double leak_tol) {
  OracleState xi = psi_t;
  CVec f(phi_t.begin(), phi_t.end());
  const double a2 = space.alpha * space.alpha;
  for (auto& v : f) v *= a2;
  apply_weyl(space, f, xi, -1, leak_tol);
  const cplx ph = std::polar(1.0, theta_e + theta_omega);
  for (auto& v : xi.c) v *= ph;
  return xi;
}

namespace {

// B_j applied to every electron block.
CVec lower_mode(const OracleSpace& space, const OracleState& s, std::size_t j) {
  const std::size_t n = space.grid_size();
  const FockBasis& fb = space.fock;
  CVec out(s.c.size(), cplx{});
  for (std::size_t f = 0; f < fb.size(); ++f) {
    const long down = fb.lower(f, j);
    if (down < 0) continue;
    const double a = std::sqrt(double(fb.occupation(f)[j]));
    for (std::size_t x = 0; x < n; ++x) out[static_cast<std::size_t>(down) * n + x] += a * s.c[f * n + x];
  }
  return out;
}

RVec mode_occupations(const OracleSpace& space, const OracleState& s) {
  const std::size_t n = space.grid_size();
  const FockBasis& fb = space.fock;
  RVec occ(fb.modes(), 0.0);
  for (std::size_t f = 0; f < fb.size(); ++f) {
    const double w = kernels::norm2(std::span<const cplx>(s.c).subspan(f * n, n));
    for (std::size_t j = 0; j < fb.modes(); ++j) occ[j] += w * fb.occupation(f)[j];
  }
  return occ;
}

}  // namespace

ReducedDensities reduced_densities(const OracleSpace& space, const OracleState& xi, std::span<const cplx> phi) {
  const Grid& g = *space.grid;
  const std::size_t n = g.size();
  const std::size_t m = space.modes.size();
  const FockBasis& fb = space.fock;
  ReducedDensities rd;
  rd.gamma_el = MatC::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t f = 0; f < fb.size(); ++f) {
    Eigen::Map<const Eigen::VectorXcd> blk(xi.c.data() + f * n, static_cast<Eigen::Index>(n));
    rd.gamma_el.noalias() += blk * blk.adjoint();
  }
  std::vector<CVec> low(m);
  for (std::size_t j = 0; j < m; ++j) low[j] = lower_mode(space, xi, j);
  const double dkd = g.measure(Basis::momentum);
  const double a_scale = 1.0 / (space.alpha * std::sqrt(dkd));  // a_j = a_scale B_j
  CVec mean(m);
  for (std::size_t j = 0; j < m; ++j) mean[j] = a_scale * kernels::cdot(xi.c, low[j]);
  CVec shift(m, cplx{});
  if (!phi.empty()) {
    if (phi.size() != m) throw BasisMismatch("shift must live on the mode set");
    shift.assign(phi.begin(), phi.end());
  }
  rd.gamma_ph.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t l = 0; l < m; ++l) {
      const cplx aa = a_scale * a_scale * kernels::cdot(low[l], low[j]);
      rd.gamma_ph(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) =
          aa + shift[j] * std::conj(mean[l]) + std::conj(shift[l]) * mean[j] + shift[j] * std::conj(shift[l]);
    }
  }
  return rd;
}

double trace_distance(const MatC& a, const MatC& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw BasisMismatch("trace distance of differently shaped matrices");
  Eigen::BDCSVD<MatC> svd(a - b);
  return svd.singularValues().sum();
}

double electron_trace_distance(const ReducedDensities& rd, const ComplexField& psi) {
  const double w = std::sqrt(psi.measure());
  Eigen::VectorXcd p(static_cast<Eigen::Index>(psi.size()));
  for (std::size_t i = 0; i < psi.size(); ++i) p(static_cast<Eigen::Index>(i)) = psi.values[i] * w;
  return trace_distance(rd.gamma_el, p * p.adjoint());
}

double phonon_trace_distance(const OracleSpace& space, const ReducedDensities& rd, std::span<const cplx> phi) {
  const auto m = static_cast<Eigen::Index>(space.modes.size());
  if (static_cast<Eigen::Index>(phi.size()) != m) throw BasisMismatch("field must live on the mode set");
  Eigen::VectorXcd p(m);
  for (Eigen::Index j = 0; j < m; ++j) p(j) = phi[static_cast<std::size_t>(j)];
  const double dkd = space.grid->measure(Basis::momentum);
  return trace_distance(dkd * rd.gamma_ph, dkd * (p * p.adjoint()));
}

PhononWindows number_windows(const OracleSpace& space, const OracleState& xi, double K) {
  const RVec occ = mode_occupations(space, xi);
  const double a2 = 1.0 / (space.alpha * space.alpha);
  PhononWindows w;
  for (std::size_t j = 0; j < occ.size(); ++j) {
    (space.modes.abs_k(j) <= K ? w.n_leq : w.n_gt) += a2 * occ[j];
  }
  w.n_total = w.n_leq + w.n_gt;
  return w;
}

PhononWindows phonon_number_windows(const OracleSpace& space, const OracleState& psi, std::span<const cplx> phi,
                                    double K, double leak_tol) {
  OracleState xi = fluctuation_vector(space, psi, phi, 0.0, 0.0, leak_tol);
  return number_windows(space, xi, K);
}

PhononWindows phonon_number_windows_shifted(const OracleSpace& space, const OracleState& psi,
                                            std::span<const cplx> phi, double K) {
  const std::size_t m = space.modes.size();
  if (phi.size() != m) throw BasisMismatch("field must live on the mode set");
  const RVec occ = mode_occupations(space, psi);
  const double dkd = space.grid->measure(Basis::momentum);
  const double a2 = 1.0 / (space.alpha * space.alpha);
  const double a_scale = 1.0 / (space.alpha * std::sqrt(dkd));
  PhononWindows w;
  for (std::size_t j = 0; j < m; ++j) {
    const cplx mean = a_scale * kernels::cdot(psi.c, lower_mode(space, psi, j));
    const double val = a2 * occ[j] - 2.0 * dkd * (std::conj(phi[j]) * mean).real() + dkd * std::norm(phi[j]);
    (space.modes.abs_k(j) <= K ? w.n_leq : w.n_gt) += val;
  }
  w.n_total = w.n_leq + w.n_gt;
  return w;
}

}  // namespace polaron
