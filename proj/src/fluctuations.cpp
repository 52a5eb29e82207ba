#include "polaron/fluctuations.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace polaron {

double KernelF::trace_term() const { return measure * F.diagonal().real().sum(); }

KernelF assemble_kernel(const GroundStateData& gs, const ModeSet& modes,
                        const ResolventOptions& ropts, int workers) {
  const GridPtr grid = gs.psi.grid;
  if (!grid->same_as(*modes.grid)) throw BasisMismatch("ground state and mode set live on different grids");
  const std::size_t m = modes.size();
  const RVec g = coupling_amplitudes(*grid, modes);

  // x_l = e^{ik_l.x} psi_phi
  std::vector<ComplexField> x(m);
  for (std::size_t l = 0; l < m; ++l) {
    x[l] = plane_wave(grid, modes.flat[l]);
    for (std::size_t i = 0; i < grid->size(); ++i) x[l].values[i] *= gs.psi.values[i];
  }
  MatC raw(m, m);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&]() {
    for (std::size_t l = next++; l < m; l = next++) {
      try {
        const ComplexField y = solve_resolvent(gs, x[l], ropts).y;
        for (std::size_t j = 0; j < m; ++j) {
          raw(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = g[j] * g[l] * inner(x[j], y);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int nthreads = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(1, m)));
  if (nthreads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  KernelF K;
  K.measure = grid->measure(Basis::momentum);
  K.min_diagonal = raw.diagonal().real().minCoeff();
  K.hermiticity_defect = (raw - raw.adjoint()).cwiseAbs().maxCoeff();
  const auto n = static_cast<Eigen::Index>(m);
  double refl = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      const auto jb = static_cast<Eigen::Index>(modes.partner[static_cast<std::size_t>(j)]);
      const auto lb = static_cast<Eigen::Index>(modes.partner[static_cast<std::size_t>(l)]);
      refl = std::max(refl, std::abs(raw(lb, jb) - raw(j, l)));
    }
  }
  K.reflection_defect = refl;

  // Hermitize, then impose F(-l,-j) = F(j,l). Both averages keep the other
  // symmetry exact in floating point.
  MatC h(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = j; l < n; ++l) {
      const cplx a = 0.5 * (raw(j, l) + std::conj(raw(l, j)));
      h(j, l) = a;
      h(l, j) = std::conj(a);
    }
    h(j, j) = h(j, j).real();
  }
  K.F.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      const auto jb = static_cast<Eigen::Index>(modes.partner[static_cast<std::size_t>(j)]);
      const auto lb = static_cast<Eigen::Index>(modes.partner[static_cast<std::size_t>(l)]);
      K.F(j, l) = 0.5 * (h(j, l) + h(lb, jb));
    }
  }
  return K;
}

Generator quadratic_generator(const KernelF& F, const ModeSet& modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  if (F.F.rows() != n || F.F.cols() != n) throw BasisMismatch("kernel size does not match mode set");
  const Grid& g = *modes.grid;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const std::size_t p = modes.partner[j];
    if (p >= modes.size() || modes.partner[p] != j || g.negate(modes.flat[j]) != modes.flat[p]) {
      throw ConfigError("mode pairing table is not a negation involution");
    }
  }
  Generator G;
  const MatC W = F.measure * F.F;
  G.P = MatC::Identity(n, n) - 2.0 * W;
  G.Q.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      G.Q(j, l) = W(j, static_cast<Eigen::Index>(modes.partner[static_cast<std::size_t>(l)]));
    }
  }
  G.constant = W.diagonal().real().sum();
  return G;
}

Generator blend(const Generator& a, const Generator& b, double s) {
  Generator g;
  g.P = (1.0 - s) * a.P + s * b.P;
  g.Q = (1.0 - s) * a.Q + s * b.Q;
  g.constant = (1.0 - s) * a.constant + s * b.constant;
  return g;
}

BogoliubovState bogoliubov_vacuum(std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(modes);
  BogoliubovState s;
  s.u = MatC::Identity(n, n);
  s.v = MatC::Zero(n, n);
  return s;
}

double symplectic_defect(const BogoliubovState& s) {
  const auto n = s.u.rows();
  return (s.u.adjoint() * s.u - s.v.adjoint() * s.v - MatC::Identity(n, n)).cwiseAbs().maxCoeff();
}

double symmetry_defect(const BogoliubovState& s) {
  const MatC a = s.u.transpose() * s.v;
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

namespace {

void recondition(BogoliubovState& s) {
  const auto n = s.u.rows();
  MatC X(2 * n, n);
  X << s.u, s.v;
  const MatC S = s.u.adjoint() * s.u - s.v.adjoint() * s.v;
  Eigen::SelfAdjointEigenSolver<MatC> es(0.5 * (S + S.adjoint()));
  const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const MatC corr = es.eigenvectors() * inv_sqrt.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  X = X * corr;
  s.u = X.topRows(n);
  s.v = X.bottomRows(n);
  ++s.reconditioned;
}

}  // namespace

void bogoliubov_step(BogoliubovState& s, const Generator& g, double alpha, double dt) {
  const auto n = s.u.rows();
  if (g.P.rows() != n) throw BasisMismatch("generator size does not match state");
  const double tau = dt / (alpha * alpha);
  MatC K(2 * n, 2 * n);
  K << g.P, -2.0 * g.Q, 2.0 * g.Q.conjugate(), -g.P.conjugate();
  const MatC I = MatC::Identity(2 * n, 2 * n);
  const cplx half(0.0, 0.5 * tau);
  MatC X(2 * n, n);
  X << s.u, s.v;
  const cplx det_old = s.u.conjugate().determinant();
  X = (I + half * K).partialPivLu().solve((I - half * K) * X);
  s.u = X.topRows(n);
  s.v = X.bottomRows(n);
  const cplx det_new = s.u.conjugate().determinant();
  s.log_det_arg += std::arg(det_new / det_old);
  s.theta += tau * (0.5 * g.P.trace().real() + g.constant);
  s.t += dt;
  if (symplectic_defect(s) > 1e-10) recondition(s);
  const double drift = std::max(symplectic_defect(s), symmetry_defect(s));
  if (drift > 1e-6) {
    std::ostringstream os;
    os << "Bogoliubov invariants drifted by " << drift << "; reduce dt";
    throw SolverError(os.str(), drift);
  }
}

Moments moments(const BogoliubovState& s, double alpha) {
  Moments m;
  m.occupation = s.v.conjugate() * s.v.transpose();
  m.n_expect = s.v.squaredNorm() / (alpha * alpha);
  const double mod = std::abs(s.u.determinant());
  m.vacuum_overlap = std::polar(1.0 / std::sqrt(mod), s.theta - 0.5 * s.log_det_arg);
  return m;
}

// ---- occupation basis ----

std::size_t FockBasis::dimension(std::size_t modes, int n_max) {
  // C(modes + n_max, n_max)
  double d = 1.0;
  for (int i = 1; i <= n_max; ++i) d = d * static_cast<double>(modes + static_cast<std::size_t>(i)) / i;
  return static_cast<std::size_t>(std::llround(d));
}

FockBasis::FockBasis(std::size_t modes, int n_max) : modes_(modes), n_max_(n_max) {
  if (modes == 0) throw ConfigError("Fock basis needs at least one mode");
  if (n_max < 0) throw ConfigError("n_max must be non-negative");
  std::vector<int> cur(modes, 0);
  for (int total = 0; total <= n_max; ++total) {
    // all tuples with this total, lexicographically descending
    std::vector<std::vector<int>> shell;
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
      if (pos + 1 == modes) {
        cur[pos] = left;
        shell.push_back(cur);
        return;
      }
      for (int k = left; k >= 0; --k) {
        cur[pos] = k;
        rec(pos + 1, left - k);
      }
    };
    rec(0, total);
    for (auto& t : shell) {
      tuples_.push_back(std::move(t));
      total_.push_back(total);
    }
  }
  std::map<std::vector<int>, long> index;
  for (std::size_t i = 0; i < tuples_.size(); ++i) index[tuples_[i]] = static_cast<long>(i);
  up_.assign(tuples_.size() * modes, -1);
  down_.assign(tuples_.size() * modes, -1);
  for (std::size_t i = 0; i < tuples_.size(); ++i) {
    for (std::size_t j = 0; j < modes; ++j) {
      std::vector<int> t = tuples_[i];
      if (total_[i] < n_max) {
        ++t[j];
        up_[i * modes + j] = index.at(t);
        --t[j];
      }
      if (t[j] > 0) {
        --t[j];
        down_[i * modes + j] = index.at(t);
      }
    }
  }
}

namespace {

struct Ladder {
  bool create;
  std::size_t mode;
};

// Applies op2 * op1 to basis state idx; false if it leaves the space or vanishes.
bool apply_pair(const FockBasis& b, std::size_t idx, Ladder op1, Ladder op2, std::size_t& out,
                double& amp) {
  amp = 1.0;
  std::size_t cur = idx;
  for (const Ladder& op : {op1, op2}) {
    const int n = b.occupation(cur)[op.mode];
    const long next = op.create ? b.raise(cur, op.mode) : b.lower(cur, op.mode);
    if (next < 0) return false;
    amp *= std::sqrt(static_cast<double>(op.create ? n + 1 : n));
    cur = static_cast<std::size_t>(next);
  }
  out = cur;
  return true;
}

}  // namespace

SparseC fock_generator(const FockBasis& basis, const KernelF& F, const ModeSet& modes, double alpha) {
  const std::size_t m = modes.size();
  if (basis.modes() != m) throw BasisMismatch("Fock basis and mode set differ in size");
  const double a2 = 1.0 / (alpha * alpha);
  const MatC W = F.measure * F.F;
  const double trw = W.diagonal().real().sum();
  std::vector<Eigen::Triplet<cplx>> trip;
  for (std::size_t f = 0; f < basis.size(); ++f) {
    trip.emplace_back(static_cast<int>(f), static_cast<int>(f), a2 * (basis.total(f) - trw));
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t jb = modes.partner[j];
      for (std::size_t l = 0; l < m; ++l) {
        const std::size_t lb = modes.partner[l];
        const cplx w = -a2 * W(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
        if (w == cplx{}) continue;
        const Ladder terms[4][2] = {
            {{true, lb}, {true, j}},     // B*_j B*_{-l}
            {{false, l}, {true, j}},     // B*_j B_l
            {{false, jb}, {true, lb}},   // B*_{-l} B_{-j}
            {{false, l}, {false, jb}},   // B_{-j} B_l
        };
        for (const auto& t : terms) {
          std::size_t to = 0;
          double amp = 0.0;
          if (apply_pair(basis, f, t[0], t[1], to, amp)) {
            trip.emplace_back(static_cast<int>(to), static_cast<int>(f), w * amp);
          }
        }
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  SparseC G(n, n);
  G.setFromTriplets(trip.begin(), trip.end());
  SparseC adj = G.adjoint();
  SparseC H = 0.5 * (G + adj);
  H.makeCompressed();
  return H;
}

SparseC blend(const SparseC& a, const SparseC& b, double s) {
  SparseC out = (1.0 - s) * a + s * b;
  out.makeCompressed();
  return out;
}

FockVector fock_vacuum(const FockBasis& basis, double alpha) {
  FockVector v;
  v.c.assign(basis.size(), cplx{});
  v.c[0] = 1.0;
  v.alpha = alpha;
  return v;
}

double top_shell_weight(const FockBasis& basis, std::span<const cplx> c) {
  double w = 0.0;
  for (std::size_t f = 0; f < basis.size(); ++f) {
    if (basis.total(f) == basis.n_max()) w += std::norm(c[f]);
  }
  return w;
}

void fock_step(FockVector& vec, const FockBasis& basis, const SparseC& G, double dt, double leak_tol,
               const ExpmOptions& opts) {
  if (vec.c.size() != basis.size() || G.rows() != static_cast<Eigen::Index>(basis.size())) {
    throw BasisMismatch("Fock vector, basis and generator sizes differ");
  }
  const LinearOp op = [&G](std::span<const cplx> in, std::span<cplx> out) {
    Eigen::Map<const Eigen::VectorXcd> x(in.data(), static_cast<Eigen::Index>(in.size()));
    Eigen::Map<Eigen::VectorXcd> y(out.data(), static_cast<Eigen::Index>(out.size()));
    y.noalias() = G * x;
  };
  vec.c = expm_hermitian(op, vec.c, dt, opts).v;
  vec.t += dt;
  const double leak = top_shell_weight(basis, vec.c);
  vec.max_leakage = std::max(vec.max_leakage, leak);
  if (leak_tol > 0.0 && leak > leak_tol) {
    std::ostringstream os;
    os << "top occupation shell holds weight " << leak << " > " << leak_tol << " at t = " << vec.t;
    throw LeakageError(os.str(), leak);
  }
}

FockMoments fock_moments(const FockVector& vec, const FockBasis& basis) {
  FockMoments m;
  double nrm = 0.0, n = 0.0;
  for (std::size_t f = 0; f < basis.size(); ++f) {
    const double p = std::norm(vec.c[f]);
    nrm += p;
    n += p * basis.total(f);
  }
  m.norm = std::sqrt(nrm);
  m.n_expect = n / (vec.alpha * vec.alpha);
  m.vacuum_overlap = vec.c[0];
  return m;
}

DepartureReport remark_lower_bound(const std::vector<DepartureSample>& samples, double alpha,
                                   double c0, double delta) {
  if (samples.empty()) throw ConfigError("no samples for the departure check");
  DepartureReport r;
  r.c0 = c0;
  const double target = delta * alpha * alpha;
  const auto best = std::min_element(samples.begin(), samples.end(), [&](const auto& a, const auto& b) {
    return std::abs(a.t - target) < std::abs(b.t - target);
  });
  r.delta = best->t / (alpha * alpha);
  r.measured = best->distance;
  r.bound = 0.5 * c0 * r.delta;
  r.leading = std::abs(std::polar(1.0, c0 * r.delta) - 1.0);
  r.satisfied = r.measured >= r.bound;
  return r;
}

}  // namespace polaron
