#include "polaron/krylov.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "polaron/kernels.hpp"

namespace polaron {

namespace {

using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;

// Orthogonalize w against basis (two passes of classical Gram-Schmidt).
// Returns the norm of w after orthogonalization (before normalization).
double orthogonalize(const std::vector<CVec>& basis, CVec& w) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      const cplx c = kernels::cdot(b, w);
      kernels::caxpy(w, -c, b);
    }
  }
  return std::sqrt(kernels::norm2(w));
}

CVec combine(const std::vector<CVec>& basis, const Eigen::Ref<const Eigen::VectorXcd>& y,
             std::size_t n) {
  CVec out(n, cplx{});
  for (std::size_t i = 0; i < basis.size(); ++i) kernels::caxpy(out, y(static_cast<Eigen::Index>(i)), basis[i]);
  return out;
}

}  // namespace

EigenResult lowest_eigenpairs(const LinearOp& op, std::size_t n, int nev,
                              std::vector<CVec> start, const LanczosOptions& opts) {
  if (nev < 1 || static_cast<std::size_t>(nev) > n) throw ConfigError("invalid eigenpair count");
  const int m = std::clamp(opts.subspace, nev + 4, static_cast<int>(std::min<std::size_t>(n, 4096)));
  EigenResult res;
  std::vector<CVec> V, HV;
  MatC Hp = MatC::Zero(m, m);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;

  auto push = [&](CVec w) -> bool {
    const double before = std::sqrt(kernels::norm2(w));
    if (before == 0.0) return false;
    const double after = orthogonalize(V, w);
    if (after < 1e-10 * before) return false;
    for (auto& x : w) x /= after;
    CVec hw(n);
    op(w, hw);
    ++res.matvecs;
    const Eigen::Index j = static_cast<Eigen::Index>(V.size());
    V.push_back(std::move(w));
    HV.push_back(std::move(hw));
    for (Eigen::Index i = 0; i <= j; ++i) {
      const cplx c = kernels::cdot(V[static_cast<std::size_t>(i)], HV[static_cast<std::size_t>(j)]);
      Hp(i, j) = c;
      Hp(j, i) = std::conj(c);
    }
    Hp(j, j) = Hp(j, j).real();
    return true;
  };
  auto random_vector = [&]() {
    CVec r(n);
    for (auto& x : r) x = cplx(gauss(rng), 0.0);
    return r;
  };

  for (auto& s : start) {
    if (s.size() == n && static_cast<int>(V.size()) < m - 1) push(std::move(s));
  }
  if (V.empty()) {
    // Positive ground states overlap the constant vector; the random part
    // seeds the excited directions.
    CVec s = random_vector();
    for (auto& x : s) x = 1.0 + 0.1 * x;
    push(std::move(s));
  }

  // Each pass extends the basis with the residual of the lowest unconverged
  // Ritz pair. Inside a Krylov space every Ritz residual points along the next
  // Lanczos vector, so this is thick-restart Lanczos.
  while (true) {
    const bool full = static_cast<int>(V.size()) >= m;
    const bool budget = res.matvecs >= opts.max_matvecs;
    const Eigen::Index k = static_cast<Eigen::Index>(V.size());
    Eigen::SelfAdjointEigenSolver<MatC> es(Hp.topLeftCorner(k, k));
    const int nv = std::min<int>(nev, static_cast<int>(k));
    RVec theta(nv), resid(nv);
    std::vector<CVec> ritz(nv), rvec(nv);
    int first_bad = -1;
    for (int i = 0; i < nv; ++i) {
      theta[i] = es.eigenvalues()(i);
      ritz[i] = combine(V, es.eigenvectors().col(i), n);
      rvec[i] = combine(HV, es.eigenvectors().col(i), n);
      kernels::caxpy(rvec[i], -theta[i], ritz[i]);
      resid[i] = std::sqrt(kernels::norm2(rvec[i]));
      if (resid[i] > opts.tol && first_bad < 0) first_bad = i;
    }
    const bool ok = nv == nev && first_bad < 0;
    if (ok || budget || static_cast<std::size_t>(k) >= n) {
      res.values = theta;
      res.residuals = resid;
      res.vectors = std::move(ritz);
      res.converged = ok || static_cast<std::size_t>(k) >= n;
      return res;
    }
    CVec w = first_bad >= 0 ? std::move(rvec[first_bad]) : random_vector();
    if (full) {
      const int keep = std::max(nev + 2, m / 2);
      std::vector<CVec> nV, nHV;
      for (int i = 0; i < keep; ++i) {
        nV.push_back(combine(V, es.eigenvectors().col(i), n));
        nHV.push_back(combine(HV, es.eigenvectors().col(i), n));
      }
      V = std::move(nV);
      HV = std::move(nHV);
      Hp.setZero();
      for (int i = 0; i < keep; ++i) Hp(i, i) = es.eigenvalues()(i);
    }
    if (!push(std::move(w))) {
      if (!push(random_vector())) {
        throw SolverError("Lanczos could not extend the Krylov basis", 0.0);
      }
    }
  }
}

namespace {

// One Lanczos exponential attempt; returns false when max_dim is not enough.
bool expm_attempt(const LinearOp& op, std::span<const cplx> v, double t, const ExpmOptions& opts,
                  CVec& out, int& matvecs, double& err_out) {
  const std::size_t n = v.size();
  const double beta0 = std::sqrt(kernels::norm2(v));
  out.assign(n, cplx{});
  if (beta0 == 0.0) {
    err_out = 0.0;
    return true;
  }
  std::vector<CVec> V;
  V.emplace_back(v.begin(), v.end());
  for (auto& x : V[0]) x /= beta0;
  RVec alpha, beta;
  const int mmax = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opts.max_dim), n));
  CVec w(n);
  for (int j = 0; j < mmax; ++j) {
    op(V[static_cast<std::size_t>(j)], w);
    ++matvecs;
    const double a = kernels::cdot(V[static_cast<std::size_t>(j)], w).real();
    alpha.push_back(a);
    const double bnext = orthogonalize(V, w);
    const int k = j + 1;
    MatR T = MatR::Zero(k, k);
    for (int i = 0; i < k; ++i) T(i, i) = alpha[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < k; ++i) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<MatR> es(T);
    Eigen::VectorXcd c(k);
    {
      const auto& U = es.eigenvectors();
      Eigen::VectorXcd d(k);
      for (int i = 0; i < k; ++i) d(i) = std::polar(1.0, -t * es.eigenvalues()(i)) * U(0, i);
      c = U.cast<cplx>() * d;
    }
    const double err = beta0 * bnext * std::abs(c(k - 1));
    const bool breakdown = bnext < 1e-13 * (std::abs(a) + (j > 0 ? beta.back() : 0.0) + 1e-300);
    if (err <= opts.tol * beta0 || breakdown || static_cast<std::size_t>(k) == n) {
      for (int i = 0; i < k; ++i) kernels::caxpy(out, beta0 * c(i), V[static_cast<std::size_t>(i)]);
      err_out = breakdown ? 0.0 : err;
      return true;
    }
    beta.push_back(bnext);
    for (auto& x : w) x /= bnext;
    V.push_back(w);
  }
  return false;
}

}  // namespace

ExpmResult expm_hermitian(const LinearOp& op, std::span<const cplx> v, double t,
                          const ExpmOptions& opts) {
  ExpmResult res;
  for (int h = 0; h <= opts.max_halvings; ++h) {
    const int pieces = 1 << h;
    const double dt = t / pieces;
    CVec cur(v.begin(), v.end());
    CVec next;
    bool ok = true;
    double err_total = 0.0;
    int mv = 0;
    for (int p = 0; p < pieces; ++p) {
      double err = 0.0;
      if (!expm_attempt(op, cur, dt, opts, next, mv, err)) {
        ok = false;
        break;
      }
      err_total += err;
      cur.swap(next);
    }
    res.matvecs += mv;
    if (ok) {
      res.v = std::move(cur);
      res.substeps = pieces;
      res.error_estimate = err_total;
      return res;
    }
  }
  throw SolverError("Krylov exponential did not converge; reduce the time step", 0.0);
}

}  // namespace polaron
