#include "polaron/kernels.hpp"

// Reference kernels. Complex arithmetic is spelled out on the real/imag
// parts so that no libgcc NaN-recovery path is taken.

namespace polaron::kernels {
namespace {

void cmul_scalar(double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    a[2 * i] = ar * br - ai * bi;
    a[2 * i + 1] = ar * bi + ai * br;
  }
}

void caxpy_scalar(double* y, double sr, double si, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    y[2 * i] += sr * xr - si * xi;
    y[2 * i + 1] += sr * xi + si * xr;
  }
}

void cmul_acc_scalar(double* out, double sr, double si, const double* phase,
                     const double* in, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double pr = phase[2 * i], pi = phase[2 * i + 1];
    const double xr = in[2 * i], xi = in[2 * i + 1];
    const double tr = pr * xr - pi * xi;
    const double ti = pr * xi + pi * xr;
    out[2 * i] += sr * tr - si * ti;
    out[2 * i + 1] += sr * ti + si * tr;
  }
}

void rmul_acc_scalar(double* out, const double* r, const double* in, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] += r[i] * in[2 * i];
    out[2 * i + 1] += r[i] * in[2 * i + 1];
  }
}

void rmul_scalar(double* a, const double* r, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    a[2 * i] *= r[i];
    a[2 * i + 1] *= r[i];
  }
}

void cdot_scalar(const double* a, const double* b, std::size_t n, double* re, double* im) {
  double sr = 0.0, si = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    sr += ar * br + ai * bi;
    si += ar * bi - ai * br;
  }
  *re = sr;
  *im = si;
}

double norm2_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) s += a[i] * a[i];
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{cmul_scalar,    caxpy_scalar, cmul_acc_scalar, rmul_acc_scalar,
                             rmul_scalar,    cdot_scalar,  norm2_scalar};
  return t;
}

}  // namespace polaron::kernels
