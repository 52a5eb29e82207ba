#include "kernels_avx2.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace polaron::kernels::avx2 {
namespace {

// (a0, a1) * (b0, b1) for two packed complex numbers.
inline __m256d mul2(__m256d a, __m256d b) {
  const __m256d br = _mm256_movedup_pd(b);
  const __m256d bi = _mm256_permute_pd(b, 0xF);
  const __m256d as = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(as, bi));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void cmul(double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);
    const __m256d vb = _mm256_loadu_pd(b + 2 * i);
    _mm256_storeu_pd(a + 2 * i, mul2(va, vb));
  }
  for (; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    a[2 * i] = ar * br - ai * bi;
    a[2 * i + 1] = ar * bi + ai * br;
  }
}

void caxpy(double* y, double sr, double si, const double* x, std::size_t n) {
  const __m256d vsr = _mm256_set1_pd(sr);
  const __m256d vsi = _mm256_set1_pd(si);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(x + 2 * i);
    const __m256d xs = _mm256_permute_pd(vx, 0x5);
    const __m256d t = _mm256_fmaddsub_pd(vx, vsr, _mm256_mul_pd(xs, vsi));
    _mm256_storeu_pd(y + 2 * i, _mm256_add_pd(_mm256_loadu_pd(y + 2 * i), t));
  }
  for (; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    y[2 * i] += sr * xr - si * xi;
    y[2 * i + 1] += sr * xi + si * xr;
  }
}

void cmul_acc(double* out, double sr, double si, const double* phase, const double* in,
              std::size_t n) {
  const __m256d vsr = _mm256_set1_pd(sr);
  const __m256d vsi = _mm256_set1_pd(si);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d t = mul2(_mm256_loadu_pd(phase + 2 * i), _mm256_loadu_pd(in + 2 * i));
    const __m256d ts = _mm256_permute_pd(t, 0x5);
    const __m256d st = _mm256_fmaddsub_pd(t, vsr, _mm256_mul_pd(ts, vsi));
    _mm256_storeu_pd(out + 2 * i, _mm256_add_pd(_mm256_loadu_pd(out + 2 * i), st));
  }
  for (; i < n; ++i) {
    const double pr = phase[2 * i], pi = phase[2 * i + 1];
    const double xr = in[2 * i], xi = in[2 * i + 1];
    const double tr = pr * xr - pi * xi;
    const double ti = pr * xi + pi * xr;
    out[2 * i] += sr * tr - si * ti;
    out[2 * i + 1] += sr * ti + si * tr;
  }
}

void rmul_acc(double* out, const double* r, const double* in, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d rr =
        _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(r + i)), 0x50);
    const __m256d o = _mm256_loadu_pd(out + 2 * i);
    _mm256_storeu_pd(out + 2 * i, _mm256_fmadd_pd(rr, _mm256_loadu_pd(in + 2 * i), o));
  }
  for (; i < n; ++i) {
    out[2 * i] += r[i] * in[2 * i];
    out[2 * i + 1] += r[i] * in[2 * i + 1];
  }
}

void rmul(double* a, const double* r, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d rr =
        _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(r + i)), 0x50);
    _mm256_storeu_pd(a + 2 * i, _mm256_mul_pd(rr, _mm256_loadu_pd(a + 2 * i)));
  }
  for (; i < n; ++i) {
    a[2 * i] *= r[i];
    a[2 * i + 1] *= r[i];
  }
}

void cdot(const double* a, const double* b, std::size_t n, double* re, double* im) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * i);
    const __m256d vb = _mm256_loadu_pd(b + 2 * i);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    acc_im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), acc_im);
  }
  // acc_im lanes hold (ar*bi, ai*br); the imaginary part is their difference.
  const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
  double sr = hsum(acc_re);
  double si = hsum(_mm256_mul_pd(acc_im, sign));
  for (; i < n; ++i) {
    const double ar = a[2 * i], ai = a[2 * i + 1];
    const double br = b[2 * i], bi = b[2 * i + 1];
    sr += ar * br + ai * bi;
    si += ar * bi - ai * br;
  }
  *re = sr;
  *im = si;
}

double norm2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t m = 2 * n;
  for (; i + 4 <= m; i += 4) {
    const __m256d v = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < m; ++i) s += a[i] * a[i];
  return s;
}

}  // namespace polaron::kernels::avx2

#endif
