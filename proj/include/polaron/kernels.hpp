#pragma once

// Data-parallel inner loops on interleaved complex<double> arrays.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is chosen once at startup from CPUID and can
// be overridden with set_backend(). Elementwise kernels agree with the
// scalar reference to a few ulp; reductions differ only by summation order.

#include <cstddef>
#include <span>
#include <string_view>

#include "polaron/types.hpp"

namespace polaron::kernels {

enum class Backend { scalar, avx2 };

struct KernelTable {
  // a[i] *= b[i]
  void (*cmul)(double* a, const double* b, std::size_t n);
  // y[i] += s * x[i]
  void (*caxpy)(double* y, double s_re, double s_im, const double* x, std::size_t n);
  // out[i] += s * phase[i] * in[i]
  void (*cmul_acc)(double* out, double s_re, double s_im, const double* phase,
                   const double* in, std::size_t n);
  // out[i] += r[i] * in[i], r real
  void (*rmul_acc)(double* out, const double* r, const double* in, std::size_t n);
  // a[i] *= r[i], r real
  void (*rmul)(double* a, const double* r, std::size_t n);
  // sum conj(a[i]) * b[i]
  void (*cdot)(const double* a, const double* b, std::size_t n, double* re, double* im);
  // sum |a[i]|^2
  double (*norm2)(const double* a, std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the binary was built without AVX2 support.
const KernelTable* avx2_table();

bool available(Backend b);
Backend active_backend();
/// Throws ConfigError if the backend is unavailable on this CPU.
void set_backend(Backend b);
Backend parse_backend(std::string_view name);
std::string_view backend_name(Backend b);
const KernelTable& table();

// Typed wrappers over the active table.

inline void cmul(std::span<cplx> a, std::span<const cplx> b) {
  table().cmul(reinterpret_cast<double*>(a.data()),
               reinterpret_cast<const double*>(b.data()), a.size());
}
inline void caxpy(std::span<cplx> y, cplx s, std::span<const cplx> x) {
  table().caxpy(reinterpret_cast<double*>(y.data()), s.real(), s.imag(),
                reinterpret_cast<const double*>(x.data()), y.size());
}
inline void cmul_acc(std::span<cplx> out, cplx s, std::span<const cplx> phase,
                     std::span<const cplx> in) {
  table().cmul_acc(reinterpret_cast<double*>(out.data()), s.real(), s.imag(),
                   reinterpret_cast<const double*>(phase.data()),
                   reinterpret_cast<const double*>(in.data()), out.size());
}
inline void rmul_acc(std::span<cplx> out, std::span<const double> r, std::span<const cplx> in) {
  table().rmul_acc(reinterpret_cast<double*>(out.data()), r.data(),
                   reinterpret_cast<const double*>(in.data()), out.size());
}
inline void rmul(std::span<cplx> a, std::span<const double> r) {
  table().rmul(reinterpret_cast<double*>(a.data()), r.data(), a.size());
}
inline cplx cdot(std::span<const cplx> a, std::span<const cplx> b) {
  double re = 0.0, im = 0.0;
  table().cdot(reinterpret_cast<const double*>(a.data()),
               reinterpret_cast<const double*>(b.data()), a.size(), &re, &im);
  return {re, im};
}
inline double norm2(std::span<const cplx> a) {
  return table().norm2(reinterpret_cast<const double*>(a.data()), a.size());
}

}  // namespace polaron::kernels
