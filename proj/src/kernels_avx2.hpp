#pragma once

// Private declarations of the AVX2 kernels. kernels_avx2.cpp is compiled with
// -mavx2 -mfma and must not include any header that instantiates inline
// library code, so the interface is plain pointers.

#include <cstddef>

namespace polaron::kernels::avx2 {

void cmul(double* a, const double* b, std::size_t n);
void caxpy(double* y, double sr, double si, const double* x, std::size_t n);
void cmul_acc(double* out, double sr, double si, const double* phase, const double* in,
              std::size_t n);
void rmul_acc(double* out, const double* r, const double* in, std::size_t n);
void rmul(double* a, const double* r, std::size_t n);
void cdot(const double* a, const double* b, std::size_t n, double* re, double* im);
double norm2(const double* a, std::size_t n);

}  // namespace polaron::kernels::avx2
