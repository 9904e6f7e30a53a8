#pragma once

#include <cstddef>

// Vector arithmetic kernels used by the iterative solvers and the spectral
// evaluators. Each kernel has a scalar reference implementation and an AVX2
// variant; the active one is picked at load time from the CPU, overridable
// with SPECTRAL_DIST_SIMD=scalar|avx2.

namespace spectral::simd {

enum class Isa { scalar, avx2 };

Isa active_isa();
const char* isa_name(Isa isa);

double dot(const double* x, const double* y, std::size_t n);
double nrm2sq(const double* x, std::size_t n);

// y += a*x
void axpy(double a, const double* x, double* y, std::size_t n);
// y = x + a*y
void xpay(const double* x, double a, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
// z = x - y
void vsub(const double* x, const double* y, double* z, std::size_t n);
// z = x * y (elementwise)
void vmul(const double* x, const double* y, double* z, std::size_t n);
// z = x / y (elementwise)
void vdiv(const double* x, const double* y, double* z, std::size_t n);

// CSR sparse matrix-vector product y = A x.
void spmv(const int* row_ptr, const int* col, const double* val, int n,
          const double* x, double* y);

namespace detail {

double dot_scalar(const double* x, const double* y, std::size_t n);
double nrm2sq_scalar(const double* x, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void xpay_scalar(const double* x, double a, double* y, std::size_t n);
void scale_scalar(double a, double* x, std::size_t n);
void vsub_scalar(const double* x, const double* y, double* z, std::size_t n);
void vmul_scalar(const double* x, const double* y, double* z, std::size_t n);
void vdiv_scalar(const double* x, const double* y, double* z, std::size_t n);
void spmv_scalar(const int* row_ptr, const int* col, const double* val, int n,
                 const double* x, double* y);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* x, const double* y, std::size_t n);
double nrm2sq_avx2(const double* x, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void xpay_avx2(const double* x, double a, double* y, std::size_t n);
void scale_avx2(double a, double* x, std::size_t n);
void vsub_avx2(const double* x, const double* y, double* z, std::size_t n);
void vmul_avx2(const double* x, const double* y, double* z, std::size_t n);
void vdiv_avx2(const double* x, const double* y, double* z, std::size_t n);
void spmv_avx2(const int* row_ptr, const int* col, const double* val, int n,
               const double* x, double* y);
#endif

}  // namespace detail

}  // namespace spectral::simd
