#include "spectral/simd/vec_ops.hpp"

#include <cstdlib>
#include <cstring>

namespace spectral::simd {

namespace {

Isa detect() {
    const char* env = std::getenv("SPECTRAL_DIST_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
#if defined(__x86_64__) || defined(_M_X64)
        if (std::strcmp(env, "avx2") == 0 && __builtin_cpu_supports("avx2") &&
            __builtin_cpu_supports("fma"))
            return Isa::avx2;
#endif
        return Isa::scalar;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::avx2;
#endif
    return Isa::scalar;
}

const Isa g_isa = detect();

}  // namespace

Isa active_isa() { return g_isa; }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

#if defined(__x86_64__) || defined(_M_X64)
#define SPECTRAL_DISPATCH(fn, ...) \
    return g_isa == Isa::avx2 ? detail::fn##_avx2(__VA_ARGS__) : detail::fn##_scalar(__VA_ARGS__)
#else
#define SPECTRAL_DISPATCH(fn, ...) return detail::fn##_scalar(__VA_ARGS__)
#endif

double dot(const double* x, const double* y, std::size_t n) { SPECTRAL_DISPATCH(dot, x, y, n); }

double nrm2sq(const double* x, std::size_t n) { SPECTRAL_DISPATCH(nrm2sq, x, n); }

void axpy(double a, const double* x, double* y, std::size_t n) {
    SPECTRAL_DISPATCH(axpy, a, x, y, n);
}

void xpay(const double* x, double a, double* y, std::size_t n) {
    SPECTRAL_DISPATCH(xpay, x, a, y, n);
}

void scale(double a, double* x, std::size_t n) { SPECTRAL_DISPATCH(scale, a, x, n); }

void vsub(const double* x, const double* y, double* z, std::size_t n) {
    SPECTRAL_DISPATCH(vsub, x, y, z, n);
}

void vmul(const double* x, const double* y, double* z, std::size_t n) {
    SPECTRAL_DISPATCH(vmul, x, y, z, n);
}

void vdiv(const double* x, const double* y, double* z, std::size_t n) {
    SPECTRAL_DISPATCH(vdiv, x, y, z, n);
}

void spmv(const int* row_ptr, const int* col, const double* val, int n, const double* x,
          double* y) {
    SPECTRAL_DISPATCH(spmv, row_ptr, col, val, n, x, y);
}

#undef SPECTRAL_DISPATCH

}  // namespace spectral::simd
