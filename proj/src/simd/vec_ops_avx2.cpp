// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the runtime CPU check in vec_ops.cpp.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "spectral/simd/vec_ops.hpp"

namespace spectral::simd::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double nrm2sq_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void xpay_avx2(const double* x, double a, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_fmadd_pd(va, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, v);
    }
    for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void vsub_avx2(const double* x, const double* y, double* z, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(z + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) z[i] = x[i] - y[i];
}

void vmul_avx2(const double* x, const double* y, double* z, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) z[i] = x[i] * y[i];
}

void vdiv_avx2(const double* x, const double* y, double* z, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(z + i, _mm256_div_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) z[i] = x[i] / y[i];
}

void spmv_avx2(const int* row_ptr, const int* col, const double* val, int n,
               const double* x, double* y) {
    for (int i = 0; i < n; ++i) {
        int k = row_ptr[i];
        const int end = row_ptr[i + 1];
        __m256d acc = _mm256_setzero_pd();
        for (; k + 4 <= end; k += 4) {
            __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + k));
            __m256d xv = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), xv, acc);
        }
        double s = hsum(acc);
        for (; k < end; ++k) s += val[k] * x[col[k]];
        y[i] = s;
    }
}

}  // namespace spectral::simd::detail

#endif  // x86_64
