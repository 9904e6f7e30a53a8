#include "spectral/simd/vec_ops.hpp"

namespace spectral::simd::detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double nrm2sq_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpay_scalar(const double* x, double a, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void vsub_scalar(const double* x, const double* y, double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] - y[i];
}

void vmul_scalar(const double* x, const double* y, double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

void vdiv_scalar(const double* x, const double* y, double* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] / y[i];
}

void spmv_scalar(const int* row_ptr, const int* col, const double* val, int n,
                 const double* x, double* y) {
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
        y[i] = s;
    }
}

}  // namespace spectral::simd::detail
