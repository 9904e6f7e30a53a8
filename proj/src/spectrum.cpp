#include "spectral/spectrum.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spectral/error.hpp"
#include "spectral/simd/vec_ops.hpp"
#include "spectral/solvers.hpp"

namespace spectral {

namespace {

void fix_sign(double* x, int n) {
    int arg = 0;
    double best = std::abs(x[0]);
    for (int i = 1; i < n; ++i) {
        if (std::abs(x[i]) > best * (1.0 + 1e-12)) {
            best = std::abs(x[i]);
            arg = i;
        }
    }
    if (x[arg] < 0.0) simd::scale(-1.0, x, static_cast<std::size_t>(n));
}

std::vector<double> to_dense(const SparseSymMatrix& A) {
    const int n = A.dim();
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    const auto& rp = A.row_ptr();
    const auto& ci = A.col_idx();
    const auto& v = A.values();
    for (int i = 0; i < n; ++i)
        for (int k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k)
            d[static_cast<std::size_t>(ci[static_cast<std::size_t>(k)]) * n + i] =
                v[static_cast<std::size_t>(k)];
    return d;
}

Spectrum dense_eigendecompose(const LaplacianPair& pair, int k) {
    const int n = pair.stiffness.dim();
    std::vector<double> evals(static_cast<std::size_t>(n));
    std::vector<double> A = to_dense(pair.stiffness);
    Spectrum spec;
    spec.total_n = n;
    spec.k = k;
    if (pair.mass_is_diagonal) {
        const auto& d = pair.mass.diag();
        std::vector<double> dinv_sqrt(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) dinv_sqrt[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(d[static_cast<std::size_t>(i)]);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                A[static_cast<std::size_t>(j) * n + i] *=
                    dinv_sqrt[static_cast<std::size_t>(i)] * dinv_sqrt[static_cast<std::size_t>(j)];
        const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, A.data(), n, evals.data());
        if (info != 0) throw NumericError("dense eigensolver failed (dsyevd info != 0)");
        spec.eigenvalues.assign(evals.begin(), evals.begin() + k);
        spec.eigenvectors.resize(static_cast<std::size_t>(n) * k);
        for (int j = 0; j < k; ++j) {
            double* dst = spec.eigenvectors.data() + static_cast<std::size_t>(j) * n;
            const double* src = A.data() + static_cast<std::size_t>(j) * n;
            for (int i = 0; i < n; ++i) dst[i] = src[i] * dinv_sqrt[static_cast<std::size_t>(i)];
            fix_sign(dst, n);
        }
    } else {
        std::vector<double> B = to_dense(pair.mass);
        const int info = LAPACKE_dsygvd(LAPACK_COL_MAJOR, 1, 'V', 'L', n, A.data(), n, B.data(),
                                        n, evals.data());
        if (info != 0) throw NumericError("dense eigensolver failed (dsygvd info != 0)");
        spec.eigenvalues.assign(evals.begin(), evals.begin() + k);
        spec.eigenvectors.assign(A.begin(), A.begin() + static_cast<std::size_t>(n) * k);
        for (int j = 0; j < k; ++j)
            fix_sign(spec.eigenvectors.data() + static_cast<std::size_t>(j) * n, n);
    }
    return spec;
}

// Shift-invert Lanczos with B inner product and full reorthogonalization.
Spectrum lanczos_eigendecompose(const LaplacianPair& pair, int k) {
    const SparseSymMatrix& L = pair.stiffness;
    const SparseSymMatrix& B = pair.mass;
    const int n = L.dim();
    const std::size_t un = static_cast<std::size_t>(n);

    // shift keeps L + sigma B SPD while leaving small eigenvalues resolved
    double trace_ratio = 0.0;
    for (int i = 0; i < n; ++i)
        trace_ratio += L.diag()[static_cast<std::size_t>(i)] / B.diag()[static_cast<std::size_t>(i)];
    const double sigma = 1e-8 * trace_ratio / n + 1e-12;

    std::vector<SparseSymMatrix::Triplet> trips;
    // L + sigma B assembled via triplets from both matrices
    for (int i = 0; i < n; ++i) {
        for (int kk = L.row_ptr()[static_cast<std::size_t>(i)];
             kk < L.row_ptr()[static_cast<std::size_t>(i) + 1]; ++kk)
            if (L.col_idx()[static_cast<std::size_t>(kk)] >= i)
                trips.push_back({i, L.col_idx()[static_cast<std::size_t>(kk)],
                                 L.values()[static_cast<std::size_t>(kk)]});
        for (int kk = B.row_ptr()[static_cast<std::size_t>(i)];
             kk < B.row_ptr()[static_cast<std::size_t>(i) + 1]; ++kk)
            if (B.col_idx()[static_cast<std::size_t>(kk)] >= i)
                trips.push_back({i, B.col_idx()[static_cast<std::size_t>(kk)],
                                 sigma * B.values()[static_cast<std::size_t>(kk)]});
    }
    const SparseSymMatrix shifted = SparseSymMatrix::from_triplets(n, std::move(trips));
    const Factorization fac(shifted, "L+sigmaB");

    auto b_dot = [&](const ScalarField& x, const ScalarField& y) {
        ScalarField by = B.multiply(y);
        return simd::dot(x.data(), by.data(), un);
    };

    const int max_steps = std::min(n, std::max(4 * k + 60, 120));
    std::vector<ScalarField> basis;
    std::vector<double> alpha, beta;
    ScalarField v(un);
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = 0.5 + ((i * 2654435761u) % 1024) / 1024.0;
    simd::scale(1.0 / std::sqrt(b_dot(v, v)), v.data(), un);
    basis.push_back(v);

    Spectrum spec;
    spec.total_n = n;
    spec.k = k;
    for (int j = 0; j < max_steps; ++j) {
        ScalarField w = fac.solve(B.multiply(basis.back()));
        alpha.push_back(b_dot(w, basis.back()));
        for (const auto& q : basis) simd::axpy(-b_dot(w, q), q.data(), w.data(), un);
        for (const auto& q : basis) simd::axpy(-b_dot(w, q), q.data(), w.data(), un);
        const double bn = std::sqrt(std::max(0.0, b_dot(w, w)));
        const int m = static_cast<int>(alpha.size());
        const bool exhausted = bn <= 1e-14;
        if (m >= k + 2 || exhausted || j + 1 == max_steps) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                T(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < m) {
                    T(i, i + 1) = beta[static_cast<std::size_t>(i)];
                    T(i + 1, i) = beta[static_cast<std::size_t>(i)];
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            // largest theta first <-> smallest lambda
            std::vector<int> order(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
            std::sort(order.begin(), order.end(), [&](int x, int y) {
                return es.eigenvalues()(x) > es.eigenvalues()(y);
            });
            bool ok = m >= k;
            double max_rel_res = 0.0;
            if (ok) {
                for (int i = 0; i < k; ++i) {
                    // Lanczos residual estimate: |beta_m * y(last)|
                    const double tail =
                        exhausted || m == n
                            ? 0.0
                            : std::abs(bn * es.eigenvectors()(m - 1, order[static_cast<std::size_t>(i)]));
                    const double theta = es.eigenvalues()(order[static_cast<std::size_t>(i)]);
                    max_rel_res = std::max(max_rel_res, tail / std::max(std::abs(theta), 1e-300));
                }
                ok = max_rel_res <= 1e-10;
            }
            if (ok || exhausted || j + 1 == max_steps) {
                if (!ok && !exhausted)
                    throw NumericError("eigendecompose: Lanczos did not converge");
                spec.eigenvalues.resize(static_cast<std::size_t>(k));
                spec.eigenvectors.assign(static_cast<std::size_t>(n) * k, 0.0);
                for (int i = 0; i < k; ++i) {
                    const int oi = order[static_cast<std::size_t>(i)];
                    const double theta = es.eigenvalues()(oi);
                    spec.eigenvalues[static_cast<std::size_t>(i)] = 1.0 / theta - sigma;
                    double* dst = spec.eigenvectors.data() + static_cast<std::size_t>(i) * n;
                    for (int q = 0; q < m; ++q)
                        simd::axpy(es.eigenvectors()(q, oi), basis[static_cast<std::size_t>(q)].data(),
                                   dst, un);
                    ScalarField xv(dst, dst + n);
                    const double nb = std::sqrt(b_dot(xv, xv));
                    simd::scale(1.0 / nb, dst, un);
                    fix_sign(dst, n);
                }
                // enforce ascending order (thetas descending give lambdas ascending already)
                return spec;
            }
        }
        if (exhausted) break;
        beta.push_back(bn);
        simd::scale(1.0 / bn, w.data(), un);
        basis.push_back(std::move(w));
    }
    throw NumericError("eigendecompose: Lanczos did not converge");
}

}  // namespace

Spectrum eigendecompose(const LaplacianPair& pair, int k, int dense_threshold) {
    const int n = pair.stiffness.dim();
    if (k < 1 || k > n) throw InputError("eigendecompose: k out of range");
    if (n <= dense_threshold || k > n / 2) return dense_eigendecompose(pair, k);
    return lanczos_eigendecompose(pair, k);
}

std::vector<double> spectral_coefficients(const Spectrum& spec, const LaplacianPair& pair,
                                          const ScalarField& f, int n_modes) {
    const ScalarField bf = pair.mass.multiply(f);
    std::vector<double> coef(static_cast<std::size_t>(n_modes));
    for (int l = 0; l < n_modes; ++l)
        coef[static_cast<std::size_t>(l)] = simd::dot(spec.vector(l), bf.data(), bf.size());
    return coef;
}

namespace {

// rho applied across the spectrum with the pseudo-inverse drop rule.
std::vector<double> filtered_inverse(const Spectrum& spec, const Filter& filter) {
    std::vector<double> rho(static_cast<std::size_t>(spec.k));
    double sup = 0.0;
    for (int l = 0; l < spec.k; ++l) {
        const double lam = std::max(spec.eigenvalues[static_cast<std::size_t>(l)], 0.0);
        rho[static_cast<std::size_t>(l)] = filter.evaluate(lam);
        sup = std::max(sup, std::abs(rho[static_cast<std::size_t>(l)]));
    }
    std::vector<double> inv(static_cast<std::size_t>(spec.k), 0.0);
    // pseudo-inverse convention: drop only genuinely vanishing rho values;
    // the absolute floor keeps well-scaled modes of filters whose sup grows
    // exponentially (diffusion) from being discarded
    const double threshold = std::min(1e-14 * sup, 1e-12);
    for (int l = 0; l < spec.k; ++l)
        if (std::abs(rho[static_cast<std::size_t>(l)]) > threshold)
            inv[static_cast<std::size_t>(l)] = 1.0 / rho[static_cast<std::size_t>(l)];
    return inv;
}

}  // namespace

double truncated_distance(const Spectrum& spec, const LaplacianPair& pair, const Filter& filter,
                          int i, int j) {
    const int n = spec.total_n;
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw ValidationError("truncated_distance: vertex index out of range");
    const std::vector<double> inv = filtered_inverse(spec, filter);
    // <x_l, e_i - e_j>_B = (B x_l)_i - (B x_l)_j
    double acc = 0.0;
    for (int l = 0; l < spec.k; ++l) {
        if (inv[static_cast<std::size_t>(l)] == 0.0) continue;
        ScalarField bx(static_cast<std::size_t>(n));
        pair.mass.multiply(spec.vector(l), bx.data());
        const double c = (bx[static_cast<std::size_t>(i)] - bx[static_cast<std::size_t>(j)]) *
                         inv[static_cast<std::size_t>(l)];
        acc += c * c;
    }
    return std::sqrt(acc);
}

ScalarField truncated_kernel_column(const Spectrum& spec, const LaplacianPair& pair,
                                    const Filter& filter, int i) {
    const int n = spec.total_n;
    if (i < 0 || i >= n) throw ValidationError("truncated_kernel_column: index out of range");
    const std::vector<double> inv = filtered_inverse(spec, filter);
    ScalarField out(static_cast<std::size_t>(n), 0.0);
    ScalarField bx(static_cast<std::size_t>(n));
    for (int l = 0; l < spec.k; ++l) {
        if (inv[static_cast<std::size_t>(l)] == 0.0) continue;
        pair.mass.multiply(spec.vector(l), bx.data());
        simd::axpy(inv[static_cast<std::size_t>(l)] * bx[static_cast<std::size_t>(i)],
                   spec.vector(l), out.data(), out.size());
    }
    return out;
}

ResidualBoundReport residual_bound_check(const Spectrum& spec, const LaplacianPair& pair,
                                         const ScalarField& f, int n_modes) {
    if (n_modes >= spec.k)
        throw InputError("residual_bound_check: n_modes must be < spec.k");
    const double lam_next = spec.eigenvalues[static_cast<std::size_t>(n_modes)];
    if (!(lam_next > 0.0))
        throw InputError("residual_bound_check: lambda_{n+1} must be positive");
    const std::vector<double> coef = spectral_coefficients(spec, pair, f, n_modes);
    ScalarField r = f;
    for (int l = 0; l < n_modes; ++l)
        simd::axpy(-coef[static_cast<std::size_t>(l)], spec.vector(l), r.data(), r.size());
    ResidualBoundReport rep;
    rep.residual_norm_sq = pair.mass.quadratic_form(r);
    rep.bound = pair.stiffness.quadratic_form(f) / lam_next;
    rep.holds = rep.residual_norm_sq <= rep.bound + 1e-9;
    return rep;
}

void save_spectrum(const Spectrum& spec, const std::string& path_prefix) {
    {
        std::ofstream out(path_prefix + "_eigenvalues.csv");
        if (!out) throw InputError("cannot write " + path_prefix + "_eigenvalues.csv");
        char buf[64];
        for (int l = 0; l < spec.k; ++l) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g\n", l,
                          spec.eigenvalues[static_cast<std::size_t>(l)]);
            out << buf;
        }
    }
    std::ofstream out(path_prefix + "_eigenvectors.txt");
    if (!out) throw InputError("cannot write " + path_prefix + "_eigenvectors.txt");
    out << spec.total_n << " " << spec.k << "\n";
    char buf[40];
    for (int i = 0; i < spec.total_n; ++i) {
        for (int l = 0; l < spec.k; ++l) {
            std::snprintf(buf, sizeof(buf), "%.17g%c",
                          spec.eigenvectors[static_cast<std::size_t>(l) * spec.total_n + i],
                          l + 1 == spec.k ? '\n' : ' ');
            out << buf;
        }
    }
}

Spectrum load_spectrum(const std::string& path_prefix) {
    Spectrum spec;
    {
        std::ifstream in(path_prefix + "_eigenvalues.csv");
        if (!in) throw InputError("cannot open " + path_prefix + "_eigenvalues.csv");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw ParseError("malformed eigenvalue CSV row");
            spec.eigenvalues.push_back(std::stod(line.substr(comma + 1)));
        }
    }
    spec.k = static_cast<int>(spec.eigenvalues.size());
    std::ifstream in(path_prefix + "_eigenvectors.txt");
    if (!in) throw InputError("cannot open " + path_prefix + "_eigenvectors.txt");
    int n = 0, k = 0;
    if (!(in >> n >> k) || k != spec.k) throw ParseError("eigenvector matrix header mismatch");
    spec.total_n = n;
    spec.eigenvectors.resize(static_cast<std::size_t>(n) * k);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < k; ++l)
            if (!(in >> spec.eigenvectors[static_cast<std::size_t>(l) * n + i]))
                throw ParseError("truncated eigenvector matrix");
    return spec;
}

}  // namespace spectral
