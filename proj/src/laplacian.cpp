#include "spectral/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spectral/error.hpp"
#include "spectral/simd/vec_ops.hpp"
#include "spectral/solvers.hpp"

namespace spectral {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double cross_norm(const Vec3& a, const Vec3& b) {
    const Vec3 c = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0]};
    return std::sqrt(dot3(c, c));
}

}  // namespace

SparseSymMatrix stiffness_matrix(const TriangleMesh& mesh) {
    std::vector<SparseSymMatrix::Triplet> trips;
    trips.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 12);
    for (const auto& tri : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            const int i = tri[k];
            const int j = tri[(k + 1) % 3];
            const int o = tri[(k + 2) % 3];
            // half-cotangent of the angle at o, opposite to edge (i,j)
            const Vec3 u = sub(mesh.vertices[i], mesh.vertices[o]);
            const Vec3 v = sub(mesh.vertices[j], mesh.vertices[o]);
            const double w = 0.5 * dot3(u, v) / cross_norm(u, v);
            trips.push_back({i, j, -w});
            trips.push_back({i, i, w});
            trips.push_back({j, j, w});
        }
    }
    return SparseSymMatrix::from_triplets(mesh.num_vertices(), std::move(trips));
}

SparseSymMatrix mass_matrix(const TriangleMesh& mesh, MassScheme scheme) {
    const int n = mesh.num_vertices();
    if (scheme == MassScheme::barycentric_lumped) {
        std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const double third = triangle_area(mesh, t) / 3.0;
            for (int k = 0; k < 3; ++k)
                diag[static_cast<std::size_t>(mesh.triangles[t][k])] += third;
        }
        return SparseSymMatrix::diagonal(std::move(diag));
    }
    // linear FEM: diag A/6, off-diag A/12 per incident triangle
    std::vector<SparseSymMatrix::Triplet> trips;
    trips.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 6);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double area = triangle_area(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            trips.push_back({tri[k], tri[k], area / 6.0});
            trips.push_back({tri[k], tri[(k + 1) % 3], area / 12.0});
        }
    }
    return SparseSymMatrix::from_triplets(n, std::move(trips));
}

LaplacianPair build_laplacian(const TriangleMesh& mesh, MassScheme scheme) {
    LaplacianPair pair;
    pair.stiffness = stiffness_matrix(mesh);
    pair.mass = mass_matrix(mesh, scheme);
    pair.mass_is_diagonal = scheme == MassScheme::barycentric_lumped;
    return pair;
}

double lambda_max_bound(const LaplacianPair& pair) {
    if (!pair.mass_is_diagonal)
        throw NumericError(
            "lambda_max_bound requires a diagonal mass matrix; use lambda_max_estimate");
    const SparseSymMatrix& L = pair.stiffness;
    const std::vector<double>& bdiag = pair.mass.diag();
    const int n = L.dim();
    std::vector<double> row_abs(static_cast<std::size_t>(n), 0.0);
    std::vector<double> col_abs(static_cast<std::size_t>(n), 0.0);
    const auto& rp = L.row_ptr();
    const auto& ci = L.col_idx();
    const auto& v = L.values();
    for (int i = 0; i < n; ++i) {
        const double bi_inv = 1.0 / bdiag[static_cast<std::size_t>(i)];
        for (int k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1];
             ++k) {
            const double lt = std::abs(v[static_cast<std::size_t>(k)]) * bi_inv;
            row_abs[static_cast<std::size_t>(i)] += lt;
            col_abs[static_cast<std::size_t>(ci[static_cast<std::size_t>(k)])] += lt;
        }
    }
    const double rmax = *std::max_element(row_abs.begin(), row_abs.end());
    const double cmax = *std::max_element(col_abs.begin(), col_abs.end());
    return std::min(rmax, cmax);
}

namespace {

// Largest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
double tridiag_max_eigenvalue(const std::vector<double>& alpha, const std::vector<double>& beta) {
    const int m = static_cast<int>(alpha.size());
    double lo = alpha[0], hi = alpha[0];
    for (int i = 0; i < m; ++i) {
        const double off = (i > 0 ? std::abs(beta[static_cast<std::size_t>(i) - 1]) : 0.0) +
                           (i + 1 < m ? std::abs(beta[static_cast<std::size_t>(i)]) : 0.0);
        lo = std::min(lo, alpha[static_cast<std::size_t>(i)] - off);
        hi = std::max(hi, alpha[static_cast<std::size_t>(i)] + off);
    }
    auto count_below = [&](double x) {
        int count = 0;
        double d = 1.0;
        for (int i = 0; i < m; ++i) {
            const double b2 =
                i > 0 ? beta[static_cast<std::size_t>(i) - 1] * beta[static_cast<std::size_t>(i) - 1]
                      : 0.0;
            d = alpha[static_cast<std::size_t>(i)] - x - (i > 0 ? b2 / d : 0.0);
            if (d == 0.0) d = -1e-300;
            if (d < 0.0) ++count;
        }
        return count;
    };
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(mid) >= m)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

LambdaMaxEstimate lambda_max_estimate(const LaplacianPair& pair, double tol) {
    const SparseSymMatrix& L = pair.stiffness;
    const SparseSymMatrix& B = pair.mass;
    const int n = L.dim();
    const std::size_t un = static_cast<std::size_t>(n);
    LambdaMaxEstimate est;

    SolveOptions bopts;
    bopts.tol = std::min(1e-12, tol * 1e-2);
    auto apply_op = [&](const ScalarField& x) {
        ScalarField lx = L.multiply(x);
        if (pair.mass_is_diagonal) {
            ScalarField y(un);
            simd::vdiv(lx.data(), B.diag().data(), y.data(), un);
            return y;
        }
        return solve_spd(B, lx, bopts);
    };
    auto b_dot = [&](const ScalarField& x, const ScalarField& y) {
        ScalarField by = B.multiply(y);
        return simd::dot(x.data(), by.data(), un);
    };

    // Lanczos on B^{-1}L in the B inner product, full reorthogonalization.
    const int max_steps = std::min(n, 500);
    std::vector<ScalarField> basis;
    std::vector<double> alpha, beta;
    ScalarField v(un);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = 1.0 + 0.5 * ((i * 2654435761u) % 97);
    double vn = std::sqrt(b_dot(v, v));
    simd::scale(1.0 / vn, v.data(), un);
    basis.push_back(v);

    double prev = 0.0;
    for (int j = 0; j < max_steps; ++j) {
        ScalarField w = apply_op(basis.back());
        const double a = b_dot(w, basis.back());
        alpha.push_back(a);
        // remove components along all previous Lanczos vectors
        for (const auto& q : basis) simd::axpy(-b_dot(w, q), q.data(), w.data(), un);
        for (const auto& q : basis) simd::axpy(-b_dot(w, q), q.data(), w.data(), un);
        const double theta = tridiag_max_eigenvalue(alpha, beta);
        est.iterations = j + 1;
        if (j > 2 && std::abs(theta - prev) <= tol * std::abs(theta)) {
            est.raw = theta;
            est.converged = true;
            break;
        }
        prev = theta;
        const double bnorm = std::sqrt(std::max(0.0, b_dot(w, w)));
        if (bnorm <= 1e-14 * std::abs(a)) {  // invariant subspace exhausted
            est.raw = theta;
            est.converged = true;
            break;
        }
        beta.push_back(bnorm);
        simd::scale(1.0 / bnorm, w.data(), un);
        basis.push_back(std::move(w));
    }
    if (!est.converged) {
        if (pair.mass_is_diagonal) {
            est.value = lambda_max_bound(pair);
            est.raw = prev;
            return est;
        }
        throw SolveError("lambda_max_estimate: Lanczos did not converge");
    }
    est.value = est.raw * (1.0 + 10.0 * tol);
    return est;
}

}  // namespace spectral
