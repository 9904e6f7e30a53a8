#include "spectral/solvers.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <vector>

#include "spectral/error.hpp"
#include "spectral/simd/vec_ops.hpp"

namespace spectral {

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseSymMatrix& A) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(A.nnz());
    const auto& rp = A.row_ptr();
    const auto& ci = A.col_idx();
    const auto& v = A.values();
    for (int i = 0; i < A.dim(); ++i)
        for (int k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k)
            trips.emplace_back(i, ci[static_cast<std::size_t>(k)], v[static_cast<std::size_t>(k)]);
    Eigen::SparseMatrix<double> M(A.dim(), A.dim());
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

}  // namespace

SolveReport cg(const LinOp& apply, const double* rhs, double* x, int n, const SolveOptions& opts,
               const double* jacobi_diag) {
    SolveReport rep;
    const std::size_t un = static_cast<std::size_t>(n);
    const int max_it = opts.max_iterations > 0 ? opts.max_iterations : 10 * n;
    std::vector<double> r(un), z(un), p(un), ap(un);

    const double bnorm = std::sqrt(simd::nrm2sq(rhs, un));
    if (bnorm == 0.0) {
        std::fill(x, x + n, 0.0);
        return rep;
    }
    apply(x, r.data());
    simd::vsub(rhs, r.data(), r.data(), un);

    auto precond = [&](const double* in, double* out) {
        if (jacobi_diag != nullptr && opts.preconditioner == Preconditioner::jacobi)
            simd::vdiv(in, jacobi_diag, out, un);
        else
            std::copy(in, in + n, out);
    };
    precond(r.data(), z.data());
    std::copy(z.begin(), z.end(), p.begin());
    double rz = simd::dot(r.data(), z.data(), un);
    const double target = opts.tol * bnorm;

    int it = 0;
    for (; it < max_it; ++it) {
        if (std::sqrt(simd::nrm2sq(r.data(), un)) <= target) break;
        apply(p.data(), ap.data());
        const double pap = simd::dot(p.data(), ap.data(), un);
        if (pap <= 0.0 || !std::isfinite(pap))
            throw SolveError("cg: breakdown, operator is not positive definite");
        const double alpha = rz / pap;
        simd::axpy(alpha, p.data(), x, un);
        simd::axpy(-alpha, ap.data(), r.data(), un);
        precond(r.data(), z.data());
        const double rz_new = simd::dot(r.data(), z.data(), un);
        simd::xpay(z.data(), rz_new / rz, p.data(), un);
        rz = rz_new;
    }
    apply(x, ap.data());
    simd::vsub(rhs, ap.data(), r.data(), un);
    rep.iterations = it;
    rep.residual = std::sqrt(simd::nrm2sq(r.data(), un)) / bnorm;
    rep.converged = rep.residual <= opts.tol * 10.0;
    if (jacobi_diag != nullptr) {
        double dmin = jacobi_diag[0], dmax = jacobi_diag[0];
        for (int i = 1; i < n; ++i) {
            dmin = std::min(dmin, jacobi_diag[i]);
            dmax = std::max(dmax, jacobi_diag[i]);
        }
        if (dmin > 0.0) rep.condition_estimate = dmax / dmin;
    }
    return rep;
}

ScalarField solve_spd(const SparseSymMatrix& A, const ScalarField& rhs, const SolveOptions& opts,
                      SolveReport* report) {
    if (static_cast<int>(rhs.size()) != A.dim())
        throw ValidationError("solve_spd: rhs length mismatch");
    if (!all_finite(rhs)) throw NumericError("solve_spd: non-finite right-hand side");
    if (A.is_diagonal()) {
        ScalarField x(rhs.size());
        simd::vdiv(rhs.data(), A.diag().data(), x.data(), rhs.size());
        if (report != nullptr) {
            *report = SolveReport{};
            const auto [mn, mx] = std::minmax_element(A.diag().begin(), A.diag().end());
            if (*mn > 0.0) report->condition_estimate = *mx / *mn;
        }
        return x;
    }
    if (opts.method == SolveMethod::direct_cholesky) {
        Factorization fac(A);
        ScalarField x = fac.solve(rhs);
        if (report != nullptr) {
            *report = SolveReport{};
            ScalarField ax = A.multiply(x);
            simd::vsub(rhs.data(), ax.data(), ax.data(), ax.size());
            report->residual = std::sqrt(simd::nrm2sq(ax.data(), ax.size())) /
                               std::sqrt(simd::nrm2sq(rhs.data(), rhs.size()));
        }
        return x;
    }
    ScalarField x(rhs.size(), 0.0);
    LinOp apply = [&A](const double* in, double* out) { A.multiply(in, out); };
    SolveReport rep = cg(apply, rhs.data(), x.data(), A.dim(), opts, A.diag().data());
    if (report != nullptr) *report = rep;
    return x;
}

ScalarField remove_b_mean(const SparseSymMatrix& B, const ScalarField& f) {
    ScalarField bf = B.multiply(f);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < bf.size(); ++i) num += bf[i];
    ScalarField ones(f.size(), 1.0);
    ScalarField b1 = B.multiply(ones);
    for (std::size_t i = 0; i < b1.size(); ++i) den += b1[i];
    const double mean = num / den;
    ScalarField g(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i] - mean;
    return g;
}

ScalarField solve_deflated(const SparseSymMatrix& L, const SparseSymMatrix& B,
                           const ScalarField& rhs, const SolveOptions& opts, SolveReport* report) {
    if (opts.method == SolveMethod::direct_cholesky) {
        Factorization fac = Factorization::pinned(L);
        return solve_deflated_direct(fac, B, rhs);
    }
    const ScalarField g0 = remove_b_mean(B, rhs);
    const ScalarField b = B.multiply(g0);
    ScalarField g(rhs.size(), 0.0);
    LinOp apply = [&L](const double* in, double* out) { L.multiply(in, out); };
    SolveReport rep = cg(apply, b.data(), g.data(), L.dim(), opts, L.diag().data());
    if (!rep.converged)
        throw SolveError(
            "solve_deflated: conjugate gradient stagnated (disconnected mesh or "
            "inconsistent system), residual " +
            std::to_string(rep.residual));
    if (report != nullptr) *report = rep;
    return remove_b_mean(B, g);
}

struct Factorization::Impl {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    std::string tag;
    int n = 0;
    bool pinned = false;
};

Factorization::Factorization(const SparseSymMatrix& A, std::string tag)
    : impl_(std::make_unique<Impl>()) {
    impl_->tag = std::move(tag);
    impl_->n = A.dim();
    impl_->ldlt.compute(to_eigen(A));
    if (impl_->ldlt.info() != Eigen::Success)
        throw SolveError("factorization breakdown (matrix not positive definite?)");
}

Factorization Factorization::pinned(const SparseSymMatrix& L, std::string tag) {
    Eigen::SparseMatrix<double> M = to_eigen(L);
    double mean_diag = 0.0;
    for (double d : L.diag()) mean_diag += d;
    mean_diag /= static_cast<double>(std::max(L.dim(), 1));
    M.coeffRef(0, 0) += mean_diag;
    Factorization fac;
    fac.impl_ = std::make_unique<Impl>();
    fac.impl_->tag = std::move(tag);
    fac.impl_->n = L.dim();
    fac.impl_->pinned = true;
    fac.impl_->ldlt.compute(M);
    if (fac.impl_->ldlt.info() != Eigen::Success)
        throw SolveError("pinned factorization breakdown");
    return fac;
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

ScalarField Factorization::solve(const ScalarField& rhs) const {
    ScalarField x(rhs.size());
    solve(rhs.data(), x.data());
    return x;
}

void Factorization::solve(const double* rhs, double* x) const {
    Eigen::Map<const Eigen::VectorXd> b(rhs, impl_->n);
    Eigen::Map<Eigen::VectorXd> out(x, impl_->n);
    out = impl_->ldlt.solve(b);
}

const std::string& Factorization::tag() const { return impl_->tag; }

std::size_t Factorization::factor_nnz() const {
    return static_cast<std::size_t>(impl_->ldlt.matrixL().nestedExpression().nonZeros());
}

int Factorization::dim() const { return impl_->n; }

bool Factorization::is_pinned() const { return impl_->pinned; }

ScalarField solve_deflated_direct(const Factorization& pinned_L, const SparseSymMatrix& B,
                                  const ScalarField& rhs) {
    const ScalarField g0 = remove_b_mean(B, rhs);
    const ScalarField b = B.multiply(g0);
    ScalarField g = pinned_L.solve(b);
    return remove_b_mean(B, g);
}

}  // namespace spectral
