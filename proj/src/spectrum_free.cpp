#include "spectral/spectrum_free.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <complex>

#include "spectral/error.hpp"
#include "spectral/simd/vec_ops.hpp"

namespace spectral {

ScalarField apply_power(const LaplacianPair& pair, const ScalarField& f, int i,
                        const SolveOptions& opts) {
    if (i < 0) throw InputError("apply_power: negative power");
    ScalarField g = f;
    for (int step = 0; step < i; ++step) {
        ScalarField lg = pair.stiffness.multiply(g);
        g = solve_spd(pair.mass, lg, opts);
    }
    return g;
}

ScalarField apply_pinv_power(const LaplacianPair& pair, const ScalarField& f, int i,
                             const SolveOptions& opts) {
    if (i < 1) throw InputError("apply_pinv_power: power must be >= 1");
    ScalarField g = f;
    for (int step = 0; step < i; ++step)
        g = solve_deflated(pair.stiffness, pair.mass, g, opts);
    return g;
}

ScalarField apply_canonical(const LaplacianPair& pair, const CanonicalRationalFilter& can,
                            const ScalarField& f, const SolveOptions& opts) {
    const std::size_t n = f.size();
    ScalarField u(n, 0.0);
    ScalarField g = f;
    for (std::size_t i = 0; i < can.pos.size(); ++i) {
        if (i > 0) {
            ScalarField lg = pair.stiffness.multiply(g);
            g = solve_spd(pair.mass, lg, opts);
        }
        if (can.pos[i] != 0.0) simd::axpy(can.pos[i], g.data(), u.data(), n);
    }
    g = f;
    for (std::size_t i = 0; i < can.neg.size(); ++i) {
        g = solve_deflated(pair.stiffness, pair.mass, g, opts);
        if (can.neg[i] != 0.0) simd::axpy(can.neg[i], g.data(), u.data(), n);
    }
    return u;
}

namespace {

// Roots of a power-basis polynomial via the companion matrix.
std::vector<std::complex<double>> poly_roots(std::vector<double> c) {
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * cmax) c.pop_back();
    const int deg = static_cast<int>(c.size()) - 1;
    std::vector<std::complex<double>> roots;
    if (deg < 1) return roots;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()(i));
    return roots;
}

Eigen::SparseMatrix<double> to_eigen(const SparseSymMatrix& A) {
    const int n = A.dim();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(A.nnz());
    for (int i = 0; i < n; ++i)
        for (int k = A.row_ptr()[static_cast<std::size_t>(i)];
             k < A.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
            trips.emplace_back(i, A.col_idx()[static_cast<std::size_t>(k)],
                               A.values()[static_cast<std::size_t>(k)]);
    Eigen::SparseMatrix<double> E(n, n);
    E.setFromTriplets(trips.begin(), trips.end());
    return E;
}

SparseSymMatrix from_eigen(const Eigen::SparseMatrix<double>& E) {
    std::vector<SparseSymMatrix::Triplet> trips;
    trips.reserve(static_cast<std::size_t>(E.nonZeros()));
    for (int k = 0; k < E.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(E, k); it; ++it)
            if (it.row() <= it.col()) trips.push_back({static_cast<int>(it.row()),
                                                       static_cast<int>(it.col()), it.value()});
    return SparseSymMatrix::from_triplets(static_cast<int>(E.rows()), std::move(trips));
}

// a*X + b*Y for two sparse symmetric matrices on the same index space.
SparseSymMatrix combine(double a, const SparseSymMatrix& X, double b, const SparseSymMatrix& Y) {
    std::vector<SparseSymMatrix::Triplet> trips;
    auto push = [&](double s, const SparseSymMatrix& M) {
        const int n = M.dim();
        for (int i = 0; i < n; ++i)
            for (int k = M.row_ptr()[static_cast<std::size_t>(i)];
                 k < M.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
                const int j = M.col_idx()[static_cast<std::size_t>(k)];
                if (j >= i) trips.push_back({i, j, s * M.values()[static_cast<std::size_t>(k)]});
            }
    };
    push(a, X);
    push(b, Y);
    return SparseSymMatrix::from_triplets(X.dim(), std::move(trips));
}

// Rescale R(x) on [0, scale*lambda_hat] to c(s) = R(scale*s) on [0, lambda_hat].
RationalFilter rescale_argument(RationalFilter rat, double scale) {
    double pw = 1.0;
    for (std::size_t i = 0; i < std::max(rat.num.size(), rat.den.size()); ++i) {
        if (i < rat.num.size()) rat.num[i] *= pw;
        if (i < rat.den.size()) rat.den[i] *= pw;
        pw *= scale;
    }
    rat.interval_max /= scale;
    return rat;
}

}  // namespace

SpectralEvaluator::SpectralEvaluator(const LaplacianPair& pair, const Filter& filter,
                                     Degree degree, const SolveOptions& opts)
    : pair_(&pair), filter_(filter), opts_(opts) {
    // the fit interval must cover the whole spectrum; the row-sum bound is a
    // guaranteed upper bound but can be loose by several x on irregular
    // meshes, so the Lanczos estimate (with margin) is preferred when tighter
    if (pair.mass_is_diagonal) {
        const double bound = lambda_max_bound(pair);
        const LambdaMaxEstimate est = lambda_max_estimate(pair);
        lambda_hat_ = est.converged ? std::min(bound, est.value * 1.001) : bound;
    } else {
        lambda_hat_ = lambda_max_estimate(pair).value * 1.01;
    }
    pinv_power_ = filter.inv_pole_order();
    if (pinv_power_ < 0)
        throw NumericError("filter '" + filter.name() +
                           "' has a fractional pole at 0; no rational spectrum-free form");

    // Over-parameterized fits on narrow intervals can produce spurious
    // pole/zero doublets inside the interval; shrink the degree until the
    // factorization is clean.
    auto fit_with_retry = [&](const std::function<double(double)>& f, double cap, double rescale) {
        for (int shrink = 0;; ++shrink) {
            const Degree d{std::max(1, degree.l - shrink), std::max(1, degree.r - shrink)};
            try {
                RationalFilter fit = fit_rational(f, d, cap);
                g_ = rescale != 1.0 ? rescale_argument(fit, rescale) : fit;
                linear_factors_.clear();
                quad_factors_.clear();
                build_factors();
                return;
            } catch (const NumericError&) {
                if (d.l == 1 && d.r == 1) throw;
            }
        }
    };

    switch (filter_.kind) {
        case FilterKind::commute_time:
        case FilterKind::biharmonic:
        case FilterKind::power:
            // 1/rho is exactly s^{-p}; no rational part to fit
            g_ = RationalFilter{{1.0}, {1.0}, lambda_hat_, 0.0, true};
            break;
        case FilterKind::diffusion:
            g_is_identity_ = false;
            fit_with_retry([](double x) { return std::exp(-x); }, filter_.t * lambda_hat_,
                           filter_.t);
            break;
        case FilterKind::log_composite:
            // 1/rho = s^{-3} * g, g(s) = s / log(1+s), g(0) = 1
            g_is_identity_ = false;
            fit_with_retry([](double s) { return s < 1e-12 ? 1.0 : s / std::log1p(s); },
                           lambda_hat_, 1.0);
            break;
        case FilterKind::mexican_hat:
            throw NumericError("mexican-hat filter has no rational spectrum-free form");
        case FilterKind::custom_rational: {
            // 1/rho = q/p with the s^m factor of p split off exactly
            g_.den = filter_.custom.num;
            g_.den.erase(g_.den.begin(), g_.den.begin() + pinv_power_);
            g_.num = filter_.custom.den;
            g_.interval_max = lambda_hat_;
            g_.sigma = 0.0;
            g_is_identity_ = false;
            build_factors();
            break;
        }
    }
    sigma_ = g_.sigma;
    fit_converged_ = g_.converged;

    if (!pair_->mass_is_diagonal) mass_factor_.emplace(pair_->mass, "B");
    if (pinv_power_ > 0) pinned_stiffness_ = Factorization::pinned(pair_->stiffness, "L");
}

void SpectralEvaluator::build_factors() {
    // Factor the denominator of g into shifted SPD solves. Roots are found in
    // the scaled variable s/lambda_hat so that trailing coefficients are
    // trimmed by their contribution on the interval, not raw magnitude.
    std::vector<double> den = g_.den;
    const double b = lambda_hat_;
    double pw = 1.0, dmax = 0.0;
    for (double& v : den) {
        v *= pw;
        pw *= b;
        dmax = std::max(dmax, std::abs(v));
    }
    while (den.size() > 1 && std::abs(den.back()) <= 1e-14 * dmax) den.pop_back();
    den_lead_ = den.back() / std::pow(b, static_cast<double>(den.size()) - 1.0);
    std::vector<std::complex<double>> roots = poly_roots(den);
    for (auto& z : roots) z *= b;
    std::vector<std::complex<double>> pending;
    for (const auto& z : roots) {
        const bool near_real = std::abs(z.imag()) <= 1e-6 * (std::abs(z) + 1.0);
        if (near_real && z.real() > -1e-10 * lambda_hat_ &&
            z.real() < lambda_hat_ * (1.0 + 1e-6))
            throw NumericError("rational filter has a pole inside the spectrum interval");
        if (near_real) {
            const double zr = z.real();
            if (zr <= 0.0) {
                linear_factors_.push_back(
                    {Factorization(combine(1.0, pair_->stiffness, -zr, pair_->mass), "L-zB"),
                     1.0});
            } else {
                linear_factors_.push_back(
                    {Factorization(combine(-1.0, pair_->stiffness, zr, pair_->mass), "zB-L"),
                     -1.0});
            }
        } else if (z.imag() > 0.0) {
            pending.push_back(z);
        }
    }
    for (const auto& z : pending) {
        QuadraticFactor qf;
        qf.beta = -2.0 * z.real();
        qf.gamma = std::norm(z);
        if (pair_->mass_is_diagonal) {
            Eigen::SparseMatrix<double> L = to_eigen(pair_->stiffness);
            const int n = pair_->stiffness.dim();
            Eigen::VectorXd dinv(n);
            for (int i = 0; i < n; ++i)
                dinv(i) = 1.0 / pair_->mass.diag()[static_cast<std::size_t>(i)];
            Eigen::SparseMatrix<double> M = L * dinv.asDiagonal() * L;
            M += qf.beta * L;
            M += qf.gamma * to_eigen(pair_->mass);
            qf.fac.emplace(from_eigen(M), "quad");
        } else {
            const int n = pair_->stiffness.dim();
            qf.jacobi.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const double ld = pair_->stiffness.diag()[static_cast<std::size_t>(i)];
                const double bd = pair_->mass.diag()[static_cast<std::size_t>(i)];
                qf.jacobi[static_cast<std::size_t>(i)] =
                    ld * ld / bd + qf.beta * ld + qf.gamma * bd;
            }
        }
        quad_factors_.push_back(std::move(qf));
    }
}

ScalarField SpectralEvaluator::apply_ltilde(const ScalarField& v) const {
    ScalarField lv = pair_->stiffness.multiply(v);
    if (pair_->mass_is_diagonal) {
        ScalarField y(lv.size());
        simd::vdiv(lv.data(), pair_->mass.diag().data(), y.data(), lv.size());
        return y;
    }
    return mass_factor_->solve(lv);
}

ScalarField SpectralEvaluator::apply_rational(const ScalarField& f) const {
    const std::size_t n = f.size();
    // numerator p_l(Ltil) f by Horner
    ScalarField acc(n, 0.0);
    simd::axpy(g_.num.back(), f.data(), acc.data(), n);
    for (int i = static_cast<int>(g_.num.size()) - 2; i >= 0; --i) {
        acc = apply_ltilde(acc);
        if (g_.num[static_cast<std::size_t>(i)] != 0.0)
            simd::axpy(g_.num[static_cast<std::size_t>(i)], f.data(), acc.data(), n);
    }
    // denominator as cascaded factor solves
    for (const auto& lf : linear_factors_) {
        ScalarField rhs = pair_->mass.multiply(acc);
        acc = lf.fac.solve(rhs);
        if (lf.sign < 0.0) simd::scale(-1.0, acc.data(), n);
    }
    for (const auto& qf : quad_factors_) {
        ScalarField rhs = pair_->mass.multiply(acc);
        if (qf.fac) {
            acc = qf.fac->solve(rhs);
        } else {
            const SparseSymMatrix& L = pair_->stiffness;
            const SparseSymMatrix& B = pair_->mass;
            SolveOptions bopts = opts_;
            bopts.tol = std::min(opts_.tol, 1e-12);
            auto op = [&](const double* x, double* y) {
                ScalarField xv(x, x + n);
                ScalarField lx = L.multiply(xv);
                ScalarField w = mass_factor_->solve(lx);
                ScalarField lw = L.multiply(w);
                ScalarField bx = B.multiply(xv);
                for (std::size_t q = 0; q < n; ++q)
                    y[q] = lw[q] + qf.beta * lx[q] + qf.gamma * bx[q];
            };
            ScalarField x(n, 0.0);
            SolveReport rep = cg(op, rhs.data(), x.data(), static_cast<int>(n), bopts,
                                 qf.jacobi.data());
            if (!rep.converged) throw SolveError("quadratic-factor CG did not converge");
            acc = std::move(x);
        }
    }
    if (den_lead_ != 1.0) simd::scale(1.0 / den_lead_, acc.data(), n);
    return acc;
}

ScalarField SpectralEvaluator::apply_operator(const ScalarField& f) const {
    if (static_cast<int>(f.size()) != pair_->stiffness.dim())
        throw ValidationError("apply_operator: field length mismatch");
    ScalarField u = f;
    for (int step = 0; step < pinv_power_; ++step)
        u = solve_deflated_direct(*pinned_stiffness_, pair_->mass, u);
    if (!g_is_identity_) u = apply_rational(u);
    return u;
}

double SpectralEvaluator::distance(int i, int j) const {
    const int n = pair_->stiffness.dim();
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw ValidationError("distance: vertex index out of range");
    if (i == j) return 0.0;
    ScalarField f(static_cast<std::size_t>(n), 0.0);
    f[static_cast<std::size_t>(i)] = 1.0;
    f[static_cast<std::size_t>(j)] = -1.0;
    const ScalarField u = apply_operator(f);
    return std::sqrt(std::max(0.0, pair_->mass.quadratic_form(u)));
}

ScalarField SpectralEvaluator::distance_field(int seed) const {
    const int n = pair_->stiffness.dim();
    if (seed < 0 || seed >= n) throw ValidationError("distance_field: seed out of range");
    ScalarField out(static_cast<std::size_t>(n), 0.0);
    ScalarField f(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        if (j == seed) continue;
        f[static_cast<std::size_t>(seed)] = 1.0;
        f[static_cast<std::size_t>(j)] = -1.0;
        const ScalarField u = apply_operator(f);
        out[static_cast<std::size_t>(j)] =
            std::sqrt(std::max(0.0, pair_->mass.quadratic_form(u)));
        f[static_cast<std::size_t>(seed)] = 0.0;
        f[static_cast<std::size_t>(j)] = 0.0;
    }
    return out;
}

ScalarField SpectralEvaluator::kernel_column(int i) const {
    const int n = pair_->stiffness.dim();
    if (i < 0 || i >= n) throw ValidationError("kernel_column: index out of range");
    ScalarField f(static_cast<std::size_t>(n), 0.0);
    f[static_cast<std::size_t>(i)] = 1.0;
    return apply_operator(f);
}

}  // namespace spectral
