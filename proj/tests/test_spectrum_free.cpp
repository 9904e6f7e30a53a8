#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "spectral/error.hpp"
#include "spectral/filters.hpp"
#include "spectral/laplacian.hpp"
#include "spectral/meshgen.hpp"
#include "spectral/spectrum_free.hpp"
#include "support/helpers.hpp"

using namespace spectral;

namespace {

Eigen::VectorXd to_vec(const ScalarField& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) v(static_cast<Eigen::Index>(i)) = f[i];
    return v;
}

// Dense B-weighted pseudo-inverse power of B^{-1}L through the oracle
// eigendecomposition.
Eigen::MatrixXd dense_pinv_power(const LaplacianPair& pair, int p) {
    const auto es = testsup::dense_eig(pair);
    const int n = pair.mass.dim();
    const Eigen::MatrixXd B = testsup::to_dense(pair.mass);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (int l = 0; l < n; ++l)
        if (es.eigenvalues(l) > 1e-10)
            P += es.eigenvectors.col(l) *
                 (es.eigenvectors.col(l).transpose() * B) /
                 std::pow(es.eigenvalues(l), p);
    return P;
}

}  // namespace

TEST_CASE("apply_power: i=0 identity, constants in the kernel, i=2 vs dense") {
    const LaplacianPair pair = build_laplacian(make_icosphere(1));
    const int n = pair.mass.dim();
    const ScalarField f = testsup::random_field(n, 3);
    CHECK(testsup::max_abs_diff(apply_power(pair, f, 0), f) == 0.0);

    const ScalarField c = apply_power(pair, ScalarField(static_cast<std::size_t>(n), 2.0), 1);
    for (double v : c) CHECK(std::abs(v) <= 1e-8);

    const Eigen::MatrixXd L = testsup::to_dense(pair.stiffness);
    const Eigen::MatrixXd B = testsup::to_dense(pair.mass);
    const Eigen::MatrixXd A = B.ldlt().solve(L);
    const Eigen::VectorXd want = A * (A * to_vec(f));
    const ScalarField got = apply_power(pair, f, 2);
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(got[static_cast<std::size_t>(i)] - want(i)) <= 1e-7 * want.norm());
}

TEST_CASE("apply_pinv_power inverts on the non-constant eigenspace") {
    const LaplacianPair pair = build_laplacian(make_icosahedron());
    const int n = 12;
    const auto es = testsup::dense_eig(pair);

    // eigenvector input: x_3 -> x_3 / lambda_3
    ScalarField x3(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x3[static_cast<std::size_t>(i)] = es.eigenvectors(i, 2);
    const ScalarField g = apply_pinv_power(pair, x3, 1);
    for (int i = 0; i < n; ++i)
        CHECK(g[static_cast<std::size_t>(i)] ==
              doctest::Approx(x3[static_cast<std::size_t>(i)] / es.eigenvalues(2)).epsilon(1e-8));

    // constants map to zero
    const ScalarField z = apply_pinv_power(pair, ScalarField(static_cast<std::size_t>(n), 1.0), 1);
    for (double v : z) CHECK(std::abs(v) <= 1e-10);

    // i=2 against the dense pseudo-inverse square
    const ScalarField f = testsup::random_field(n, 9);
    const Eigen::VectorXd want = dense_pinv_power(pair, 2) * to_vec(f);
    const ScalarField got = apply_pinv_power(pair, f, 2);
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(got[static_cast<std::size_t>(i)] - want(i)) <= 1e-6 * (1.0 + want.norm()));
}

TEST_CASE("apply_canonical reproduces a pure constant term exactly") {
    const LaplacianPair pair = build_laplacian(make_icosahedron());
    CanonicalRationalFilter can;
    can.pos = {0.75};
    const ScalarField f = testsup::random_field(12, 4);
    const ScalarField u = apply_canonical(pair, can, f);
    for (int i = 0; i < 12; ++i)
        CHECK(u[static_cast<std::size_t>(i)] ==
              doctest::Approx(0.75 * f[static_cast<std::size_t>(i)]).epsilon(1e-14));
}

TEST_CASE("commute-time evaluator matches the dense pseudo-inverse operator") {
    const LaplacianPair pair = build_laplacian(make_icosphere(1));
    const int n = pair.mass.dim();
    Filter filt;
    filt.kind = FilterKind::commute_time;
    const SpectralEvaluator ev(pair, filt);
    CHECK(ev.pinv_power() == 1);

    const ScalarField f = testsup::random_field(n, 21);
    const Eigen::VectorXd want = dense_pinv_power(pair, 1) * to_vec(f);
    const ScalarField got = ev.apply_operator(f);
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(got[static_cast<std::size_t>(i)] - want(i)) <= 1e-6 * (1.0 + want.norm()));
}

TEST_CASE("Green's function columns satisfy the defining equation") {
    const LaplacianPair pair = build_laplacian(make_icosphere(2));
    const int n = pair.mass.dim();
    Filter filt;
    filt.kind = FilterKind::commute_time;
    SolveOptions opts;
    opts.tol = 1e-12;
    const SpectralEvaluator ev(pair, filt, {}, opts);
    for (int i : {0, 37, n - 1}) {
        const ScalarField g = ev.kernel_column(i);
        // L g = B (e_i - B-mean(e_i)); check the deflated residual
        const ScalarField e = indicator(make_icosphere(2), i);
        const ScalarField g0 = remove_b_mean(pair.mass, e);
        const ScalarField rhs = pair.mass.multiply(g0);
        const ScalarField lg = pair.stiffness.multiply(g);
        double rsq = 0.0;
        for (int k = 0; k < n; ++k) {
            const double r = lg[static_cast<std::size_t>(k)] - rhs[static_cast<std::size_t>(k)];
            rsq += r * r;
        }
        CHECK(std::sqrt(rsq) <= 1e-6);
    }
}

TEST_CASE("kernel columns are B-adjoint symmetric") {
    const LaplacianPair pair = build_laplacian(make_icosphere(1));
    Filter filt;
    filt.kind = FilterKind::biharmonic;
    const SpectralEvaluator ev(pair, filt);
    const int pairs[][2] = {{0, 7}, {3, 22}, {11, 40}};
    for (const auto& p : pairs) {
        const ScalarField ci = ev.kernel_column(p[0]);
        const ScalarField cj = ev.kernel_column(p[1]);
        const double bi = pair.mass.entry(p[0], p[0]);
        const double bj = pair.mass.entry(p[1], p[1]);
        CHECK(std::abs(bi * cj[static_cast<std::size_t>(p[0])] -
                       bj * ci[static_cast<std::size_t>(p[1])]) <= 1e-6);
    }
}

TEST_CASE("distance axioms: d(i,i)=0 and symmetry") {
    const LaplacianPair pair = build_laplacian(make_icosphere(1));
    Filter filt;
    filt.kind = FilterKind::diffusion;
    filt.t = 0.05;
    const SpectralEvaluator ev(pair, filt);
    CHECK(ev.distance(17, 17) == 0.0);
    const double dij = ev.distance(3, 29);
    const double dji = ev.distance(29, 3);
    CHECK(dij > 0.0);
    CHECK(std::abs(dij - dji) <= 1e-12 * dij);
}

TEST_CASE("distance_field agrees with pairwise distances") {
    const LaplacianPair pair = build_laplacian(make_icosphere(1));
    Filter filt;
    filt.kind = FilterKind::commute_time;
    const SpectralEvaluator ev(pair, filt);
    const int seed = 13;
    const ScalarField field = ev.distance_field(seed);
    for (int j : {0, 5, 13, 20, 41}) {
        CHECK(std::abs(field[static_cast<std::size_t>(j)] - ev.distance(seed, j)) <= 1e-10);
    }
}

TEST_CASE("index validation") {
    const LaplacianPair pair = build_laplacian(make_icosahedron());
    Filter filt;
    filt.kind = FilterKind::commute_time;
    const SpectralEvaluator ev(pair, filt);
    CHECK_THROWS_AS(ev.distance(-1, 3), ValidationError);
    CHECK_THROWS_AS(ev.distance(0, 12), ValidationError);
    CHECK_THROWS_AS(ev.kernel_column(12), ValidationError);
    CHECK_THROWS_AS(ev.distance_field(99), ValidationError);
}

TEST_CASE("fractional filters are rejected as unsupported") {
    const LaplacianPair pair = build_laplacian(make_icosahedron());
    Filter filt;
    filt.kind = FilterKind::mexican_hat;
    CHECK_THROWS_AS(SpectralEvaluator(pair, filt), NumericError);
    filt.kind = FilterKind::power;
    filt.p = 1.5;
    CHECK_THROWS_AS(SpectralEvaluator(pair, filt), NumericError);
}

TEST_CASE("log-composite evaluator tracks the truncated reference") {
    const LaplacianPair pair = build_laplacian(make_icosphere(1));
    const int n = pair.mass.dim();
    Filter filt;
    filt.kind = FilterKind::log_composite;
    const SpectralEvaluator ev(pair, filt);
    CHECK(ev.pinv_power() == 3);
    CHECK(ev.lambda_hat() > 0.0);

    // dense oracle of Phi_{1/rho}
    const auto es = testsup::dense_eig(pair);
    const Eigen::MatrixXd B = testsup::to_dense(pair.mass);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (int l = 1; l < n; ++l) {
        const double lam = es.eigenvalues(l);
        const double rho = lam * lam * std::log1p(lam);
        K += es.eigenvectors.col(l) * (es.eigenvectors.col(l).transpose() * B) / rho;
    }
    const ScalarField f = testsup::random_field(n, 55);
    const Eigen::VectorXd want = K * to_vec(f);
    const ScalarField got = ev.apply_operator(f);
    const double tol = std::max(1e-6, 2.0 * ev.sigma()) * (1.0 + want.norm());
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(got[static_cast<std::size_t>(i)] - want(i)) <= tol);
}

TEST_CASE("full-fem mass path matches the oracle for diffusion") {
    const LaplacianPair pair = build_laplacian(make_icosphere(1), MassScheme::full_fem);
    const int n = pair.mass.dim();
    Filter filt;
    filt.kind = FilterKind::diffusion;
    filt.t = 0.1;
    const SpectralEvaluator ev(pair, filt);
    CHECK(ev.pinv_power() == 0);

    const auto es = testsup::dense_eig(pair);
    const Eigen::MatrixXd B = testsup::to_dense(pair.mass);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (int l = 0; l < n; ++l)
        K += es.eigenvectors.col(l) * (es.eigenvectors.col(l).transpose() * B) *
             std::exp(-filt.t * es.eigenvalues(l));
    const ScalarField f = testsup::random_field(n, 31);
    const Eigen::VectorXd want = K * to_vec(f);
    const ScalarField got = ev.apply_operator(f);
    const double tol = std::max(1e-6, 2.0 * ev.sigma()) * (1.0 + want.norm());
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(got[static_cast<std::size_t>(i)] - want(i)) <= tol);
}
