#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "spectral/error.hpp"
#include "spectral/laplacian.hpp"
#include "spectral/meshgen.hpp"
#include "support/helpers.hpp"

using namespace spectral;

namespace {

TriangleMesh equilateral() {
    TriangleMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}};
    m.triangles = {{0, 1, 2}};
    return m;
}

}  // namespace

TEST_CASE("stiffness of the equilateral triangle matches the hand value") {
    const SparseSymMatrix L = stiffness_matrix(equilateral());
    const double w = -0.5 / std::tan(M_PI / 3.0);  // -cot(60 deg)/2
    CHECK(L.entry(0, 1) == doctest::Approx(w).epsilon(1e-12));
    CHECK(L.entry(1, 2) == doctest::Approx(w).epsilon(1e-12));
    CHECK(L.entry(0, 0) == doctest::Approx(-2.0 * w).epsilon(1e-12));
    CHECK(w == doctest::Approx(-0.288675134594813).epsilon(1e-12));
}

TEST_CASE("right angle kills the opposite cotangent weight") {
    const SparseSymMatrix L = stiffness_matrix(make_single_triangle());
    // edge between the two acute vertices (1,2) sees the 90-degree angle at 0
    CHECK(L.entry(1, 2) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("stiffness annihilates constants, is symmetric and PSD") {
    const TriangleMesh m = make_blob(6, 0.2);
    const SparseSymMatrix L = stiffness_matrix(m);
    const int n = m.num_vertices();
    const double lmax = L.max_abs();

    ScalarField ones(static_cast<std::size_t>(n), 1.0);
    const ScalarField r = L.multiply(ones);
    for (double v : r) CHECK(std::abs(v) <= 1e-10 * lmax);

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) CHECK(L.entry(i, j) == L.entry(j, i));

    for (int trial = 0; trial < 100; ++trial) {
        const ScalarField f = testsup::random_field(n, 1000 + trial);
        double fsq = 0.0;
        for (double v : f) fsq += v * v;
        CHECK(L.quadratic_form(f) >= -1e-10 * fsq * lmax);
    }
}

TEST_CASE("mass matrices of the single triangle") {
    const TriangleMesh tri = make_single_triangle();  // area 1/2
    const SparseSymMatrix Bl = mass_matrix(tri, MassScheme::barycentric_lumped);
    for (int i = 0; i < 3; ++i) CHECK(Bl.entry(i, i) == doctest::Approx(0.5 / 3.0).epsilon(1e-14));
    CHECK(Bl.is_diagonal());

    const SparseSymMatrix Bf = mass_matrix(tri, MassScheme::full_fem);
    double trace = 0.0;
    for (int i = 0; i < 3; ++i) {
        double row = 0.0;
        for (int j = 0; j < 3; ++j) row += Bf.entry(i, j);
        CHECK(row == doctest::Approx(0.5 / 3.0).epsilon(1e-14));
        trace += Bf.entry(i, i);
    }
    CHECK(trace == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("total mass equals the surface area in both schemes") {
    const TriangleMesh m = make_icosphere(2);
    const double area = total_area(m);
    for (MassScheme scheme : {MassScheme::barycentric_lumped, MassScheme::full_fem}) {
        const SparseSymMatrix B = mass_matrix(m, scheme);
        double mass = 0.0;
        for (double v : B.values()) mass += v;
        CHECK(mass == doctest::Approx(area).epsilon(1e-12));
    }
}

TEST_CASE("scale covariance: L invariant, B scales by c^2") {
    const TriangleMesh m = make_icosahedron();
    TriangleMesh scaled = m;
    const double c = 2.5;
    for (auto& v : scaled.vertices)
        for (double& x : v) x *= c;
    const SparseSymMatrix L1 = stiffness_matrix(m), L2 = stiffness_matrix(scaled);
    const SparseSymMatrix B1 = mass_matrix(m, MassScheme::barycentric_lumped);
    const SparseSymMatrix B2 = mass_matrix(scaled, MassScheme::barycentric_lumped);
    REQUIRE(L1.nnz() == L2.nnz());
    for (std::size_t k = 0; k < L1.nnz(); ++k)
        CHECK(L2.values()[k] == doctest::Approx(L1.values()[k]).epsilon(1e-12));
    for (int i = 0; i < 12; ++i)
        CHECK(B2.entry(i, i) == doctest::Approx(c * c * B1.entry(i, i)).epsilon(1e-12));
}

TEST_CASE("lambda_max_bound dominates the dense oracle") {
    const LaplacianPair pair = build_laplacian(make_icosahedron());
    const auto dense = testsup::dense_eig(pair);
    const double lmax = dense.eigenvalues.maxCoeff();
    const double bound = lambda_max_bound(pair);
    CHECK(bound >= lmax);
    CHECK(bound <= 10.0 * lmax);  // tightness, documented not contractual
}

TEST_CASE("lambda_max_bound requires a diagonal mass matrix") {
    const LaplacianPair pair = build_laplacian(make_icosahedron(), MassScheme::full_fem);
    CHECK_THROWS_AS(lambda_max_bound(pair), NumericError);
}

TEST_CASE("lambda_max_estimate converges and brackets correctly") {
    const LaplacianPair pair = build_laplacian(make_icosahedron());
    const auto dense = testsup::dense_eig(pair);
    const double lmax = dense.eigenvalues.maxCoeff();
    const LambdaMaxEstimate est = lambda_max_estimate(pair, 1e-6);
    CHECK(est.converged);
    CHECK(est.value <= lambda_max_bound(pair));
    CHECK(std::abs(est.raw - lmax) <= 1e-3 * lmax);

    const LaplacianPair big = build_laplacian(make_icosphere(3));
    const LambdaMaxEstimate est2 = lambda_max_estimate(big, 1e-8);
    CHECK(est2.converged);
    CHECK(est2.iterations < 500);
}

TEST_CASE("lambda_max_estimate handles the full-fem mass") {
    const LaplacianPair pair = build_laplacian(make_icosphere(1), MassScheme::full_fem);
    const auto dense = testsup::dense_eig(pair);
    const double lmax = dense.eigenvalues.maxCoeff();
    const LambdaMaxEstimate est = lambda_max_estimate(pair, 1e-6);
    CHECK(est.converged);
    CHECK(std::abs(est.raw - lmax) <= 1e-3 * lmax);
}
