#pragma once

#include "spectral/mesh.hpp"
#include "spectral/sparse.hpp"

namespace spectral {

enum class MassScheme { barycentric_lumped, full_fem };

// Cotangent stiffness matrix L and mass matrix B. The normalised Laplacian
// B^{-1} L is only ever applied, never formed.
struct LaplacianPair {
    SparseSymMatrix stiffness;
    SparseSymMatrix mass;
    bool mass_is_diagonal = true;
};

// L(i,j) = -(cot a_ij + cot b_ij)/2 on edges, diagonal = -sum of the row.
// Boundary edges contribute their single cotangent.
SparseSymMatrix stiffness_matrix(const TriangleMesh& mesh);

SparseSymMatrix mass_matrix(const TriangleMesh& mesh, MassScheme scheme);

LaplacianPair build_laplacian(const TriangleMesh& mesh,
                              MassScheme scheme = MassScheme::barycentric_lumped);

// Gershgorin-style upper bound on lambda_max(B^{-1}L): min of max absolute
// row sum and max absolute column sum. Requires a diagonal mass matrix.
double lambda_max_bound(const LaplacianPair& pair);

struct LambdaMaxEstimate {
    double value = 0.0;        // inflated by (1 + 10 tol) so it upper-bounds lambda_max
    double raw = 0.0;          // converged Ritz value
    int iterations = 0;
    bool converged = false;    // false => value fell back to lambda_max_bound
};

// Lanczos estimate of lambda_max of the generalized problem Lx = lambda Bx.
LambdaMaxEstimate lambda_max_estimate(const LaplacianPair& pair, double tol = 1e-8);

}  // namespace spectral
