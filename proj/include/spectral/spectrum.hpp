#pragma once

#include <string>
#include <vector>

#include "spectral/filters.hpp"
#include "spectral/laplacian.hpp"
#include "spectral/mesh.hpp"

namespace spectral {

// First k generalized eigenpairs of (L, B), B-orthonormal, eigenvalues
// ascending with lambda_1 = 0 on a connected mesh.
struct Spectrum {
    std::vector<double> eigenvalues;     // k entries
    std::vector<double> eigenvectors;    // column-major, n x k
    int k = 0;
    int total_n = 0;

    const double* vector(int i) const { return eigenvectors.data() + static_cast<std::size_t>(i) * total_n; }
};

// Dense solver for n <= dense_threshold (the oracle of record), shift-invert
// Lanczos above it.
Spectrum eigendecompose(const LaplacianPair& pair, int k, int dense_threshold = 3000);

// d = sqrt( sum_l |<x_l, e_i - e_j>_B|^2 / rho^2(lambda_l) ), terms with
// rho(lambda) ~ 0 dropped (pseudo-inverse convention).
double truncated_distance(const Spectrum& spec, const LaplacianPair& pair, const Filter& filter,
                          int i, int j);

// Column i of X rho_dag(Lambda) X^T B (the kernel of 1/rho).
ScalarField truncated_kernel_column(const Spectrum& spec, const LaplacianPair& pair,
                                    const Filter& filter, int i);

// <f, x_l>_B coefficients for the first n_modes eigenvectors.
std::vector<double> spectral_coefficients(const Spectrum& spec, const LaplacianPair& pair,
                                          const ScalarField& f, int n_modes);

struct ResidualBoundReport {
    double residual_norm_sq = 0.0;  // ||f - f_n||_B^2
    double bound = 0.0;             // (f^T L f) / lambda_{n+1}
    bool holds = false;
};

ResidualBoundReport residual_bound_check(const Spectrum& spec, const LaplacianPair& pair,
                                         const ScalarField& f, int n_modes);

// CSV eigenvalues + ASCII eigenvector matrix, to cache decompositions.
void save_spectrum(const Spectrum& spec, const std::string& path_prefix);
Spectrum load_spectrum(const std::string& path_prefix);

}  // namespace spectral
