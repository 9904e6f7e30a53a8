#pragma once

// Shared fixtures for the unit tests: dense conversions, an independent
// generalized eigensolver oracle (Eigen, not the LAPACK path the library
// uses), and small deterministic random utilities.

#include <unistd.h>

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "spectral/laplacian.hpp"
#include "spectral/mesh.hpp"
#include "spectral/sparse.hpp"

namespace testsup {

inline Eigen::MatrixXd to_dense(const spectral::SparseSymMatrix& A) {
    const int n = A.dim();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = A.row_ptr()[static_cast<std::size_t>(i)];
             k < A.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k)
            D(i, A.col_idx()[static_cast<std::size_t>(k)]) =
                A.values()[static_cast<std::size_t>(k)];
    return D;
}

struct DenseSpectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;  // B-orthonormal columns
};

// Independent oracle: Eigen's generalized self-adjoint solver, a different
// code path from the library's LAPACK-based decomposition.
inline DenseSpectrum dense_eig(const spectral::LaplacianPair& pair) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        to_dense(pair.stiffness), to_dense(pair.mass));
    return {es.eigenvalues(), es.eigenvectors()};
}

inline spectral::ScalarField random_field(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    spectral::ScalarField f(static_cast<std::size_t>(n));
    for (double& v : f) v = u(rng);
    return f;
}

inline double max_abs_diff(const spectral::ScalarField& a, const spectral::ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Unique scratch directory under the build tree, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("spectral_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

  private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

}  // namespace testsup
