#pragma once

#include <functional>
#include <memory>
#include <string>

#include "spectral/mesh.hpp"
#include "spectral/sparse.hpp"

namespace spectral {

enum class SolveMethod { conjugate_gradient, direct_cholesky };
enum class Preconditioner { none, jacobi };

struct SolveOptions {
    double tol = 1e-10;
    int max_iterations = 0;  // 0 => 10 n
    Preconditioner preconditioner = Preconditioner::jacobi;
    SolveMethod method = SolveMethod::conjugate_gradient;
};

struct SolveReport {
    int iterations = 0;
    double residual = 0.0;          // relative, ||Ax-b|| / ||b||
    bool converged = true;
    double condition_estimate = 0.0;  // diagonal-based; 0 when not available
};

// Matrix-free symmetric positive (semi)definite operator.
using LinOp = std::function<void(const double* x, double* y)>;

// Preconditioned conjugate gradient; x is the initial guess on input.
SolveReport cg(const LinOp& apply, const double* rhs, double* x, int n, const SolveOptions& opts,
               const double* jacobi_diag = nullptr);

// Solve A x = rhs with A SPD (caller-asserted).
ScalarField solve_spd(const SparseSymMatrix& A, const ScalarField& rhs, const SolveOptions& opts,
                      SolveReport* report = nullptr);

// B-weighted mean removal: f - (1^T B f / 1^T B 1) * 1. Orthogonal projection
// against the constant kernel of L for arbitrary total mass.
ScalarField remove_b_mean(const SparseSymMatrix& B, const ScalarField& f);

// Least-squares solve of L g = B g0 with g0 = rhs minus its B-mean; the
// result is deflated so that 1^T B g = 0. L must be PSD with a constant
// kernel (connected mesh).
ScalarField solve_deflated(const SparseSymMatrix& L, const SparseSymMatrix& B,
                           const ScalarField& rhs, const SolveOptions& opts,
                           SolveReport* report = nullptr);

// Reusable sparse Cholesky-type factorization (LDL^T).
class Factorization {
  public:
    // A SPD.
    explicit Factorization(const SparseSymMatrix& A, std::string tag = "");

    // Kernel-pinned factorization of a singular PSD stiffness matrix: one
    // diagonal entry is bumped, which pins the constant null space; for a
    // consistent right-hand side the solve is exact (see solve_deflated_direct).
    static Factorization pinned(const SparseSymMatrix& L, std::string tag = "");

    ~Factorization();
    Factorization(Factorization&&) noexcept;
    Factorization& operator=(Factorization&&) noexcept;
    Factorization(const Factorization&) = delete;
    Factorization& operator=(const Factorization&) = delete;

    ScalarField solve(const ScalarField& rhs) const;
    void solve(const double* rhs, double* x) const;

    const std::string& tag() const;
    std::size_t factor_nnz() const;
    int dim() const;
    bool is_pinned() const;

  private:
    Factorization() = default;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Deflated solve through a pinned factorization of L. rhs is B-mean-removed,
// the pinned factor applied, and the result projected to 1^T B g = 0.
ScalarField solve_deflated_direct(const Factorization& pinned_L, const SparseSymMatrix& B,
                                  const ScalarField& rhs);

}  // namespace spectral
