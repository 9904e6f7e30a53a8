#pragma once

#include <optional>
#include <vector>

#include "spectral/filters.hpp"
#include "spectral/laplacian.hpp"
#include "spectral/mesh.hpp"
#include "spectral/solvers.hpp"

namespace spectral {

// g = (B^{-1}L)^i f via i successive (L-multiply, B-solve) steps.
ScalarField apply_power(const LaplacianPair& pair, const ScalarField& f, int i,
                        const SolveOptions& opts = {});

// g = ((B^{-1}L)^dagger)^i f via i deflated least-squares solves; the result
// is B-orthogonal to constants. Requires a connected mesh.
ScalarField apply_pinv_power(const LaplacianPair& pair, const ScalarField& f, int i,
                             const SolveOptions& opts = {});

// u = sum_i a_i (B^{-1}L)^i f + sum_i b_i pinv^i f.
ScalarField apply_canonical(const LaplacianPair& pair, const CanonicalRationalFilter& can,
                            const ScalarField& f, const SolveOptions& opts = {});

// Spectrum-free evaluation of Phi_{1/rho}: the inverse filter is split as
// 1/rho(s) = s^{-m} g(s) with m the pole order at 0 and g rational; pinv
// powers handle s^{-m} through deflated solves and g is applied as
// p_l(Ltil) q_r(Ltil)^{-1} with q factored into shifted linear/quadratic
// sparse SPD solves. All factorizations are built once at construction.
class SpectralEvaluator {
  public:
    SpectralEvaluator(const LaplacianPair& pair, const Filter& filter, Degree degree = {},
                      const SolveOptions& opts = {});

    ScalarField apply_operator(const ScalarField& f) const;
    double distance(int i, int j) const;
    ScalarField distance_field(int seed) const;
    ScalarField kernel_column(int i) const;

    double lambda_hat() const { return lambda_hat_; }
    double sigma() const { return sigma_; }
    int pinv_power() const { return pinv_power_; }
    bool fit_converged() const { return fit_converged_; }
    const RationalFilter& rational_part() const { return g_; }

  private:
    struct LinearFactor {
        Factorization fac;     // of +-(L - z B)
        double sign;           // applied to the solve result
    };
    struct QuadraticFactor {
        std::optional<Factorization> fac;  // assembled L B^{-1} L + beta L + gamma B
        double beta = 0.0;
        double gamma = 0.0;
        std::vector<double> jacobi;        // matrix-free path preconditioner
    };

    ScalarField apply_ltilde(const ScalarField& v) const;
    ScalarField apply_rational(const ScalarField& f) const;
    void build_factors();

    const LaplacianPair* pair_;
    Filter filter_;
    SolveOptions opts_;
    double lambda_hat_ = 0.0;
    double sigma_ = 0.0;
    bool fit_converged_ = true;
    int pinv_power_ = 0;
    RationalFilter g_;          // rational part of 1/rho; {1}/{1} when exact
    bool g_is_identity_ = true;
    double den_lead_ = 1.0;
    std::vector<LinearFactor> linear_factors_;
    std::vector<QuadraticFactor> quad_factors_;
    std::optional<Factorization> pinned_stiffness_;
    std::optional<Factorization> mass_factor_;  // non-diagonal B only
};

}  // namespace spectral
