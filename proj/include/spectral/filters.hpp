#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace spectral {

enum class FilterKind {
    commute_time,   // rho(s) = s
    biharmonic,     // rho(s) = s^2
    power,          // rho(s) = s^p
    diffusion,      // rho_t(s) = exp(s t)
    mexican_hat,    // rho(s) = s^{1/2} exp(s^2)
    log_composite,  // rho(s) = s^2 log(1+s)
    custom_rational
};

// Rational function p_l(s)/q_r(s) in the power basis, approximating some
// target on [0, interval_max] with measured sup error sigma.
struct RationalFilter {
    std::vector<double> num;  // beta_0..beta_l
    std::vector<double> den;  // alpha_0..alpha_r; alpha_0 = 1 unless the
                              // denominator is a monomial
    double interval_max = 1.0;
    double sigma = 0.0;
    bool converged = true;  // equioscillation target reached

    int degree_num() const { return static_cast<int>(num.size()) - 1; }
    int degree_den() const { return static_cast<int>(den.size()) - 1; }
    double evaluate(double s) const;

    // c(s) = s^{-p}: num = [1], den = e_p.
    static RationalFilter monomial_inverse(int p, double interval_max);
};

struct Filter {
    FilterKind kind = FilterKind::commute_time;
    double t = 1.0;  // diffusion scale
    double p = 1.0;  // power exponent
    RationalFilter custom;  // rho itself, for custom_rational

    double evaluate(double s) const;  // rho(s); throws on s < 0
    double inv(double s) const { return 1.0 / evaluate(s); }

    // Order of the pole of 1/rho at s = 0; -1 when fractional (no rational
    // representation exists).
    int inv_pole_order() const;

    std::string name() const;
    static Filter parse(const std::string& name, double t = 1.0, double p = 1.0);
};

// sum a_i s^i + sum b_i s^{-i}, the canonic-basis form of a rational filter.
struct CanonicalRationalFilter {
    std::vector<double> pos;  // a_0..a_l
    std::vector<double> neg;  // b_1..b_r
    double interval_max = 1.0;
    double residual = 0.0;  // relative sup residual vs. the source on a grid

    double evaluate(double s) const;
};

struct Degree {
    int l = 5;
    int r = 5;
};

// Near-best rational approximation of f on [0, lambda_hat]: linearized fit
// at Chebyshev nodes plus a Lawson-style exchange toward equioscillation
// (ratio >= 0.9 or 50 iterations). Throws when the fitted denominator has a
// root in the interval.
RationalFilter fit_rational(const std::function<double(double)>& f, Degree degree,
                            double lambda_hat);

// Fit of 1/rho. Filters with 1/rho = s^{-p} bypass fitting and return the
// exact monomial inverse.
RationalFilter fit_rational_inv(const Filter& filter, Degree degree, double lambda_hat);

// Interpolation onto {s^i} u {s^-i} at Chebyshev nodes of
// [lambda_hat*1e-4, lambda_hat]. Exact when the denominator is a monomial;
// otherwise the residual is reported and the call throws unless
// allow_least_squares is set.
CanonicalRationalFilter to_canonical(const RationalFilter& rat, bool allow_least_squares = false);

// sup |rat(s) - f(s)| over a uniform grid of (0, lambda_hat].
double rational_error(const RationalFilter& rat, const std::function<double(double)>& f,
                      int grid_size);

void to_json(nlohmann::json& j, const RationalFilter& rat);
void from_json(const nlohmann::json& j, RationalFilter& rat);
void to_json(nlohmann::json& j, const CanonicalRationalFilter& can);
void from_json(const nlohmann::json& j, CanonicalRationalFilter& can);

}  // namespace spectral
