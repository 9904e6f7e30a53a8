#include "spectral/filters.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "spectral/error.hpp"

namespace spectral {

namespace {

double horner(const std::vector<double>& coef, double s) {
    double v = 0.0;
    for (std::size_t i = coef.size(); i-- > 0;) v = v * s + coef[i];
    return v;
}

// Chebyshev Vandermonde, T_0..T_deg at points x in [-1,1].
Eigen::MatrixXd cheb_vandermonde(const Eigen::VectorXd& x, int deg) {
    Eigen::MatrixXd V(x.size(), deg + 1);
    V.col(0).setOnes();
    if (deg >= 1) V.col(1) = x;
    for (int k = 2; k <= deg; ++k)
        V.col(k) = 2.0 * x.cwiseProduct(V.col(k - 1)) - V.col(k - 2);
    return V;
}

// Chebyshev coefficients (in x on [-1,1]) -> power-basis coefficients in s,
// with x = 2 s / b - 1. Exact polynomial arithmetic; degrees stay small.
std::vector<double> cheb_to_power(const Eigen::VectorXd& c, double b) {
    const int deg = static_cast<int>(c.size()) - 1;
    // T_k as power-basis polynomials in x
    std::vector<std::vector<double>> T(static_cast<std::size_t>(deg) + 1);
    T[0] = {1.0};
    if (deg >= 1) T[1] = {0.0, 1.0};
    for (int k = 2; k <= deg; ++k) {
        std::vector<double> t(static_cast<std::size_t>(k) + 1, 0.0);
        for (std::size_t i = 0; i < T[static_cast<std::size_t>(k) - 1].size(); ++i)
            t[i + 1] += 2.0 * T[static_cast<std::size_t>(k) - 1][i];
        for (std::size_t i = 0; i < T[static_cast<std::size_t>(k) - 2].size(); ++i)
            t[i] -= T[static_cast<std::size_t>(k) - 2][i];
        T[static_cast<std::size_t>(k)] = std::move(t);
    }
    std::vector<double> in_x(static_cast<std::size_t>(deg) + 1, 0.0);
    for (int k = 0; k <= deg; ++k)
        for (std::size_t i = 0; i < T[static_cast<std::size_t>(k)].size(); ++i)
            in_x[i] += c[k] * T[static_cast<std::size_t>(k)][i];
    // substitute x = (2/b) s - 1 by Horner with linear polynomial multiply
    std::vector<double> out = {0.0};
    const double a1 = 2.0 / b;
    for (std::size_t i = in_x.size(); i-- > 0;) {
        std::vector<double> next(out.size() + 1, 0.0);
        for (std::size_t j = 0; j < out.size(); ++j) {
            next[j] += -out[j];
            next[j + 1] += a1 * out[j];
        }
        next.resize(std::max<std::size_t>(next.size(), 1));
        next[0] += in_x[i];
        out = std::move(next);
    }
    out.resize(static_cast<std::size_t>(deg) + 1, 0.0);
    return out;
}

}  // namespace

double RationalFilter::evaluate(double s) const {
    return horner(num, s) / horner(den, s);
}

RationalFilter RationalFilter::monomial_inverse(int p, double interval_max) {
    RationalFilter rat;
    rat.num = {1.0};
    rat.den.assign(static_cast<std::size_t>(p) + 1, 0.0);
    rat.den.back() = 1.0;
    rat.interval_max = interval_max;
    rat.sigma = 0.0;
    return rat;
}

double Filter::evaluate(double s) const {
    if (s < 0.0) throw NumericError("filter evaluated at negative argument");
    switch (kind) {
        case FilterKind::commute_time: return s;
        case FilterKind::biharmonic: return s * s;
        case FilterKind::power: return std::pow(s, p);
        case FilterKind::diffusion: return std::exp(s * t);
        case FilterKind::mexican_hat: return std::sqrt(s) * std::exp(s * s);
        case FilterKind::log_composite: return s * s * std::log1p(s);
        case FilterKind::custom_rational: return custom.evaluate(s);
    }
    throw NumericError("unknown filter kind");
}

int Filter::inv_pole_order() const {
    switch (kind) {
        case FilterKind::commute_time: return 1;
        case FilterKind::biharmonic: return 2;
        case FilterKind::power: {
            const double r = std::round(p);
            return std::abs(p - r) < 1e-12 ? static_cast<int>(r) : -1;
        }
        case FilterKind::diffusion: return 0;
        case FilterKind::mexican_hat: return -1;  // half-order zero of rho at 0
        case FilterKind::log_composite: return 3;
        case FilterKind::custom_rational: {
            const double top = *std::max_element(custom.num.begin(), custom.num.end(),
                                                 [](double a, double b) {
                                                     return std::abs(a) < std::abs(b);
                                                 });
            int m = 0;
            for (double c : custom.num) {
                if (std::abs(c) > 1e-14 * std::abs(top)) break;
                ++m;
            }
            return m;
        }
    }
    return -1;
}

std::string Filter::name() const {
    switch (kind) {
        case FilterKind::commute_time: return "commute-time";
        case FilterKind::biharmonic: return "biharmonic";
        case FilterKind::power: return "power";
        case FilterKind::diffusion: return "diffusion";
        case FilterKind::mexican_hat: return "mexican-hat";
        case FilterKind::log_composite: return "log-composite";
        case FilterKind::custom_rational: return "custom-rational";
    }
    return "?";
}

Filter Filter::parse(const std::string& name, double t, double p) {
    Filter f;
    f.t = t;
    f.p = p;
    if (name == "commute-time")
        f.kind = FilterKind::commute_time;
    else if (name == "biharmonic")
        f.kind = FilterKind::biharmonic;
    else if (name == "power")
        f.kind = FilterKind::power;
    else if (name == "diffusion")
        f.kind = FilterKind::diffusion;
    else if (name == "mexican-hat")
        f.kind = FilterKind::mexican_hat;
    else if (name == "log-composite")
        f.kind = FilterKind::log_composite;
    else
        throw InputError("unknown filter name: " + name);
    if (f.kind == FilterKind::diffusion && !(t > 0.0))
        throw InputError("diffusion filter requires scale t > 0");
    if (f.kind == FilterKind::power && !(p >= 1.0))
        throw InputError("power filter requires exponent p >= 1");
    return f;
}

double CanonicalRationalFilter::evaluate(double s) const {
    double v = horner(pos, s);
    if (!neg.empty()) {
        const double si = 1.0 / s;
        double acc = 0.0;
        for (std::size_t i = neg.size(); i-- > 0;) acc = (acc + neg[i]) * si;
        v += acc;
    }
    return v;
}

RationalFilter fit_rational(const std::function<double(double)>& f, Degree degree,
                            double lambda_hat) {
    const int l = degree.l, r = degree.r;
    if (l < 0 || r < 0 || !(lambda_hat > 0.0))
        throw InputError("fit_rational: invalid degree or interval");
    const int M = std::max(400, 40 * (l + r + 2));
    Eigen::VectorXd xg(M), fg(M);
    for (int i = 0; i < M; ++i) {
        xg[i] = -std::cos(M_PI * (i + 0.5) / M);
        const double s = (xg[i] + 1.0) * 0.5 * lambda_hat;
        fg[i] = f(s);
        if (!std::isfinite(fg[i]))
            throw NumericError("fit_rational: target not finite on the interval");
    }
    const Eigen::MatrixXd Vp = cheb_vandermonde(xg, l);
    const Eigen::MatrixXd Vq = cheb_vandermonde(xg, r);

    Eigen::VectorXd w_law = Eigen::VectorXd::Ones(M);
    Eigen::VectorXd qv = Eigen::VectorXd::Ones(M);
    Eigen::VectorXd best_p, best_q;
    double best_sup = std::numeric_limits<double>::infinity();
    bool best_equi = false;

    const int sk_iters = 20;
    const int lawson_iters = 50;
    for (int it = 0; it < sk_iters + lawson_iters; ++it) {
        Eigen::VectorXd w =
            w_law.cwiseSqrt().cwiseQuotient(qv.cwiseAbs().cwiseMax(1e-300));
        Eigen::MatrixXd A(M, l + r + 2);
        A.leftCols(l + 1) = w.asDiagonal() * Vp;
        const Eigen::VectorXd wf = -w.cwiseProduct(fg);
        A.rightCols(r + 1) = wf.asDiagonal() * Vq;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
        const Eigen::VectorXd sol = svd.matrixV().col(l + r + 1);
        const Eigen::VectorXd pc = sol.head(l + 1);
        const Eigen::VectorXd qc = sol.tail(r + 1);
        qv = Vq * qc;
        if (qv.cwiseAbs().minCoeff() < 1e-13 * qv.cwiseAbs().maxCoeff()) continue;
        const Eigen::VectorXd e = (Vp * pc).cwiseQuotient(qv) - fg;
        const double sup = e.cwiseAbs().maxCoeff();

        // equioscillation ratio over alternating-sign local extrema
        double ratio = 0.0;
        {
            std::vector<int> peaks;
            auto push = [&](int i) {
                if (!peaks.empty() && std::signbit(e[peaks.back()]) == std::signbit(e[i])) {
                    if (std::abs(e[i]) > std::abs(e[peaks.back()])) peaks.back() = i;
                } else {
                    peaks.push_back(i);
                }
            };
            push(0);
            for (int i = 1; i + 1 < M; ++i)
                if ((e[i] - e[i - 1]) * (e[i + 1] - e[i]) <= 0.0) push(i);
            push(M - 1);
            if (static_cast<int>(peaks.size()) >= l + r + 2) {
                double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
                for (int i : peaks) {
                    lo = std::min(lo, std::abs(e[i]));
                    hi = std::max(hi, std::abs(e[i]));
                }
                if (hi > 0.0) ratio = lo / hi;
            }
        }
        if (sup < best_sup) {
            best_sup = sup;
            best_p = pc;
            best_q = qc;
            best_equi = ratio >= 0.9;
        }
        if (it >= sk_iters && ratio >= 0.9 && sup <= best_sup * (1.0 + 1e-6)) {
            best_sup = std::min(best_sup, sup);
            best_p = pc;
            best_q = qc;
            best_equi = true;
            break;
        }
        if (it >= sk_iters) {
            w_law = w_law.cwiseProduct(e.cwiseAbs().cwiseMax(1e-300));
            w_law /= w_law.sum();
        }
    }
    if (best_p.size() == 0) throw NumericError("fit_rational: no valid iterate");

    RationalFilter rat;
    rat.num = cheb_to_power(best_p, lambda_hat);
    rat.den = cheb_to_power(best_q, lambda_hat);
    rat.interval_max = lambda_hat;
    rat.converged = best_equi;
    // normalize q(0) = 1
    const double q0 = rat.den[0];
    double dmax = 0.0;
    for (double c : rat.den) dmax = std::max(dmax, std::abs(c));
    if (std::abs(q0) < 1e-12 * dmax)
        throw NumericError("fit_rational: denominator vanishes at 0 (pole in the interval)");
    for (double& c : rat.num) c /= q0;
    for (double& c : rat.den) c /= q0;
    // denominator root check on a dense grid
    double qmin = std::numeric_limits<double>::infinity(), qmax = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double qs = std::abs(horner(rat.den, lambda_hat * i / 2000.0));
        qmin = std::min(qmin, qs);
        qmax = std::max(qmax, qs);
    }
    if (qmin < 1e-12 * qmax)
        throw NumericError("fit_rational: denominator has a root in the interval");
    rat.sigma = rational_error(rat, f, 2000);
    return rat;
}

RationalFilter fit_rational_inv(const Filter& filter, Degree degree, double lambda_hat) {
    const int m = filter.inv_pole_order();
    if (m > 0 && (filter.kind == FilterKind::commute_time ||
                  filter.kind == FilterKind::biharmonic || filter.kind == FilterKind::power))
        return RationalFilter::monomial_inverse(m, lambda_hat);
    if (m != 0)
        throw NumericError("fit_rational_inv: 1/rho is singular at 0; fit s^m/rho instead");
    return fit_rational([&filter](double s) { return filter.inv(s); }, degree, lambda_hat);
}

CanonicalRationalFilter to_canonical(const RationalFilter& rat, bool allow_least_squares) {
    const int l = rat.degree_num();
    const int r = rat.degree_den();
    const double b = rat.interval_max;
    const double a = b * 1e-4;
    const int npts = l + r + 1;
    Eigen::MatrixXd V(npts, npts);
    Eigen::VectorXd rhs(npts);
    for (int i = 0; i < npts; ++i) {
        const double x = -std::cos(M_PI * (i + 0.5) / npts);
        const double s = a + (x + 1.0) * 0.5 * (b - a);
        for (int j = 0; j <= l; ++j) V(i, j) = std::pow(s, j);
        for (int j = 1; j <= r; ++j) V(i, l + j) = std::pow(s, -j);
        rhs[i] = rat.evaluate(s);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(npts - 1);
    if (cond > 1e12)
        throw NumericError(
            "to_canonical: interpolation matrix condition number exceeds 1e12; "
            "lower the degree");
    const Eigen::VectorXd c = svd.solve(rhs);

    CanonicalRationalFilter can;
    can.pos.assign(c.data(), c.data() + l + 1);
    can.neg.assign(c.data() + l + 1, c.data() + npts);
    can.interval_max = b;

    // residual on a validation grid
    double res = 0.0, scale = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double s = a + (b - a) * i / 1000.0;
        const double ref = rat.evaluate(s);
        res = std::max(res, std::abs(can.evaluate(s) - ref));
        scale = std::max(scale, std::abs(ref));
    }
    can.residual = scale > 0.0 ? res / scale : res;
    if (can.residual > 1e-8 && !allow_least_squares)
        throw NumericError(
            "to_canonical: rational function is not representable in the canonic basis "
            "(relative residual " +
            std::to_string(can.residual) + "); use the factored-denominator path");
    return can;
}

double rational_error(const RationalFilter& rat, const std::function<double(double)>& f,
                      int grid_size) {
    if (grid_size < 100) throw InputError("rational_error: grid_size must be >= 100");
    double sup = 0.0;
    for (int i = 1; i <= grid_size; ++i) {
        const double s = rat.interval_max * i / grid_size;
        sup = std::max(sup, std::abs(rat.evaluate(s) - f(s)));
    }
    return sup;
}

void to_json(nlohmann::json& j, const RationalFilter& rat) {
    j = nlohmann::json{{"kind", "rational"},
                       {"degree", {rat.degree_num(), rat.degree_den()}},
                       {"interval", {0.0, rat.interval_max}},
                       {"coeffs", {{"num", rat.num}, {"den", rat.den}}},
                       {"sigma", rat.sigma}};
}

void from_json(const nlohmann::json& j, RationalFilter& rat) {
    rat.num = j.at("coeffs").at("num").get<std::vector<double>>();
    rat.den = j.at("coeffs").at("den").get<std::vector<double>>();
    rat.interval_max = j.at("interval").at(1).get<double>();
    rat.sigma = j.value("sigma", 0.0);
}

void to_json(nlohmann::json& j, const CanonicalRationalFilter& can) {
    j = nlohmann::json{{"kind", "canonical"},
                       {"degree", {static_cast<int>(can.pos.size()) - 1,
                                   static_cast<int>(can.neg.size())}},
                       {"interval", {0.0, can.interval_max}},
                       {"coeffs", {{"pos", can.pos}, {"neg", can.neg}}},
                       {"sigma", can.residual}};
}

void from_json(const nlohmann::json& j, CanonicalRationalFilter& can) {
    can.pos = j.at("coeffs").at("pos").get<std::vector<double>>();
    can.neg = j.at("coeffs").at("neg").get<std::vector<double>>();
    can.interval_max = j.at("interval").at(1).get<double>();
    can.residual = j.value("sigma", 0.0);
}

}  // namespace spectral
