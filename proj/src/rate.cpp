#include "lbhom/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lbhom/errors.hpp"
#include "lbhom/quadrature.hpp"

namespace lbhom {

namespace {

constexpr double kQuadTol = 1e-13;

struct Tails {
    double eT, e1, r2, r3;
};

// int_T^inf e^{-lambda t} / t^k dt for k = 1,2,3 via E1 and parts; the E1
// argument is passed in log form so lambda below the underflow threshold
// still evaluates.
Tails tail_integrals(double T, double lambda, double log_lambda) {
    Tails t;
    const double x = lambda * T;
    t.eT = std::exp(-x);
    t.e1 = expint_e1_from_log(log_lambda + std::log(T));
    t.r2 = t.eT / T - lambda * t.e1;
    t.r3 = t.eT / (2.0 * T * T) - 0.5 * lambda * t.r2;
    return t;
}

std::vector<double> laplace_knots(double T, double lambda) {
    std::vector<double> k{0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
    if (lambda > 1.0) {
        for (double c : {1.0, 5.0, 30.0}) k.push_back(c / lambda);
    }
    std::vector<double> out;
    for (double v : k)
        if (v > 0.0 && v < T) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

double laplace_p(const PathDistribution& dist, double lambda, double log_lambda) {
    const double T = dist.t_max();
    const double grid = integrate_segments(
        [&](double t) { return std::exp(-lambda * t) * dist.p(t); }, 0.0, T,
        laplace_knots(T, lambda), kQuadTol);
    const Tails tl = tail_integrals(T, lambda, log_lambda);
    return grid + dist.tail_coefficient() * tl.e1 + dist.tail_b() * tl.r2;
}

double laplace_pdot(const PathDistribution& dist, double lambda,
                    double log_lambda) {
    const double T = dist.t_max();
    const double grid = integrate_segments(
        [&](double t) { return std::exp(-lambda * t) * dist.pdot(t); }, 0.0, T,
        laplace_knots(T, lambda), kQuadTol);
    const Tails tl = tail_integrals(T, lambda, log_lambda);
    return grid - (dist.tail_coefficient() * tl.r2 + 2.0 * dist.tail_b() * tl.r3);
}

double laplace_tp(const PathDistribution& dist, double lambda,
                  double log_lambda) {
    const double T = dist.t_max();
    const double grid = integrate_segments(
        [&](double t) { return t * std::exp(-lambda * t) * dist.p(t); }, 0.0, T,
        laplace_knots(T, lambda), kQuadTol);
    const Tails tl = tail_integrals(T, lambda, log_lambda);
    if (lambda <= 0.0) return std::numeric_limits<double>::infinity();
    return grid + dist.tail_coefficient() * tl.eT / lambda + dist.tail_b() * tl.e1;
}

double laplace_kappa(const PathDistribution& dist, double sigma, double xi) {
    if (!(sigma > 0.0)) throw std::domain_error("laplace_kappa: sigma > 0 required");
    const double lambda = sigma + xi;
    if (!(lambda > 0.0))
        throw std::domain_error("laplace_kappa: xi <= -sigma, integral diverges");
    return sigma * laplace_p(dist, lambda, std::log(lambda));
}

RateResult find_xi(const PathDistribution& dist, double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("find_xi: sigma > 0 required");
    auto L = [&](double u) {
        const double lam = std::exp(u);  // 0 is fine, u carries the value
        return sigma * laplace_p(dist, lam, u);
    };

    // L(log sigma) = int kappa < 1; expand the left edge down in log space
    // until L > 1 brackets the root.
    const double u_hi0 = std::log(sigma);
    double f_hi = L(u_hi0) - 1.0;
    if (!(f_hi < 0.0))
        throw NumericError("find_xi: kernel integral not subcritical", sigma);
    double off = 4.0;
    int expansions = 0;
    double u_lo = u_hi0 - off, f_lo = L(u_lo) - 1.0;
    while (f_lo <= 0.0) {
        off *= 2.0;
        ++expansions;
        if (off > 262144.0)
            throw NumericError("find_xi: bracket expansion failed", sigma);
        u_lo = u_hi0 - off;
        f_lo = L(u_lo) - 1.0;
    }

    double u_hi = u_hi0;
    for (int it = 0; it < 300; ++it) {
        const double um = 0.5 * (u_lo + u_hi);
        const double fm = L(um) - 1.0;
        if (fm > 0.0)
            u_lo = um;
        else
            u_hi = um;
        if (u_hi - u_lo < 1e-14 * std::max(1.0, std::abs(um))) break;
    }
    double u_root = 0.5 * (u_lo + u_hi);
    double residual = std::abs(L(u_root) - 1.0);

    // secant polish if the bisected root is short of the residual contract
    for (int it = 0; it < 20 && residual > 1e-12; ++it) {
        const double f1 = L(u_lo) - 1.0, f2 = L(u_hi) - 1.0;
        if (f1 == f2) break;
        const double u_new = u_lo - f1 * (u_hi - u_lo) / (f2 - f1);
        if (!(u_new > u_lo - 1.0) || !(u_new < u_hi + 1.0)) break;
        const double f_new = L(u_new) - 1.0;
        if (std::abs(f_new) >= residual) break;
        u_root = u_new;
        residual = std::abs(f_new);
        if (f_new > 0.0)
            u_lo = u_new;
        else
            u_hi = u_new;
    }

    RateResult r;
    r.sigma = sigma;
    r.log_lambda = u_root;
    r.lambda = std::exp(u_root);
    r.xi = r.lambda - sigma;
    r.residual = residual;
    r.bracket_expansions = expansions;
    const double denom = laplace_tp(dist, r.lambda, r.log_lambda);
    r.c_multiplier = std::isfinite(denom)
                         ? 1.0 / (2.0 * 3.14159265358979323846 * sigma * denom)
                         : 0.0;
    return r;
}

double c_sigma(const PathDistribution& dist, const RateResult& rate,
               double initial_mass) {
    if (rate.residual > 1e-10)
        throw std::invalid_argument("c_sigma: rate residual above contract");
    const double denom = laplace_tp(dist, rate.lambda, rate.log_lambda);
    if (!std::isfinite(denom)) return 0.0;
    return initial_mass / (2.0 * 3.14159265358979323846 * rate.sigma * denom);
}

double xi_quotient(const PathDistribution& dist, const RateResult& rate) {
    const double num = laplace_pdot(dist, rate.lambda, rate.log_lambda);
    const double den = laplace_p(dist, rate.lambda, rate.log_lambda);
    return num / den;
}

std::vector<RateRow> asymptotic_diagnostics(const PathDistribution& dist,
                                            const std::vector<double>& sigmas) {
    for (size_t i = 1; i < sigmas.size(); ++i)
        if (!(sigmas[i] > sigmas[i - 1]))
            throw std::invalid_argument("asymptotic_diagnostics: sigmas must ascend");
    std::vector<RateRow> rows;
    rows.reserve(sigmas.size());
    for (double s : sigmas) {
        const RateResult r = find_xi(dist, s);
        RateRow row;
        row.sigma = s;
        row.xi = r.xi;
        row.lambda = r.lambda;
        row.log_lambda = r.log_lambda;
        row.lambda_over_sigma = r.lambda / s;
        row.xi_plus_two_abs = std::abs(r.xi + 2.0);
        row.residual = r.residual;
        row.lisa_residual =
            std::abs(s * laplace_p(dist, r.lambda, r.log_lambda) - 1.0);
        row.quotient_gap = std::abs(xi_quotient(dist, r) - r.xi);
        row.c_multiplier = r.c_multiplier;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace lbhom
