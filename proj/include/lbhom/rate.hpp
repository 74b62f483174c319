#pragma once

#include <vector>

#include "lbhom/path_distribution.hpp"

namespace lbhom {

// Root of the Laplace condition  sigma int_0^inf e^{-(sigma+xi) t} p(t) dt = 1.
// The root is parameterized by lambda = sigma + xi in (0, sigma); for small
// sigma, lambda is exponentially small (it behaves like exp(-(1/sigma-c)/A)
// with A = 1/pi^2), so the solve runs in u = log(lambda) and log_lambda is
// the authoritative value; lambda itself may underflow to 0 in double.
struct RateResult {
    double sigma = 0.0;
    double xi = 0.0;           // lambda - sigma (rounds to -sigma when tiny)
    double lambda = 0.0;
    double log_lambda = 0.0;
    double c_multiplier = 0.0; // C_sigma per unit initial mass
    double residual = 0.0;     // |L[kappa](xi) - 1|
    int bracket_expansions = 0;
};

// L[kappa](xi) = sigma int e^{-(sigma+xi) t} p(t) dt; strictly decreasing in
// xi. Throws std::domain_error for xi <= -sigma (the integral diverges).
double laplace_kappa(const PathDistribution& dist, double sigma, double xi);

// Laplace transforms over the tabulated p with the analytic 1/t-tail;
// lambda may be 0 if log_lambda identifies it.
double laplace_p(const PathDistribution& dist, double lambda, double log_lambda);
double laplace_pdot(const PathDistribution& dist, double lambda, double log_lambda);
double laplace_tp(const PathDistribution& dist, double lambda, double log_lambda);

RateResult find_xi(const PathDistribution& dist, double sigma);

// C_sigma = initial_mass / (2 pi sigma int t p(t) e^{-lambda t} dt).
double c_sigma(const PathDistribution& dist, const RateResult& rate,
               double initial_mass);

// Independent reproduction of xi through the quotient
//   int e^{-t} pdot(t/lambda) dt / int e^{-t} p(t/lambda) dt
// evaluated in the lambda domain (exact substitution t -> lambda t).
double xi_quotient(const PathDistribution& dist, const RateResult& rate);

struct RateRow {
    double sigma, xi, lambda, log_lambda;
    double lambda_over_sigma;
    double xi_plus_two_abs;
    double residual;       // solver residual |L-1|
    double lisa_residual;  // |sigma int e^{-lambda t} p - 1|, recomputed
    double quotient_gap;   // |xi_quotient - xi|
    double c_multiplier;
};

// One row per sigma (input must be sorted ascending).
std::vector<RateRow> asymptotic_diagnostics(const PathDistribution& dist,
                                            const std::vector<double>& sigmas);

}  // namespace lbhom
