#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "lbhom/path_distribution.hpp"

namespace lbhom {

// kappa(t) = sigma e^{-sigma t} p(t) for t >= 0, zero otherwise.
// Subcritical: int kappa < 1 for every sigma > 0.
struct RenewalKernel {
    double sigma;
    std::shared_ptr<const PathDistribution> distribution;

    RenewalKernel(double sigma_, std::shared_ptr<const PathDistribution> dist);

    double operator()(double t) const;

    // int_0^inf kappa, quadrature over the tabulated p plus analytic tail
    double integral(double abs_tol = 1e-12) const;
    // the same quantity via integration by parts: 1 + int pdot e^{-sigma t}
    double integral_by_parts(double abs_tol = 1e-12) const;
};

// psi on the uniform grid t_k = k h, where psi solves
//   psi = kappa + kappa * psi        (convolution on [0,t])
// The physical mass is  M(t) = scale * psi(t) / (2 pi sigma).
struct MassCurve {
    double step = 0.0;
    double sigma = 0.0;
    double scale = 1.0;  // total initial mass  iint f_in
    Eigen::ArrayXd values;

    double horizon() const {
        return step * static_cast<double>(values.size() - 1);
    }
    double psi(double t) const;             // linear interp between nodes
    double mass(double t) const;            // scale * psi /(2 pi sigma)
    double normalized(double t) const {     // survival fraction M(t)/M(0+)
        return psi(t) / sigma;
    }
};

// Product-trapezoidal forward march. Throws ConfigError when h >= 1/sigma
// (kernel under-resolved).
MassCurve solve_volterra(const RenewalKernel& kernel, double h, double T);

// Partial sum sum_{n=1..n_max} kappa^{*n} with the same trapezoidal
// discrete convolution (FFT-accelerated; matches the direct form to
// roundoff). Pointwise nondecreasing in n_max.
MassCurve convolution_powers(const RenewalKernel& kernel, int n_max, double h,
                             double T);

// Direct O(K^2) trapezoidal discrete convolution, the reference the FFT path
// is tested against.
Eigen::ArrayXd convolve_trapezoid_direct(const Eigen::ArrayXd& a,
                                         const Eigen::ArrayXd& b, double h);

// Age-structured density mu(t,s):
//   mu(t,s) = 1_{t<s} Pi(s-t) e^{-sigma t} p(t)
//           + 1_{s<t} sigma e^{-sigma s} p(s) I(t-s),   I(t) = int mu(t,s) ds
// marched on a uniform grid in t and s (same step). Only a strided window of
// the (t,s) values is stored; the fine-grid marginal I and boundary
// mu(t,0) = sigma I(t) are kept in full.
struct AgeDensityGrid {
    double step = 0.0;
    double sigma = 0.0;
    double s_max = 0.0;
    Eigen::ArrayXd marginal;   // I_k = int mu(t_k, s) ds on the fine t grid
    Eigen::ArrayXd boundary;   // mu(t_k, 0)
    Eigen::ArrayXd t_coarse, s_coarse;
    Eigen::ArrayXXd values;    // values(i,j) = mu(t_coarse[i], s_coarse[j])
    bool upper_bound_ok = true;
    double max_bound_ratio = 0.0;  // max mu / (sigma e^{sigma T} e^{-sigma s})
};

using AgePdf = std::function<double(double)>;

AgeDensityGrid mu_solver(const RenewalKernel& kernel, double h, double T,
                         const AgePdf& initial_age = {},  // default Exp(sigma)
                         int coarse_stride_t = 0, int coarse_stride_s = 0);

// B(t,s) = sigma - (pdot/p)(min(t,s)); always >= sigma.
double b_coefficient(double t, double s, const PathDistribution& dist,
                     double sigma);

// m(t,s) for the exponential initial age profile, expressed through psi:
//   1_{s<t} p(s) sigma e^{-sigma s} psi(t-s)/sigma * scale/(2 pi)
// + 1_{t<s} p(t) sigma e^{-sigma s} * scale/(2 pi)
double age_density_closed_form(double t, double s, const MassCurve& curve,
                               const PathDistribution& dist);

}  // namespace lbhom
