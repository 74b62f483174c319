#include "lbhom/renewal.hpp"

#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "lbhom/errors.hpp"
#include "lbhom/quadrature.hpp"

namespace lbhom {

RenewalKernel::RenewalKernel(double sigma_,
                             std::shared_ptr<const PathDistribution> dist)
    : sigma(sigma_), distribution(std::move(dist)) {
    if (!(sigma > 0.0)) throw ConfigError("RenewalKernel: sigma must be positive");
    if (!distribution) throw ConfigError("RenewalKernel: missing distribution");
}

double RenewalKernel::operator()(double t) const {
    if (t < 0.0) return 0.0;
    return sigma * std::exp(-sigma * t) * distribution->p(t);
}

namespace {

std::vector<double> kernel_knots(double hi) {
    std::vector<double> k;
    for (double v : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0})
        if (v < hi) k.push_back(v);
    return k;
}

}  // namespace

double RenewalKernel::integral(double abs_tol) const {
    const auto& d = *distribution;
    const double T = d.t_max();
    const double grid = integrate_segments(
        [&](double t) { return sigma * std::exp(-sigma * t) * d.p(t); }, 0.0, T,
        kernel_knots(T), abs_tol);
    const double x = sigma * T;
    const double e1 = expint_e1(x);
    const double r2 = std::exp(-x) / T - sigma * e1;
    return grid + sigma * (d.tail_coefficient() * e1 + d.tail_b() * r2);
}

double RenewalKernel::integral_by_parts(double abs_tol) const {
    const auto& d = *distribution;
    const double T = d.t_max();
    const double grid = integrate_segments(
        [&](double t) { return std::exp(-sigma * t) * d.pdot(t); }, 0.0, T,
        kernel_knots(T), abs_tol);
    const double x = sigma * T;
    const double e1 = expint_e1(x);
    const double r2 = std::exp(-x) / T - sigma * e1;
    const double r3 = std::exp(-x) / (2.0 * T * T) - 0.5 * sigma * r2;
    return 1.0 + grid - (d.tail_coefficient() * r2 + 2.0 * d.tail_b() * r3);
}

double MassCurve::psi(double t) const {
    if (t < 0.0) throw std::out_of_range("MassCurve::psi: t < 0");
    const double s = t / step;
    Eigen::Index i = static_cast<Eigen::Index>(std::floor(s));
    if (i >= values.size() - 1) {
        if (t > horizon() * (1.0 + 1e-12))
            throw std::out_of_range("MassCurve::psi: t beyond horizon");
        return values[values.size() - 1];
    }
    const double x = s - static_cast<double>(i);
    return (1.0 - x) * values[i] + x * values[i + 1];
}

double MassCurve::mass(double t) const {
    return scale * psi(t) / (2.0 * 3.14159265358979323846 * sigma);
}

MassCurve solve_volterra(const RenewalKernel& kernel, double h, double T) {
    if (!(h > 0.0) || T < h) throw ConfigError("solve_volterra: need h > 0, T >= h");
    if (h >= 1.0 / kernel.sigma)
        throw ConfigError("solve_volterra: h >= 1/sigma, kernel under-resolved");
    const auto K = static_cast<Eigen::Index>(std::ceil(T / h - 1e-9));
    Eigen::ArrayXd kap(K + 1);
    for (Eigen::Index k = 0; k <= K; ++k) kap[k] = kernel(h * static_cast<double>(k));

    Eigen::ArrayXd psi(K + 1);
    psi[0] = kap[0];
    const double denom = 1.0 - 0.5 * h * kap[0];
    for (Eigen::Index k = 1; k <= K; ++k) {
        double conv = 0.0;
        const double* kp = kap.data();
        const double* pp = psi.data();
        for (Eigen::Index j = 1; j < k; ++j) conv += kp[j] * pp[k - j];
        const double rhs = kap[k] * (1.0 + 0.5 * h * psi[0]) + h * conv;
        psi[k] = rhs / denom;
    }

    MassCurve curve;
    curve.step = h;
    curve.sigma = kernel.sigma;
    curve.values = std::move(psi);
    return curve;
}

Eigen::ArrayXd convolve_trapezoid_direct(const Eigen::ArrayXd& a,
                                         const Eigen::ArrayXd& b, double h) {
    const Eigen::Index n = a.size();
    if (b.size() != n) throw std::invalid_argument("convolve: size mismatch");
    Eigen::ArrayXd out(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double s = 0.0;
        for (Eigen::Index j = 0; j <= k; ++j) s += a[j] * b[k - j];
        out[k] = h * (s - 0.5 * a[0] * b[k] - 0.5 * a[k] * b[0]);
        if (out[k] < 0.0) out[k] = 0.0;
    }
    return out;
}

namespace {

class FftConvolver {
public:
    FftConvolver(const Eigen::ArrayXd& kernel, double h)
        : n_(kernel.size()), h_(h), kernel_(kernel) {
        size_t nfft = 1;
        while (nfft < 2 * static_cast<size_t>(n_)) nfft <<= 1;
        nfft_ = nfft;
        std::vector<double> padded(nfft_, 0.0);
        for (Eigen::Index i = 0; i < n_; ++i) padded[i] = kernel[i];
        fft_.fwd(kernel_freq_, padded);
    }

    // trapezoid-weighted convolution with the fixed kernel, truncated to the
    // original grid; identical (to roundoff) to convolve_trapezoid_direct
    Eigen::ArrayXd apply(const Eigen::ArrayXd& c) {
        std::vector<double> padded(nfft_, 0.0);
        for (Eigen::Index i = 0; i < n_; ++i) padded[i] = c[i];
        std::vector<std::complex<double>> freq;
        fft_.fwd(freq, padded);
        for (size_t i = 0; i < nfft_; ++i) freq[i] *= kernel_freq_[i];
        std::vector<double> full;
        fft_.inv(full, freq);
        Eigen::ArrayXd out(n_);
        for (Eigen::Index k = 0; k < n_; ++k) {
            double v = h_ * (full[k] - 0.5 * kernel_[0] * c[k] - 0.5 * kernel_[k] * c[0]);
            out[k] = (v < 0.0) ? 0.0 : v;
        }
        return out;
    }

private:
    Eigen::Index n_;
    double h_;
    size_t nfft_ = 0;
    Eigen::ArrayXd kernel_;
    Eigen::FFT<double> fft_;
    std::vector<std::complex<double>> kernel_freq_;
};

}  // namespace

MassCurve convolution_powers(const RenewalKernel& kernel, int n_max, double h,
                             double T) {
    if (n_max < 1) throw ConfigError("convolution_powers: n_max >= 1 required");
    if (!(h > 0.0) || T < h) throw ConfigError("convolution_powers: need h > 0, T >= h");
    const auto K = static_cast<Eigen::Index>(std::ceil(T / h - 1e-9));
    Eigen::ArrayXd kap(K + 1);
    for (Eigen::Index k = 0; k <= K; ++k) kap[k] = kernel(h * static_cast<double>(k));

    FftConvolver conv(kap, h);
    Eigen::ArrayXd term = kap;   // kappa^{*1}
    Eigen::ArrayXd sum = term;
    for (int n = 2; n <= n_max; ++n) {
        term = conv.apply(term);
        sum += term;
    }

    MassCurve curve;
    curve.step = h;
    curve.sigma = kernel.sigma;
    curve.values = std::move(sum);
    return curve;
}

AgeDensityGrid mu_solver(const RenewalKernel& kernel, double h, double T,
                         const AgePdf& initial_age, int coarse_stride_t,
                         int coarse_stride_s) {
    if (!(h > 0.0) || T < h) throw ConfigError("mu_solver: need h > 0, T >= h");
    const double sigma = kernel.sigma;
    const auto& dist = *kernel.distribution;
    AgePdf pi = initial_age;
    if (!pi) pi = [sigma](double s) { return sigma * std::exp(-sigma * s); };

    const auto K = static_cast<Eigen::Index>(std::ceil(T / h - 1e-9));
    const double s_max = T + 20.0 / sigma;
    const auto Ks = static_cast<Eigen::Index>(std::llround(s_max / h));

    // node tables: w[j] = sigma e^{-sigma s_j} p(s_j) on the renewal branch,
    // f[k] = e^{-sigma t_k} p(t_k) transporting the initial profile
    Eigen::ArrayXd w(K + 1), f(K + 1), piv(Ks + 1);
    for (Eigen::Index j = 0; j <= K; ++j) {
        const double t = h * static_cast<double>(j);
        const double p = dist.p(t);
        w[j] = sigma * std::exp(-sigma * t) * p;
        f[j] = std::exp(-sigma * t) * p;
    }
    double pi_sup_ratio = 0.0;  // sup Pi(x) e^{sigma x} / sigma
    for (Eigen::Index m = 0; m <= Ks; ++m) {
        const double x = h * static_cast<double>(m);
        piv[m] = pi(x);
        if (piv[m] < 0.0) throw ConfigError("mu_solver: initial age density < 0");
        pi_sup_ratio = std::max(pi_sup_ratio, piv[m] * std::exp(sigma * x) / sigma);
    }
    // prefix[m] = sum_{i=1..m} Pi(i h)
    Eigen::ArrayXd prefix(Ks + 1);
    prefix[0] = 0.0;
    for (Eigen::Index m = 1; m <= Ks; ++m) prefix[m] = prefix[m - 1] + piv[m];

    AgeDensityGrid grid;
    grid.step = h;
    grid.sigma = sigma;
    grid.s_max = s_max;
    grid.marginal.resize(K + 1);
    grid.boundary.resize(K + 1);

    // I_0 = trapezoid of the initial profile
    grid.marginal[0] = h * (0.5 * piv[0] + prefix[Ks - 1] + 0.5 * piv[Ks]);
    grid.boundary[0] = sigma * grid.marginal[0];

    // The density can jump across the diagonal s = t (it does for any
    // initial profile with Pi(0) != sigma), so the s-trapezoid is split
    // there: one panel chain over [0, t_k], one over [t_k, s_max].
    const double denom = 1.0 - 0.5 * h * sigma;  // j=0 trapezoid term carries I_k
    double max_marginal = grid.marginal[0];
    for (Eigen::Index k = 1; k <= K; ++k) {
        const double* wp = w.data();
        const double* ip = grid.marginal.data();
        double renewal = 0.0;
        for (Eigen::Index j = 1; j < k; ++j) renewal += wp[j] * ip[k - j];
        renewal += 0.5 * wp[k] * ip[0];
        // ages beyond t_k: transported initial profile over [t_k, s_max]
        const double init_sum =
            0.5 * piv[0] + prefix[Ks - k - 1] + 0.5 * piv[Ks - k];
        const double rhs = renewal + f[k] * init_sum;
        grid.marginal[k] = h * rhs / denom;
        grid.boundary[k] = sigma * grid.marginal[k];
        max_marginal = std::max(max_marginal, grid.marginal[k]);
    }

    const double bound = std::exp(sigma * T);
    grid.max_bound_ratio = std::max(max_marginal / bound, pi_sup_ratio / bound);
    grid.upper_bound_ok = grid.max_bound_ratio <= 1.0 + 1e-9;

    // strided window of the full field for export/tests
    int st = coarse_stride_t > 0 ? coarse_stride_t
                                 : std::max<int>(1, static_cast<int>(K / 200));
    int ss = coarse_stride_s > 0 ? coarse_stride_s
                                 : std::max<int>(1, static_cast<int>(Ks / 600));
    std::vector<Eigen::Index> ti, sj;
    for (Eigen::Index k = 0; k <= K; k += st) ti.push_back(k);
    for (Eigen::Index j = 0; j <= Ks; j += ss) sj.push_back(j);
    grid.t_coarse.resize(static_cast<Eigen::Index>(ti.size()));
    grid.s_coarse.resize(static_cast<Eigen::Index>(sj.size()));
    grid.values.resize(static_cast<Eigen::Index>(ti.size()),
                       static_cast<Eigen::Index>(sj.size()));
    for (size_t a = 0; a < ti.size(); ++a) {
        const Eigen::Index k = ti[a];
        grid.t_coarse[static_cast<Eigen::Index>(a)] = h * static_cast<double>(k);
        for (size_t b = 0; b < sj.size(); ++b) {
            const Eigen::Index j = sj[b];
            if (a == 0) grid.s_coarse[static_cast<Eigen::Index>(b)] = h * static_cast<double>(j);
            double v;
            if (j <= k) {
                v = (j <= K ? w[j] : 0.0) * grid.marginal[k - j];
            } else {
                v = piv[j - k] * f[k];
            }
            grid.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
        }
    }
    return grid;
}

double b_coefficient(double t, double s, const PathDistribution& dist,
                     double sigma) {
    if (t < 0.0 || s < 0.0) throw std::domain_error("b_coefficient: t,s >= 0");
    const double m = std::min(t, s);
    return sigma - dist.pdot(m) / dist.p(m);
}

double age_density_closed_form(double t, double s, const MassCurve& curve,
                               const PathDistribution& dist) {
    if (t < 0.0 || s < 0.0)
        throw std::domain_error("age_density_closed_form: t,s >= 0");
    if (t > curve.horizon() * (1.0 + 1e-12))
        throw std::out_of_range("age_density_closed_form: t beyond mass-curve horizon");
    const double sigma = curve.sigma;
    const double pref = curve.scale / (2.0 * 3.14159265358979323846);
    if (s < t)
        return pref * dist.p(s) * sigma * std::exp(-sigma * s) *
               curve.psi(t - s) / sigma;
    return pref * dist.p(t) * sigma * std::exp(-sigma * s);
}

}  // namespace lbhom
