#include "lbhom/path_distribution.hpp"

#include <cmath>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "lbhom/errors.hpp"
#include "lbhom/io.hpp"
#include "lbhom/quadrature.hpp"

namespace lbhom {

double UpsilonEvaluator::operator()(double t) const {
    if (t <= 0.0) throw std::domain_error("Upsilon: t must be positive");
    if (t <= 0.5) return kUpsilonPlateau;

    // w = 1 - 1/(2t) and u = 1 - 1/t, formed so the subtractions stay exact
    // near the switch points (2t-1 and t-1 are exact there).
    const double w = (2.0 * t - 1.0) / (2.0 * t);
    const double u = (t - 1.0) / t;

    if (t - 0.5 <= switch_width) {
        // expansion in w: 1 + 2 w^2 ln w - 3 w^2 + (4/3) w^3 + (2/3) w^4 + (8/15) w^5
        const double wlog = (w > 0.0) ? 2.0 * w * w * std::log(w) : 0.0;
        const double poly =
            1.0 + w * w * (-3.0 + w * (4.0 / 3.0 + w * (2.0 / 3.0 + w * (8.0 / 15.0))));
        return kUpsilonPlateau * (poly + wlog);
    }
    if (std::abs(t - 1.0) <= switch_width) {
        // split off the ln|t-1| factor: smooth part evaluated directly, the
        // singular coefficient -(1/2)(tau/t)^2 expanded as a series in tau
        const double tau = t - 1.0;
        const double smooth = 1.0 / (2.0 * t) + 2.0 * w * w * std::log(w) +
                              0.5 * (tau / t) * (tau / t) * std::log(t);
        const double b = -0.5 * tau * tau * (1.0 + tau * (-2.0 + tau * (3.0 - 4.0 * tau)));
        const double sing = (tau != 0.0) ? b * std::log(std::abs(tau)) : 0.0;
        return kUpsilonPlateau * (smooth + sing);
    }
    if (t >= 10.0) {
        // the closed form cancels to O(1/t^3) between O(1/t) terms; the
        // expansion in 1/t avoids that loss entirely
        const double v = 1.0 / t;
        static constexpr double c[] = {
            1.0 / 12, 1.0 / 32, 7.0 / 480, 1.0 / 128, 31.0 / 6720, 3.0 / 1024,
            127.0 / 64512, 17.0 / 12288, 511.0 / 506880, 31.0 / 40960,
            2047.0 / 3514368};
        double acc = 0.0;
        for (int k = 10; k >= 0; --k) acc = (acc + c[k]) * v;
        return kUpsilonPlateau * acc * v * v;
    }
    // the logs are taken in whichever form keeps full relative accuracy:
    // arguments near 1 go through log1p, small arguments through the exact
    // Sterbenz differences 2t-1 and t-1
    const double log_w = (w < 0.5) ? std::log(w) : std::log1p(-0.5 / t);
    const double log_u =
        (t > 1.5) ? std::log1p(-1.0 / t) : std::log(std::abs(t - 1.0) / t);
    return kUpsilonPlateau *
           (0.5 / t + 2.0 * w * w * log_w - 0.5 * u * u * log_u);
}

namespace {

std::vector<double> integration_knots(double lo, double hi) {
    std::vector<double> knots;
    for (double k : {0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0, 300.0, 1000.0, 3000.0})
        if (k > lo && k < hi) knots.push_back(k);
    return knots;
}

double fit_upsilon_tail(const UpsilonEvaluator& ups, double t_cut) {
    // least-squares constant for tau^3 * Upsilon(tau) on [t_cut/2, t_cut]
    const int n = 65;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double tau = 0.5 * t_cut * std::pow(2.0, static_cast<double>(i) / (n - 1));
        acc += tau * tau * tau * ups(tau);
    }
    return acc / n;
}

struct TailCache {
    double a = 0.0;
    double t_cut = 0.0;
    double switch_width = 0.0;
};

double upsilon_tail_a(const UpsilonEvaluator& ups, const QuadratureParams& q) {
    static TailCache cache;
    static std::mutex m;
    std::lock_guard<std::mutex> lock(m);
    if (cache.t_cut != q.t_cut || cache.switch_width != ups.switch_width) {
        cache.a = fit_upsilon_tail(ups, q.t_cut);
        cache.t_cut = q.t_cut;
        cache.switch_width = ups.switch_width;
    }
    return cache.a;
}

}  // namespace

double upsilon_tail_coefficient(const UpsilonEvaluator& ups,
                                const QuadratureParams& q) {
    return upsilon_tail_a(ups, q);
}

double p_of_t(double t, const UpsilonEvaluator& ups, const QuadratureParams& q) {
    if (t < 0.0) throw std::domain_error("p_of_t: t must be nonnegative");
    const double a = upsilon_tail_a(ups, q);
    if (t >= q.t_cut) return 0.5 * a / t;
    // int_T^inf (tau - t) a/tau^3 dtau = a (1/T - t/(2 T^2))
    const double tail = a * (1.0 / q.t_cut - 0.5 * t / (q.t_cut * q.t_cut));
    const double core = integrate_segments(
        [&](double tau) { return (tau - t) * ups(tau); }, t, q.t_cut,
        integration_knots(t, q.t_cut), q.abs_tol);
    // p(0) = 1 exactly; quadrature bias must not push past the bound
    return std::min(core + tail, 1.0);
}

double p_dot(double t, const UpsilonEvaluator& ups, const QuadratureParams& q) {
    if (t < 0.0) throw std::domain_error("p_dot: t must be nonnegative");
    const double a = upsilon_tail_a(ups, q);
    if (t >= q.t_cut) return -0.5 * a / (t * t);
    const double tail = 0.5 * a / (q.t_cut * q.t_cut);
    const double core = integrate_segments([&](double tau) { return ups(tau); },
                                           t, q.t_cut,
                                           integration_knots(t, q.t_cut), q.abs_tol);
    return -(core + tail);
}

PathDistribution PathDistribution::tabulate(double t_max, int n_points,
                                            const UpsilonEvaluator& ups,
                                            const QuadratureParams& q) {
    if (t_max <= 0.0 || n_points < 2)
        throw std::invalid_argument("tabulate: need t_max > 0 and n_points >= 2");
    if (t_max >= q.t_cut)
        throw std::invalid_argument("tabulate: t_max must lie below t_cut");

    PathDistribution d;
    d.ups_ = ups;
    d.quad_ = q;
    d.t_max_ = t_max;
    d.step_ = t_max / static_cast<double>(n_points - 1);
    d.grid_ = Eigen::ArrayXd::LinSpaced(n_points, 0.0, t_max);
    d.p_.resize(n_points);
    d.pdot_.resize(n_points);
    d.ups_values_.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double t = d.grid_[i];
        d.p_[i] = p_of_t(t, ups, q);
        d.pdot_[i] = p_dot(t, ups, q);
        d.ups_values_[i] = (t > 0.0) ? ups(t) : kUpsilonPlateau;
    }
    d.p_interp_ = HermiteTable(0.0, d.step_, d.p_, d.pdot_);
    d.pdot_interp_ = HermiteTable(0.0, d.step_, d.pdot_, d.ups_values_);

    // t*p(t) fit on [50,100] for the 1/t survival tail; 1/t^2 term keeps the
    // model continuous where it takes over from the table
    {
        const int n = 33;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = 50.0 + 50.0 * i / (n - 1);
            acc += t * p_of_t(t, ups, q);
        }
        d.tail_a_ = acc / n;
        d.tail_b_ = t_max * t_max * (d.p_[n_points - 1] - d.tail_a_ / t_max);
    }
    return d;
}

double PathDistribution::p(double t) const {
    if (t < 0.0) throw std::domain_error("PathDistribution::p: t < 0");
    if (t <= t_max_) return p_interp_(t);
    if (t >= quad_.t_cut) return 0.5 * upsilon_tail_a(ups_, quad_) / t;
    return tail_a_ / t + tail_b_ / (t * t);
}

double PathDistribution::pdot(double t) const {
    if (t < 0.0) throw std::domain_error("PathDistribution::pdot: t < 0");
    if (t <= t_max_) return pdot_interp_(t);
    if (t >= quad_.t_cut) return -0.5 * upsilon_tail_a(ups_, quad_) / (t * t);
    return -tail_a_ / (t * t) - 2.0 * tail_b_ / (t * t * t);
}

void PathDistribution::write_csv(std::ostream& os) const {
    os << "t,p,pdot,upsilon\n";
    for (Eigen::Index i = 0; i < grid_.size(); ++i) {
        os << format_full(grid_[i]) << ',' << format_full(p_[i]) << ','
           << format_full(pdot_[i]) << ',' << format_full(ups_values_[i]) << '\n';
    }
}

const PathDistribution& default_distribution() {
    static const PathDistribution dist = PathDistribution::tabulate(40.0, 8001);
    return dist;
}

}  // namespace lbhom
