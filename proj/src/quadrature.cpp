#include "lbhom/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "lbhom/errors.hpp"

namespace lbhom {

namespace {

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule
// (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct GkResult {
    double integral;
    double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    const double fc = f(c);
    double res_g = fc * kWg[3];
    double res_k = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = hw * kXgk[j];
        const double fsum = f(c - dx) + f(c + dx);
        res_k += kWgk[j] * fsum;
        if (j % 2 == 1) res_g += kWg[j / 2] * fsum;
    }
    return {res_k * hw, std::abs((res_k - res_g) * hw)};
}

}  // namespace

// Globally adaptive: the interval with the largest error estimate is bisected
// until the summed estimates fit the budget (QUADPACK-style strategy).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    struct Seg {
        double a, b;
        GkResult r;
    };
    std::vector<Seg> segs{{a, b, gk15(f, a, b)}};
    const size_t max_segs = static_cast<size_t>(max_depth) * 40;
    while (true) {
        double total_err = 0.0, total = 0.0;
        size_t worst = 0;
        for (size_t i = 0; i < segs.size(); ++i) {
            total_err += segs[i].r.error;
            total += segs[i].r.integral;
            if (segs[i].r.error > segs[worst].r.error) worst = i;
        }
        if (total_err <= abs_tol) return total;
        Seg& w = segs[worst];
        const double width = w.b - w.a;
        if (width <= 1e-14 * (std::abs(w.a) + std::abs(w.b) + 1.0) ||
            segs.size() >= max_segs)
            throw NumericError("adaptive quadrature did not converge", w.a);
        const double mid = 0.5 * (w.a + w.b);
        const Seg right{mid, w.b, gk15(f, mid, w.b)};
        w.r = gk15(f, w.a, mid);
        w.b = mid;
        segs.push_back(right);
    }
}

double integrate_segments(const std::function<double(double)>& f, double a,
                          double b, const std::vector<double>& knots,
                          double abs_tol, int max_depth) {
    std::vector<double> pts{a};
    for (double k : knots)
        if (k > a && k < b) pts.push_back(k);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    const double tol_per = abs_tol / static_cast<double>(pts.size() - 1);
    double total = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        total += integrate(f, pts[i], pts[i + 1], tol_per, max_depth);
    return total;
}

namespace {
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
}

double expint_e1(double x) {
    if (x <= 0.0) throw std::domain_error("expint_e1 requires x > 0");
    if (x <= 1.0) {
        // -gamma - ln x + sum (-1)^{k+1} x^k / (k k!)
        double sum = 0.0, term = 1.0;
        for (int k = 1; k < 40; ++k) {
            term *= -x / k;
            const double add = -term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * (std::abs(sum) + 1.0)) break;
        }
        return -kEulerGamma - std::log(x) + sum;
    }
    // Continued fraction e^-x / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))),
    // evaluated by modified Lentz.
    const double tiny = 1e-300;
    double b = x + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int k = 1; k <= 200; ++k) {
        const double an = -static_cast<double>(k) * k;
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x) * h;
}

double expint_e1_from_log(double log_x) {
    if (log_x > -0.5) return expint_e1(std::exp(log_x));
    // series form is exact here; exp(log_x) may underflow to 0, in which
    // case the power-series correction vanishes too
    const double x = std::exp(log_x);
    double sum = 0.0, term = 1.0;
    for (int k = 1; k < 30 && x > 0.0; ++k) {
        term *= -x / k;
        const double add = -term / k;
        sum += add;
        if (std::abs(add) < 1e-20) break;
    }
    return -kEulerGamma - log_x + sum;
}

}  // namespace lbhom
