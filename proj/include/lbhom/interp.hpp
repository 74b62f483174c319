#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace lbhom {

// Piecewise-cubic Hermite interpolant on a uniform grid, built from exact
// node values and exact node derivatives. A Fritsch-Carlson safeguard clamps
// derivatives in cells where the cubic would overshoot the node values; for
// the curves handled here (convex, monotone, well resolved) it never fires,
// and the trigger count is exposed so tests can assert that.
class HermiteTable {
public:
    HermiteTable() = default;
    HermiteTable(double t0, double step, Eigen::ArrayXd values,
                 Eigen::ArrayXd derivs)
        : t0_(t0), h_(step), f_(std::move(values)), d_(std::move(derivs)) {
        if (f_.size() != d_.size() || f_.size() < 2)
            throw std::invalid_argument("HermiteTable: bad table sizes");
        // limit only cells whose data is locally monotone (both derivatives
        // agree in sign with the secant); elsewhere the cubic is left alone
        for (Eigen::Index i = 0; i + 1 < f_.size(); ++i) {
            const double delta = (f_[i + 1] - f_[i]) / h_;
            if (delta == 0.0) continue;
            const double alpha = d_[i] / delta, beta = d_[i + 1] / delta;
            if (alpha < 0.0 || beta < 0.0) continue;
            if (alpha * alpha + beta * beta > 9.0) {
                const double tau = 3.0 / std::sqrt(alpha * alpha + beta * beta);
                d_[i] *= tau;
                d_[i + 1] *= tau;
                ++clamped_;
            }
        }
    }

    double operator()(double t) const {
        const double s = (t - t0_) / h_;
        Eigen::Index i = static_cast<Eigen::Index>(std::floor(s));
        if (i < 0) i = 0;
        if (i > f_.size() - 2) i = f_.size() - 2;
        const double x = s - static_cast<double>(i);  // in [0,1]
        const double x2 = x * x, x3 = x2 * x;
        const double h00 = 2 * x3 - 3 * x2 + 1;
        const double h10 = x3 - 2 * x2 + x;
        const double h01 = -2 * x3 + 3 * x2;
        const double h11 = x3 - x2;
        return h00 * f_[i] + h_ * h10 * d_[i] + h01 * f_[i + 1] +
               h_ * h11 * d_[i + 1];
    }

    double t_min() const { return t0_; }
    double t_max() const { return t0_ + h_ * static_cast<double>(f_.size() - 1); }
    int clamped_cells() const { return clamped_; }

private:
    double t0_ = 0.0;
    double h_ = 1.0;
    Eigen::ArrayXd f_;
    Eigen::ArrayXd d_;
    int clamped_ = 0;
};

}  // namespace lbhom
