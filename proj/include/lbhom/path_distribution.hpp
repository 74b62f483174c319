#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>

#include "lbhom/interp.hpp"

namespace lbhom {

// Density of the limiting free-path law on the square lattice:
//   Upsilon(t) = 24/pi^2                                     for t in (0, 1/2]
//   Upsilon(t) = 24/pi^2 [ 1/(2t) + 2(1-1/(2t))^2 ln(1-1/(2t))
//                          - (1/2)(1-1/t)^2 ln|1-1/t| ]      for t > 1/2
// Direct evaluation produces 0*ln(0) = NaN at t = 1/2, 1 and loses digits to
// cancellation just past them, so inside a window of half-width switch_width
// the logarithmic factors are replaced by truncated expansions in the local
// variable (w = (2t-1)/(2t) near 1/2, tau = t-1 near 1).
struct UpsilonEvaluator {
    double switch_width = 1e-4;

    double operator()(double t) const;
};

constexpr double kUpsilonPlateau = 2.4317084074161065146531071170;  // 24/pi^2

struct QuadratureParams {
    double t_cut = 1e4;     // truncate Upsilon integrals here, analytic beyond
    double abs_tol = 1e-10;
};

// p(t)   = int_t^inf (tau - t) Upsilon(tau) dtau
// pdot(t) = -int_t^inf Upsilon(tau) dtau
// Adaptive quadrature up to t_cut plus an analytic tail with
// Upsilon ~ A_ups / tau^3 (A_ups fitted on [t_cut/2, t_cut]).
double p_of_t(double t, const UpsilonEvaluator& ups = {},
              const QuadratureParams& q = {});
double p_dot(double t, const UpsilonEvaluator& ups = {},
             const QuadratureParams& q = {});

// Fitted coefficient of the Upsilon ~ A/tau^3 quadrature tail.
double upsilon_tail_coefficient(const UpsilonEvaluator& ups,
                                const QuadratureParams& q = {});

// Tabulated p / pdot / Upsilon on a uniform grid with cubic Hermite
// interpolation (exact node derivatives: pdot for p, Upsilon for pdot).
// Beyond t_max the survival probability follows tail_coefficient/t plus a
// 1/t^2 term that makes the model continuous at the junction.
class PathDistribution {
public:
    static PathDistribution tabulate(double t_max, int n_points,
                                     const UpsilonEvaluator& ups = {},
                                     const QuadratureParams& q = {});

    double p(double t) const;
    double pdot(double t) const;
    double upsilon(double t) const { return ups_(t); }

    double t_max() const { return t_max_; }
    double step() const { return step_; }
    double tail_coefficient() const { return tail_a_; }
    double tail_b() const { return tail_b_; }
    int clamped_cells() const {
        return p_interp_.clamped_cells() + pdot_interp_.clamped_cells();
    }

    const Eigen::ArrayXd& grid() const { return grid_; }
    const Eigen::ArrayXd& p_values() const { return p_; }
    const Eigen::ArrayXd& pdot_values() const { return pdot_; }
    const Eigen::ArrayXd& upsilon_values() const { return ups_values_; }
    const UpsilonEvaluator& evaluator() const { return ups_; }
    const QuadratureParams& quadrature() const { return quad_; }

    // columns t,p,pdot,upsilon at full double precision
    void write_csv(std::ostream& os) const;

private:
    PathDistribution() = default;

    double t_max_ = 0.0, step_ = 0.0;
    double tail_a_ = 0.0, tail_b_ = 0.0;
    Eigen::ArrayXd grid_, p_, pdot_, ups_values_;
    HermiteTable p_interp_, pdot_interp_;
    UpsilonEvaluator ups_;
    QuadratureParams quad_;
};

// Shared default tabulation (t_max = 40, h = 0.005); built on first use.
const PathDistribution& default_distribution();

}  // namespace lbhom
