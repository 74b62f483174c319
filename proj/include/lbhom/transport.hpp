#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lbhom/lattice.hpp"
#include "lbhom/rng.hpp"

namespace lbhom {

// Scattering transition density on the circle, (1/2pi) int k(v,w) dw = 1.
// Isotropic is k = 1; PolynomialCosine is k = c (1 + (v.w)^2) with c fixed
// numerically at construction so the normalization holds to 1e-12.
class ScatterKernel {
public:
    enum class Kind { Isotropic, PolynomialCosine };

    static ScatterKernel isotropic() { return ScatterKernel(Kind::Isotropic); }
    static ScatterKernel polynomial_cosine() {
        return ScatterKernel(Kind::PolynomialCosine);
    }

    Kind kind() const { return kind_; }
    double normalization() const { return c_; }
    // density of the outgoing-incoming angle difference, k(theta)/2pi
    double density(double relative_angle) const;
    double sample(double incoming_angle, Rng& rng) const;

private:
    explicit ScatterKernel(Kind kind);
    Kind kind_;
    double c_ = 1.0;
};

enum class AgeInit { ExpSigma, Zero };

struct SimConfig {
    double sigma = 1.0;           // collision frequency; 0 = collisionless
    LatticeConfig lattice{1e-2, 1e-4, 100.0};
    std::int64_t n_particles = 100000;
    double horizon = 10.0;
    int grid_points = 201;        // survival curve resolution on [0,horizon]
    ScatterKernel kernel = ScatterKernel::isotropic();
    AgeInit age_init = AgeInit::ExpSigma;
    std::vector<double> checkpoints;  // times for age histograms
    int age_bins = 60;
    double age_s_max = 0.0;       // 0 = auto (horizon/2 + 5/sigma)
    bool box_mode = false;        // compactly supported start instead of torus
    double box_size = 1.0;        // macroscopic box side, box_mode only

    void validate() const;
};

struct SurvivalCurve {
    Eigen::ArrayXd t;
    Eigen::ArrayXd survival;      // nonincreasing, starts at 1
    Eigen::ArrayXd stderr_;       // binomial
    std::vector<std::int64_t> surviving_counts;
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    SimConfig config;
};

struct AgeHistogram {
    double t_checkpoint = 0.0;
    Eigen::ArrayXd s_centers;
    Eigen::ArrayXd density;       // normalized over the recorded range
    std::vector<std::int64_t> counts;
    std::int64_t alive = 0;
};

struct SimResult {
    SurvivalCurve curve;
    std::vector<AgeHistogram> ages;
};

// Exact-geometry Monte Carlo: straight flight at speed 1, scattering at rate
// sigma, absorption on the first hole boundary. Deterministic for a fixed
// seed and independent of the thread count (per-particle counter streams,
// integer tallies).
SimResult simulate(const SimConfig& config, std::uint64_t seed, int threads = 0);

struct RateFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    int points = 0;
};

// Least-squares slope of log(survival) on [w_lo, w_hi]. Requires >= 100
// survivors at every grid point in the window (StatisticsError otherwise).
RateFit fit_rate(const SurvivalCurve& curve, double w_lo, double w_hi);

// Same fit for a synthetic curve (used by tests and the compare tooling).
RateFit fit_log_slope(const Eigen::ArrayXd& t, const Eigen::ArrayXd& values,
                      double w_lo, double w_hi);

}  // namespace lbhom
