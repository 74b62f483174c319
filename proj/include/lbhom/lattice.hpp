#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "lbhom/path_distribution.hpp"

namespace lbhom {

// Perforated plane: disks of radius hole_radius at the points of the
// epsilon-spaced square lattice. All lengths macroscopic; the traversal
// itself runs in rescaled coordinates y = x/epsilon where the lattice has
// unit spacing and the disks radius hole_radius/epsilon.
struct LatticeConfig {
    double epsilon;
    double hole_radius;   // must satisfy 0 < hole_radius < epsilon/2
    double t_cap = 100.0; // macroscopic truncation of traced paths

    static LatticeConfig with_default_radius(double epsilon, double t_cap = 100.0) {
        return LatticeConfig{epsilon, epsilon * epsilon, t_cap};
    }
    void validate() const;
    double scaled_radius() const { return hole_radius / epsilon; }
};

struct FreePathSample {
    Eigen::Vector2d start_position;  // macroscopic, inside the fundamental cell
    double direction;                // angle
    double path_length;              // macroscopic; t_cap when nothing was hit
};

// Exact distance from x along unit vector v to the first hole boundary
// (macroscopic units), or config.t_cap if none is hit within the cap.
// Integer-grid cell traversal with ray/disk tests in the 3x3 neighborhood of
// every visited cell; no marching.
double free_path(const Eigen::Vector2d& x, const Eigen::Vector2d& v,
                 const LatticeConfig& config);

// Same computation in rescaled coordinates: unit lattice, disk radius rho,
// cap in y-units. Returns cap_y when no hole is hit. Used by the transport
// simulator as well.
double free_path_scaled(const Eigen::Vector2d& y, const Eigen::Vector2d& v,
                        double rho, double cap_y);

struct EmpiricalTail {
    Eigen::ArrayXd t;        // evaluation grid (macroscopic)
    Eigen::ArrayXd phi_hat;  // fraction of samples with free path > t
    std::int64_t n = 0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
};

// n free-path draws: start uniform on the fundamental cell minus the hole
// (rejection), direction uniform on the circle. Deterministic for a fixed
// seed, independent of thread count.
EmpiricalTail sample_empirical(const LatticeConfig& config, std::int64_t n,
                               std::uint64_t seed, const Eigen::ArrayXd& t_grid,
                               int threads = 0);

// Single draw, exposed for the distribution tests.
FreePathSample draw_sample(const LatticeConfig& config, std::uint64_t seed,
                           std::uint64_t index);

// sup over the grid points of |phi_hat - p| restricted to [t_lo, t_hi]
double ks_distance(const EmpiricalTail& tail, const PathDistribution& dist,
                   double t_lo, double t_hi);

}  // namespace lbhom
