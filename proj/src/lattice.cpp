#include "lbhom/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "lbhom/errors.hpp"
#include "lbhom/rng.hpp"

namespace lbhom {

void LatticeConfig::validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("lattice: epsilon must be positive");
    if (!(hole_radius > 0.0) || !(hole_radius < 0.5 * epsilon))
        throw ConfigError("lattice: need 0 < hole_radius < epsilon/2");
    if (!(t_cap > 0.0)) throw ConfigError("lattice: t_cap must be positive");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double nearest_center_dist2(const Eigen::Vector2d& y) {
    const double dx = y.x() - std::round(y.x());
    const double dy = y.y() - std::round(y.y());
    return dx * dx + dy * dy;
}

}  // namespace

double free_path_scaled(const Eigen::Vector2d& y, const Eigen::Vector2d& v,
                        double rho, double cap_y) {
    if (std::abs(v.squaredNorm() - 1.0) > 1e-9)
        throw std::domain_error("free_path: direction must be a unit vector");
    if (nearest_center_dist2(y) <= rho * rho)
        throw std::domain_error("free_path: start position lies inside a hole");

    // Amanatides-Woo traversal over unit cells centered at lattice points
    // (boundaries at half-integers). Cells are visited in increasing entry
    // distance; each visit tests the 9 disks of the 3x3 neighborhood, which
    // covers every disk intersectable inside the cell since rho < 1/2.
    long ci = static_cast<long>(std::floor(y.x() + 0.5));
    long cj = static_cast<long>(std::floor(y.y() + 0.5));
    const int step_i = (v.x() > 0.0) ? 1 : -1;
    const int step_j = (v.y() > 0.0) ? 1 : -1;
    const double dt_i = (v.x() != 0.0) ? std::abs(1.0 / v.x()) : kInf;
    const double dt_j = (v.y() != 0.0) ? std::abs(1.0 / v.y()) : kInf;
    double tmax_i = kInf, tmax_j = kInf;
    if (v.x() != 0.0) {
        const double bound = static_cast<double>(ci) + 0.5 * step_i;
        tmax_i = (bound - y.x()) / v.x();
    }
    if (v.y() != 0.0) {
        const double bound = static_cast<double>(cj) + 0.5 * step_j;
        tmax_j = (bound - y.y()) / v.y();
    }

    double best = kInf;
    double s_entry = 0.0;
    const long max_steps = static_cast<long>(10.0 * cap_y) + 64;
    long steps = 0;
    while (true) {
        if (s_entry > best || s_entry > cap_y) break;
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                const double cx = static_cast<double>(ci + di);
                const double cy = static_cast<double>(cj + dj);
                const double rx = cx - y.x(), ry = cy - y.y();
                const double b = rx * v.x() + ry * v.y();
                if (b <= 0.0) continue;
                // perpendicular distance via the cross product; the form
                // |r|^2 - b^2 cancels catastrophically at long range
                const double cr = rx * v.y() - ry * v.x();
                const double disc = rho * rho - cr * cr;
                if (disc < 0.0) continue;
                const double s = b - std::sqrt(disc);
                if (s >= 0.0 && s < best) best = s;
            }
        }
        // advance to the next cell
        if (tmax_i < tmax_j) {
            s_entry = tmax_i;
            tmax_i += dt_i;
            ci += step_i;
        } else {
            s_entry = tmax_j;
            tmax_j += dt_j;
            cj += step_j;
        }
        if (++steps > max_steps)
            throw std::logic_error("free_path: traversal step cap exceeded");
    }
    return (best <= cap_y) ? best : cap_y;
}

double free_path(const Eigen::Vector2d& x, const Eigen::Vector2d& v,
                 const LatticeConfig& config) {
    config.validate();
    const double rho = config.scaled_radius();
    const double cap_y = config.t_cap / config.epsilon;
    const double s = free_path_scaled(x / config.epsilon, v, rho, cap_y);
    return (s >= cap_y) ? config.t_cap : config.epsilon * s;
}

FreePathSample draw_sample(const LatticeConfig& config, std::uint64_t seed,
                           std::uint64_t index) {
    const double rho = config.scaled_radius();
    Rng rng(seed, index);
    Eigen::Vector2d y;
    do {
        y.x() = rng.uniform() - 0.5;
        y.y() = rng.uniform() - 0.5;
    } while (y.squaredNorm() <= rho * rho);
    const double theta = rng.angle();
    const Eigen::Vector2d v(std::cos(theta), std::sin(theta));
    const double cap_y = config.t_cap / config.epsilon;
    const double s = free_path_scaled(y, v, rho, cap_y);
    return {y * config.epsilon, theta,
            (s >= cap_y) ? config.t_cap : config.epsilon * s};
}

EmpiricalTail sample_empirical(const LatticeConfig& config, std::int64_t n,
                               std::uint64_t seed, const Eigen::ArrayXd& t_grid,
                               int threads) {
    config.validate();
    if (n < 1) throw ConfigError("sample_empirical: n must be >= 1");
    const double rho = config.scaled_radius();
    const double acceptance = 1.0 - 3.14159265358979323846 * rho * rho;
    if (acceptance < 0.5)
        throw ConfigError("sample_empirical: rejection acceptance below 50%");

    const Eigen::Index g = t_grid.size();
    // histogram of path lengths over the grid bins; suffix sums give the tail
    int n_workers = threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    if (n_workers > n) n_workers = static_cast<int>(n);

    std::vector<std::vector<std::int64_t>> local(
        n_workers, std::vector<std::int64_t>(static_cast<size_t>(g) + 1, 0));
    auto worker = [&](int w) {
        auto& hist = local[w];
        const std::int64_t lo = n * w / n_workers, hi = n * (w + 1) / n_workers;
        for (std::int64_t i = lo; i < hi; ++i) {
            const FreePathSample s = draw_sample(config, seed, static_cast<std::uint64_t>(i));
            // index of the first grid point >= path length; sample survives
            // all grid points strictly below its path length
            const double* begin = t_grid.data();
            const Eigen::Index k =
                std::lower_bound(begin, begin + g, s.path_length) - begin;
            ++hist[static_cast<size_t>(k)];
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker, w);
    worker(0);
    for (auto& th : pool) th.join();

    std::vector<std::int64_t> hist(static_cast<size_t>(g) + 1, 0);
    for (const auto& h : local)
        for (size_t k = 0; k < h.size(); ++k) hist[k] += h[k];

    EmpiricalTail tail;
    tail.t = t_grid;
    tail.phi_hat.resize(g);
    std::int64_t below = 0;  // samples with path <= t_grid[k]
    for (Eigen::Index k = 0; k < g; ++k) {
        below += hist[static_cast<size_t>(k)];
        tail.phi_hat[k] =
            static_cast<double>(n - below) / static_cast<double>(n);
    }
    tail.n = n;
    tail.epsilon = config.epsilon;
    tail.seed = seed;
    return tail;
}

double ks_distance(const EmpiricalTail& tail, const PathDistribution& dist,
                   double t_lo, double t_hi) {
    double sup = 0.0;
    for (Eigen::Index k = 0; k < tail.t.size(); ++k) {
        const double t = tail.t[k];
        if (t < t_lo || t > t_hi) continue;
        sup = std::max(sup, std::abs(tail.phi_hat[k] - dist.p(t)));
    }
    return sup;
}

}  // namespace lbhom
