#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lbhom/errors.hpp"
#include "lbhom/lattice.hpp"
#include "lbhom/rng.hpp"

using namespace lbhom;
using Eigen::Vector2d;

namespace {

// independent check: conservative distance marching plus sign bisection
double march(const Vector2d& y0, const Vector2d& v, double rho, double cap) {
    auto gap = [&](double s) {
        const Vector2d y = y0 + s * v;
        const double dx = y.x() - std::round(y.x());
        const double dy = y.y() - std::round(y.y());
        return std::sqrt(dx * dx + dy * dy) - rho;
    };
    double s = 0.0;
    while (s < cap) {
        const double d = gap(s);
        if (d <= 0.0) {
            double back = 1e-6;
            while (gap(s - back) <= 0.0 && back < 1.0) back *= 2.0;
            double lo = s - back, hi = s;
            for (int i = 0; i < 80; ++i) {
                const double m = 0.5 * (lo + hi);
                (gap(m) > 0.0 ? lo : hi) = m;
            }
            return 0.5 * (lo + hi);
        }
        s += std::max(0.95 * d, 1e-6);
    }
    return cap;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS((LatticeConfig{0.1, 0.06, 100.0}.validate()), ConfigError);
    CHECK_THROWS_AS((LatticeConfig{0.1, 0.0, 100.0}.validate()), ConfigError);
    CHECK_THROWS_AS((LatticeConfig{0.1, 0.01, -1.0}.validate()), ConfigError);
    LatticeConfig ok = LatticeConfig::with_default_radius(0.1);
    ok.validate();
    CHECK(ok.hole_radius == doctest::Approx(0.01));
}

TEST_CASE("head-on hit and channel") {
    LatticeConfig cfg{0.1, 0.01, 100.0};
    // straight at the origin hole from half a cell away
    const double d = free_path(Vector2d(0.05, 0.0), Vector2d(-1.0, 0.0), cfg);
    CHECK(d == doctest::Approx(0.05 - 0.01).epsilon(1e-14));
    // vertical channel: the line x = epsilon/2 misses every hole
    const double c = free_path(Vector2d(0.05, 0.0), Vector2d(0.0, 1.0), cfg);
    CHECK(c == cfg.t_cap);
    // horizontal channel as well
    const double c2 = free_path(Vector2d(0.0, -0.05), Vector2d(1.0, 0.0), cfg);
    CHECK(c2 == cfg.t_cap);
}

TEST_CASE("domain errors") {
    LatticeConfig cfg{0.1, 0.01, 100.0};
    CHECK_THROWS_AS(free_path(Vector2d(0.005, 0.0), Vector2d(1.0, 0.0), cfg),
                    std::domain_error);
    CHECK_THROWS_AS(free_path(Vector2d(0.05, 0.0), Vector2d(1.0, 1.0), cfg),
                    std::domain_error);
}

TEST_CASE("traversal agrees with the marching oracle") {
    double worst = 0.0;
    int hits = 0;
    for (int i = 0; i < 200; ++i) {
        Rng rng(99, static_cast<std::uint64_t>(i));
        const double rho = 0.02 + 0.4 * rng.uniform();
        Vector2d y;
        do {
            y.x() = rng.uniform() - 0.5;
            y.y() = rng.uniform() - 0.5;
        } while (y.squaredNorm() <= rho * rho);
        const double th = rng.angle();
        const Vector2d v(std::cos(th), std::sin(th));
        const double a = free_path_scaled(y, v, rho, 500.0);
        const double b = march(y, v, rho, 500.0);
        if (a >= 500.0 && b >= 500.0) continue;
        ++hits;
        worst = std::max(worst, std::abs(a - b));
    }
    CHECK(hits > 150);
    CHECK(worst <= 1e-6);
}

TEST_CASE("empirical tail basics") {
    LatticeConfig cfg{1e-2, 1e-4, 20.0};
    Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(41, 0.0, 10.0);

    // single sample: a step function
    const auto one = sample_empirical(cfg, 1, 5, grid, 1);
    const FreePathSample s = draw_sample(cfg, 5, 0);
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        const double want = (s.path_length > grid[k]) ? 1.0 : 0.0;
        CHECK(one.phi_hat[k] == want);
    }

    // tail is nonincreasing and starts at 1
    const auto tail = sample_empirical(cfg, 20000, 7, grid, 0);
    CHECK(tail.phi_hat[0] == doctest::Approx(1.0));
    for (Eigen::Index k = 1; k < grid.size(); ++k)
        CHECK(tail.phi_hat[k] <= tail.phi_hat[k - 1]);

    // thread partitioning does not change the counts
    const auto t1 = sample_empirical(cfg, 5000, 11, grid, 1);
    const auto t4 = sample_empirical(cfg, 5000, 11, grid, 4);
    for (Eigen::Index k = 0; k < grid.size(); ++k)
        CHECK(t1.phi_hat[k] == t4.phi_hat[k]);

    // over-large holes are rejected up front
    LatticeConfig fat{1.0, 0.45, 10.0};
    CHECK_THROWS_AS(sample_empirical(fat, 10, 1, grid, 1), ConfigError);
}

TEST_CASE("direction and lattice symmetry") {
    LatticeConfig cfg{1e-2, 1e-4, 30.0};
    Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(60, 0.1, 12.0);
    const std::int64_t n = 40000;
    const double se = 3.0 * 0.5 * std::sqrt(2.0 / static_cast<double>(n));

    // v -> -v invariance: forward rays with mirrored directions
    std::vector<std::int64_t> hist_f(static_cast<size_t>(grid.size()) + 1, 0),
        hist_b(hist_f);
    for (std::int64_t i = 0; i < n; ++i) {
        Rng rng(13, static_cast<std::uint64_t>(i));
        const double rho = cfg.scaled_radius();
        Vector2d y;
        do {
            y.x() = rng.uniform() - 0.5;
            y.y() = rng.uniform() - 0.5;
        } while (y.squaredNorm() <= rho * rho);
        const double th = rng.angle();
        for (int dir = 0; dir < 2; ++dir) {
            const double sign = dir ? -1.0 : 1.0;
            const Vector2d v(sign * std::cos(th), sign * std::sin(th));
            const double cap = cfg.t_cap / cfg.epsilon;
            const double d = free_path_scaled(y, v, rho, cap);
            const double t = (d >= cap) ? cfg.t_cap : d * cfg.epsilon;
            auto& h = dir ? hist_b : hist_f;
            const Eigen::Index k =
                std::lower_bound(grid.data(), grid.data() + grid.size(), t) -
                grid.data();
            ++h[static_cast<size_t>(k)];
        }
    }
    double fa = n, fb = n, worst = 0.0;
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        fa -= hist_f[static_cast<size_t>(k)];
        fb -= hist_b[static_cast<size_t>(k)];
        worst = std::max(worst, std::abs(fa - fb) / static_cast<double>(n));
    }
    CHECK(worst <= se);

    // 8-fold square symmetry: compare a base octant against its images
    const std::int64_t m = 30000;
    auto octant_tail = [&](int oct) {
        std::vector<std::int64_t> hist(static_cast<size_t>(grid.size()) + 1, 0);
        for (std::int64_t i = 0; i < m; ++i) {
            Rng rng(17, static_cast<std::uint64_t>(i));
            const double rho = cfg.scaled_radius();
            Vector2d y;
            do {
                y.x() = rng.uniform() - 0.5;
                y.y() = rng.uniform() - 0.5;
            } while (y.squaredNorm() <= rho * rho);
            double th = rng.uniform() * (3.14159265358979323846 / 4.0);
            bool flip = oct & 1;
            const double rot = (oct / 2) * (3.14159265358979323846 / 2.0);
            if (flip) th = 3.14159265358979323846 / 2.0 - th;
            th += rot;
            const Vector2d v(std::cos(th), std::sin(th));
            const double cap = cfg.t_cap / cfg.epsilon;
            const double d = free_path_scaled(y, v, rho, cap);
            const double t = (d >= cap) ? cfg.t_cap : d * cfg.epsilon;
            const Eigen::Index k =
                std::lower_bound(grid.data(), grid.data() + grid.size(), t) -
                grid.data();
            ++hist[static_cast<size_t>(k)];
        }
        Eigen::ArrayXd phi(grid.size());
        double alive = static_cast<double>(m);
        for (Eigen::Index k = 0; k < grid.size(); ++k) {
            alive -= hist[static_cast<size_t>(k)];
            phi[k] = alive / static_cast<double>(m);
        }
        return phi;
    };
    const Eigen::ArrayXd base = octant_tail(0);
    const double se8 = 3.0 * 0.5 * std::sqrt(2.0 / static_cast<double>(m));
    for (int oct : {1, 3, 5, 7}) {
        const Eigen::ArrayXd other = octant_tail(oct);
        CHECK((base - other).abs().maxCoeff() <= se8);
    }
}

TEST_CASE("ks distance") {
    const auto& d = default_distribution();
    Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(20, 1.0, 2.0);
    EmpiricalTail tail;
    tail.t = grid;
    tail.phi_hat = Eigen::ArrayXd::Constant(20, 1.0);
    // constant-1 empirical against p on [1,2]: sup gap is 1 - p(2)
    CHECK(ks_distance(tail, d, 1.0, 2.0) ==
          doctest::Approx(1.0 - d.p(2.0)).epsilon(1e-12));
    // identical inputs
    for (Eigen::Index k = 0; k < grid.size(); ++k) tail.phi_hat[k] = d.p(grid[k]);
    CHECK(ks_distance(tail, d, 1.0, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("empirical tail approaches p as epsilon shrinks") {
    const auto& d = default_distribution();
    Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(80, 0.1, 10.0);
    const std::int64_t n = 200000;
    LatticeConfig coarse{5e-2, 2.5e-3, 12.0};
    LatticeConfig fine{3e-3, 9e-6, 12.0};
    const auto tc = sample_empirical(coarse, n, 23, grid, 0);
    const auto tf = sample_empirical(fine, n, 23, grid, 0);
    const double kc = ks_distance(tc, d, 0.1, 10.0);
    const double kf = ks_distance(tf, d, 0.1, 10.0);
    CHECK(kf < kc);
    CHECK(kf <= 0.03);
}
