#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lbhom/errors.hpp"
#include "lbhom/lattice.hpp"
#include "lbhom/renewal.hpp"
#include "lbhom/rng.hpp"
#include "lbhom/transport.hpp"

using namespace lbhom;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kChi2_35_999 = 66.62;  // chi^2 0.999 quantile, 35 dof
}

TEST_CASE("isotropic scattering is uniform") {
    ScatterKernel k = ScatterKernel::isotropic();
    Rng rng(1, 0);
    const int n = 1000000, bins = 36;
    std::vector<int> hist(bins, 0);
    for (int i = 0; i < n; ++i) {
        const double out = k.sample(1.234, rng);
        ++hist[static_cast<int>(out / (2.0 * kPi) * bins) % bins];
    }
    double chi2 = 0.0;
    const double expect = static_cast<double>(n) / bins;
    for (int b = 0; b < bins; ++b)
        chi2 += (hist[b] - expect) * (hist[b] - expect) / expect;
    CHECK(chi2 < kChi2_35_999);
}

TEST_CASE("polynomial-cosine kernel: normalization and sampling law") {
    ScatterKernel k = ScatterKernel::polynomial_cosine();
    // c = 2/3 on the circle
    CHECK(k.normalization() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    // (1/2pi) int k = 1 within 1e-12, via the density over a full turn
    const int m = 4096;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += k.density(2.0 * kPi * i / m);
    CHECK(acc * (2.0 * kPi / m) == doctest::Approx(1.0).epsilon(1e-12));

    // chi-square of sampled relative angles against the analytic density
    Rng rng(2, 0);
    const int n = 1000000, bins = 36;
    std::vector<int> hist(bins, 0);
    double sin_mean = 0.0;
    for (int i = 0; i < n; ++i) {
        const double incoming = 0.777;
        double rel = k.sample(incoming, rng) - incoming;
        if (rel < -kPi) rel += 2.0 * kPi;
        if (rel >= kPi) rel -= 2.0 * kPi;
        sin_mean += std::sin(rel);
        int b = static_cast<int>((rel + kPi) / (2.0 * kPi) * bins);
        if (b == bins) b = bins - 1;
        ++hist[b];
    }
    double chi2 = 0.0;
    for (int b = 0; b < bins; ++b) {
        // expected bin mass by fine midpoint sums of the density
        double p = 0.0;
        const double lo = -kPi + 2.0 * kPi * b / bins, w = 2.0 * kPi / bins;
        for (int j = 0; j < 64; ++j) p += k.density(lo + (j + 0.5) * w / 64) * w / 64;
        const double e = n * p;
        chi2 += (hist[b] - e) * (hist[b] - e) / e;
    }
    CHECK(chi2 < kChi2_35_999);
    // evenness of the relative-angle law
    CHECK(std::abs(sin_mean / n) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.sigma = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SimConfig{};
    cfg.n_particles = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SimConfig{};
    cfg.checkpoints = {20.0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SimConfig{};
    cfg.lattice = LatticeConfig{1.0, 0.45, 10.0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("survival curve structure and determinism") {
    SimConfig cfg;
    cfg.sigma = 1.0;
    cfg.lattice = LatticeConfig::with_default_radius(1e-2);
    cfg.n_particles = 20000;
    cfg.horizon = 5.0;
    cfg.grid_points = 51;
    const SurvivalCurve a = simulate(cfg, 99, 1).curve;
    CHECK(a.survival[0] == 1.0);
    for (Eigen::Index i = 1; i < a.survival.size(); ++i) {
        CHECK(a.survival[i] <= a.survival[i - 1]);
        CHECK(a.survival[i] >= 0.0);
        CHECK(a.survival[i] <= 1.0);
    }
    // bit-identical across repetition and across thread counts
    const SurvivalCurve b = simulate(cfg, 99, 4).curve;
    const SurvivalCurve c = simulate(cfg, 99, 3).curve;
    for (Eigen::Index i = 0; i < a.survival.size(); ++i) {
        CHECK(a.survival[i] == b.survival[i]);
        CHECK(a.survival[i] == c.survival[i]);
    }
    // different seed, different counts
    const SurvivalCurve d = simulate(cfg, 100, 4).curve;
    bool any_diff = false;
    for (Eigen::Index i = 0; i < a.survival.size(); ++i)
        any_diff = any_diff || a.survival[i] != d.survival[i];
    CHECK(any_diff);
}

TEST_CASE("collisionless run reproduces the free-path experiment") {
    const double eps = 1e-2;
    SimConfig cfg;
    cfg.sigma = 0.0;
    cfg.lattice = LatticeConfig::with_default_radius(eps);
    cfg.n_particles = 40000;
    cfg.horizon = 8.0;
    cfg.grid_points = 81;
    const SurvivalCurve mc = simulate(cfg, 7, 0).curve;

    LatticeConfig lc = cfg.lattice;
    lc.t_cap = 10.0;
    const EmpiricalTail tail =
        sample_empirical(lc, cfg.n_particles, 1234, mc.t, 0);
    const double n = static_cast<double>(cfg.n_particles);
    for (Eigen::Index i = 0; i < mc.t.size(); ++i) {
        const double sbar = 0.5 * (mc.survival[i] + tail.phi_hat[i]);
        const double se = std::sqrt(std::max(sbar * (1.0 - sbar) * 2.0 / n, 0.0));
        CHECK(std::abs(mc.survival[i] - tail.phi_hat[i]) <= 3.0 * se + 3.0 / n);
    }
}

TEST_CASE("initial age profile does not move the survival curve") {
    SimConfig cfg;
    cfg.sigma = 1.0;
    cfg.lattice = LatticeConfig::with_default_radius(1e-2);
    cfg.n_particles = 30000;
    cfg.horizon = 6.0;
    cfg.grid_points = 61;
    cfg.age_init = AgeInit::ExpSigma;
    const SurvivalCurve a = simulate(cfg, 31, 0).curve;
    cfg.age_init = AgeInit::Zero;
    const SurvivalCurve b = simulate(cfg, 31, 0).curve;
    const double n = static_cast<double>(cfg.n_particles);
    for (Eigen::Index i = 0; i < a.t.size(); ++i) {
        const double sbar = 0.5 * (a.survival[i] + b.survival[i]);
        const double se = std::sqrt(std::max(sbar * (1.0 - sbar) * 2.0 / n, 0.0));
        CHECK(std::abs(a.survival[i] - b.survival[i]) <= 3.0 * se + 3.0 / n);
    }
}

TEST_CASE("age histogram matches the homogenized age density") {
    SimConfig cfg;
    cfg.sigma = 1.0;
    cfg.lattice = LatticeConfig::with_default_radius(5e-3);
    cfg.n_particles = 150000;
    cfg.horizon = 1.7;
    cfg.grid_points = 18;
    cfg.checkpoints = {1.5};
    cfg.age_bins = 20;
    cfg.age_s_max = 2.5;
    const SimResult res = simulate(cfg, 17, 0);
    REQUIRE(res.ages.size() == 1);
    const AgeHistogram& h = res.ages[0];
    CHECK(h.alive > 4000);

    // theory: density over s of p(s) e^{-s} psi(2-s) (s < t) and
    // p(2) e^{-s} (s > t), normalized over the recorded range
    auto dist = std::shared_ptr<const PathDistribution>(
        &default_distribution(), [](const PathDistribution*) {});
    RenewalKernel k(1.0, dist);
    const MassCurve psi = solve_volterra(k, 1e-3, 1.7);
    const double tc = 1.5;
    auto m_theory = [&](double s) {
        if (s < tc) return dist->p(s) * std::exp(-s) * psi.psi(tc - s);
        return dist->p(tc) * std::exp(-s);
    };
    // bin shares are normalized by the full marginal psi(tc) = int m ds,
    // which includes the never-scattered overflow beyond age_s_max
    const double ds = cfg.age_s_max / cfg.age_bins;
    const double norm = psi.psi(tc);
    double worst = 0.0;
    for (int b = 0; b < cfg.age_bins; ++b) {
        const double s0 = b * ds;
        double mass = 0.0;
        for (int j = 0; j < 32; ++j) mass += m_theory(s0 + (j + 0.5) * ds / 32) * ds / 32;
        const double p_th = mass / norm;
        const double p_emp = static_cast<double>(h.counts[static_cast<size_t>(b)]) /
                             static_cast<double>(h.alive);
        const double se = std::sqrt(p_th * (1.0 - p_th) / static_cast<double>(h.alive));
        worst = std::max(worst, std::abs(p_emp - p_th) - (4.0 * se + 0.04 * p_th));
    }
    CHECK(worst <= 0.0);
    // overflow share: initial cohort with age > s_max, exactly p(tc) e^{-s_max}
    const double th_over = dist->p(tc) * std::exp(-cfg.age_s_max) / norm;
    const double emp_over = static_cast<double>(h.counts[static_cast<size_t>(cfg.age_bins)]) /
                            static_cast<double>(h.alive);
    CHECK(std::abs(emp_over - th_over) <=
          4.0 * std::sqrt(th_over * (1.0 - th_over) / static_cast<double>(h.alive)) +
              0.04 * th_over);
}

TEST_CASE("rate fit on exact exponential input") {
    SurvivalCurve c;
    const int n = 101;
    c.t = Eigen::ArrayXd::LinSpaced(n, 0.0, 10.0);
    c.survival.resize(n);
    c.stderr_ = Eigen::ArrayXd::Zero(n);
    c.surviving_counts.assign(n, 1000000);
    for (int i = 0; i < n; ++i) c.survival[i] = std::exp(-2.0 * c.t[i]);
    c.n = 1000000;
    const RateFit fit = fit_rate(c, 1.0, 9.0);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fit.stderr_ <= 1e-12);

    // starved windows are refused
    c.surviving_counts[50] = 99;
    CHECK_THROWS_AS(fit_rate(c, 1.0, 9.0), StatisticsError);
    CHECK_THROWS_AS(fit_rate(c, -1.0, 9.0), StatisticsError);
    CHECK_THROWS_AS(fit_rate(c, 1.0, 11.0), StatisticsError);
}

TEST_CASE("box mode runs and stays a survival curve") {
    SimConfig cfg;
    cfg.sigma = 1.0;
    cfg.lattice = LatticeConfig::with_default_radius(1e-2);
    cfg.n_particles = 5000;
    cfg.horizon = 3.0;
    cfg.grid_points = 31;
    cfg.box_mode = true;
    cfg.box_size = 2.0;
    const SurvivalCurve c = simulate(cfg, 3, 0).curve;
    CHECK(c.survival[0] == 1.0);
    for (Eigen::Index i = 1; i < c.survival.size(); ++i)
        CHECK(c.survival[i] <= c.survival[i - 1]);
}
