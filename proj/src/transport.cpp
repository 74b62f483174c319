#include "lbhom/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "lbhom/errors.hpp"

namespace lbhom {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}

ScatterKernel::ScatterKernel(Kind kind) : kind_(kind) {
    if (kind_ == Kind::Isotropic) {
        c_ = 1.0;
        return;
    }
    // normalize c (1 + cos^2) numerically; trapezoid is spectrally exact for
    // this periodic integrand
    const int n = 512;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double th = kTwoPi * i / n;
        acc += 1.0 + std::cos(th) * std::cos(th);
    }
    const double mean = acc / n;  // (1/2pi) int (1+cos^2)
    c_ = 1.0 / mean;
    if (std::abs(mean * c_ - 1.0) > 1e-12)
        throw NumericError("ScatterKernel: normalization check failed", mean);
}

double ScatterKernel::density(double relative_angle) const {
    if (kind_ == Kind::Isotropic) return 1.0 / kTwoPi;
    const double c = std::cos(relative_angle);
    return c_ * (1.0 + c * c) / kTwoPi;
}

double ScatterKernel::sample(double incoming_angle, Rng& rng) const {
    if (kind_ == Kind::Isotropic) return rng.angle();
    // rejection against the uniform envelope; acceptance = 3/4
    while (true) {
        const double phi = rng.angle() - kPi;  // relative angle in [-pi, pi)
        const double c = std::cos(phi);
        if (2.0 * rng.uniform() <= 1.0 + c * c) {
            double out = incoming_angle + phi;
            if (out >= kTwoPi) out -= kTwoPi;
            if (out < 0.0) out += kTwoPi;
            return out;
        }
    }
}

void SimConfig::validate() const {
    lattice.validate();
    if (sigma < 0.0) throw ConfigError("simulate: sigma must be >= 0");
    if (n_particles < 1) throw ConfigError("simulate: n_particles >= 1");
    if (!(horizon > 0.0)) throw ConfigError("simulate: horizon > 0");
    if (grid_points < 2) throw ConfigError("simulate: grid_points >= 2");
    if (age_bins < 1) throw ConfigError("simulate: age_bins >= 1");
    const double rho = lattice.scaled_radius();
    if (1.0 - kPi * rho * rho < 0.5)
        throw ConfigError("simulate: rejection acceptance below 50%");
    for (double c : checkpoints)
        if (c < 0.0 || c > horizon)
            throw ConfigError("simulate: checkpoint outside [0, horizon]");
}

namespace {

struct Tally {
    // death_bins[k]: deaths with t in (t_{k-1}, t_k]; index grid_points
    // collects paths that outlive the horizon
    std::vector<std::int64_t> death_bins;
    // ages[c][b] per checkpoint, last bin collects overflow
    std::vector<std::vector<std::int64_t>> age_counts;
    std::vector<std::int64_t> alive_at_checkpoint;
};

void run_particle(const SimConfig& cfg, std::uint64_t seed,
                       std::int64_t idx, Tally& tally) {
    Rng rng(seed, static_cast<std::uint64_t>(idx));
    const double eps = cfg.lattice.epsilon;
    const double rho = cfg.lattice.scaled_radius();
    const double T = cfg.horizon;
    const size_t n_cp = cfg.checkpoints.size();
    const double s_hi = (cfg.age_s_max > 0.0)
                            ? cfg.age_s_max
                            : 0.5 * T + (cfg.sigma > 0.0 ? 5.0 / cfg.sigma : T);

    Eigen::Vector2d y;
    if (cfg.box_mode) {
        const double half = 0.5 * cfg.box_size / eps;
        do {
            y.x() = (rng.uniform() - 0.5) * 2.0 * half;
            y.y() = (rng.uniform() - 0.5) * 2.0 * half;
        } while ((y - Eigen::Vector2d(std::round(y.x()), std::round(y.y())))
                     .squaredNorm() <= rho * rho);
    } else {
        do {
            y.x() = rng.uniform() - 0.5;
            y.y() = rng.uniform() - 0.5;
        } while (y.squaredNorm() <= rho * rho);
    }
    double angle = rng.angle();
    double last_jump = 0.0;
    if (cfg.sigma > 0.0 && cfg.age_init == AgeInit::ExpSigma)
        last_jump = -rng.exponential(cfg.sigma);

    size_t cp = 0;  // next unprocessed checkpoint
    auto process_checkpoints_until = [&](double t_limit, double jump_time) {
        while (cp < n_cp && cfg.checkpoints[cp] < t_limit) {
            const double age = cfg.checkpoints[cp] - jump_time;
            ++tally.alive_at_checkpoint[cp];
            const int nb = cfg.age_bins;
            int b = static_cast<int>(std::floor(age / s_hi * nb));
            if (b >= nb) b = nb;  // overflow bin
            if (b < 0) b = 0;
            ++tally.age_counts[cp][static_cast<size_t>(b)];
            ++cp;
        }
    };

    double t_now = 0.0;
    double death = std::numeric_limits<double>::infinity();
    while (t_now < T) {
        const Eigen::Vector2d v(std::cos(angle), std::sin(angle));
        const double remaining = T - t_now;
        const double cap_y = remaining / eps;
        const double geo_y = free_path_scaled(y, v, rho, cap_y);
        const double d_geo = (geo_y >= cap_y)
                                 ? std::numeric_limits<double>::infinity()
                                 : eps * geo_y;
        const double d_scatter =
            (cfg.sigma > 0.0) ? rng.exponential(cfg.sigma)
                              : std::numeric_limits<double>::infinity();
        if (d_geo <= d_scatter && d_geo <= remaining) {
            death = t_now + d_geo;
            process_checkpoints_until(death, last_jump);
            break;
        }
        if (d_scatter < remaining) {
            process_checkpoints_until(t_now + d_scatter, last_jump);
            y += (d_scatter / eps) * v;
            y.x() -= std::round(y.x());
            y.y() -= std::round(y.y());
            t_now += d_scatter;
            angle = cfg.kernel.sample(angle, rng);
            last_jump = t_now;
            continue;
        }
        process_checkpoints_until(T + 1e-300, last_jump);
        t_now = T;
    }

    const Eigen::Index g = cfg.grid_points;
    const double dt = T / static_cast<double>(g - 1);
    if (std::isinf(death)) {
        ++tally.death_bins[static_cast<size_t>(g)];
    } else {
        Eigen::Index k = static_cast<Eigen::Index>(std::ceil(death / dt));
        if (k > g - 1) k = g;
        ++tally.death_bins[static_cast<size_t>(k)];
    }
}

}  // namespace

SimResult simulate(const SimConfig& config, std::uint64_t seed, int threads) {
    config.validate();
    SimConfig cfg = config;
    std::sort(cfg.checkpoints.begin(), cfg.checkpoints.end());

    const Eigen::Index g = cfg.grid_points;
    const size_t n_cp = cfg.checkpoints.size();
    const double s_hi = (cfg.age_s_max > 0.0)
                            ? cfg.age_s_max
                            : 0.5 * cfg.horizon +
                                  (cfg.sigma > 0.0 ? 5.0 / cfg.sigma : cfg.horizon);

    int n_workers = threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    if (n_workers > cfg.n_particles) n_workers = static_cast<int>(cfg.n_particles);

    auto make_tally = [&] {
        Tally t;
        t.death_bins.assign(static_cast<size_t>(g) + 1, 0);
        t.age_counts.assign(n_cp, std::vector<std::int64_t>(
                                      static_cast<size_t>(cfg.age_bins) + 1, 0));
        t.alive_at_checkpoint.assign(n_cp, 0);
        return t;
    };
    std::vector<Tally> local(static_cast<size_t>(n_workers));
    for (auto& t : local) t = make_tally();

    auto worker = [&](int w) {
        const std::int64_t lo = cfg.n_particles * w / n_workers;
        const std::int64_t hi = cfg.n_particles * (w + 1) / n_workers;
        for (std::int64_t i = lo; i < hi; ++i)
            run_particle(cfg, seed, i, local[static_cast<size_t>(w)]);
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker, w);
    worker(0);
    for (auto& th : pool) th.join();

    Tally total = make_tally();
    for (const auto& t : local) {
        for (size_t k = 0; k < t.death_bins.size(); ++k)
            total.death_bins[k] += t.death_bins[k];
        for (size_t c = 0; c < n_cp; ++c) {
            total.alive_at_checkpoint[c] += t.alive_at_checkpoint[c];
            for (size_t b = 0; b < t.age_counts[c].size(); ++b)
                total.age_counts[c][b] += t.age_counts[c][b];
        }
    }

    SimResult out;
    auto& curve = out.curve;
    curve.t = Eigen::ArrayXd::LinSpaced(g, 0.0, cfg.horizon);
    curve.survival.resize(g);
    curve.stderr_.resize(g);
    curve.surviving_counts.resize(static_cast<size_t>(g));
    const double n = static_cast<double>(cfg.n_particles);
    std::int64_t dead = 0;
    for (Eigen::Index k = 0; k < g; ++k) {
        dead += total.death_bins[static_cast<size_t>(k)];
        const std::int64_t alive = cfg.n_particles - dead;
        curve.surviving_counts[static_cast<size_t>(k)] = alive;
        const double s = static_cast<double>(alive) / n;
        curve.survival[k] = s;
        curve.stderr_[k] = std::sqrt(std::max(0.0, s * (1.0 - s) / n));
    }
    curve.n = cfg.n_particles;
    curve.seed = seed;
    curve.config = cfg;

    for (size_t c = 0; c < n_cp; ++c) {
        AgeHistogram h;
        h.t_checkpoint = cfg.checkpoints[c];
        h.alive = total.alive_at_checkpoint[c];
        const int nb = cfg.age_bins;
        const double ds = s_hi / nb;
        h.s_centers = Eigen::ArrayXd::LinSpaced(nb, 0.5 * ds, s_hi - 0.5 * ds);
        h.density.resize(nb);
        h.counts.assign(total.age_counts[c].begin(), total.age_counts[c].end());
        for (int b = 0; b < nb; ++b) {
            const double cnt = static_cast<double>(h.counts[static_cast<size_t>(b)]);
            h.density[b] = (h.alive > 0)
                               ? cnt / (static_cast<double>(h.alive) * ds)
                               : 0.0;
        }
        out.ages.push_back(std::move(h));
    }
    return out;
}

RateFit fit_log_slope(const Eigen::ArrayXd& t, const Eigen::ArrayXd& values,
                      double w_lo, double w_hi) {
    std::vector<double> xs, ys;
    for (Eigen::Index k = 0; k < t.size(); ++k) {
        if (t[k] < w_lo || t[k] > w_hi) continue;
        if (!(values[k] > 0.0))
            throw StatisticsError("fit_log_slope: nonpositive value in window");
        xs.push_back(t[k]);
        ys.push_back(std::log(values[k]));
    }
    const int m = static_cast<int>(xs.size());
    if (m < 3) throw StatisticsError("fit_log_slope: fewer than 3 points in window");
    double sx = 0, sy = 0;
    for (int i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    double ss_res = 0;
    for (int i = 0; i < m; ++i) {
        const double r = ys[i] - my - slope * (xs[i] - mx);
        ss_res += r * r;
    }
    RateFit fit;
    fit.slope = slope;
    fit.stderr_ = (m > 2) ? std::sqrt(ss_res / (m - 2) / sxx) : 0.0;
    fit.points = m;
    return fit;
}

RateFit fit_rate(const SurvivalCurve& curve, double w_lo, double w_hi) {
    if (w_lo < 0.0 || w_hi > curve.t[curve.t.size() - 1] || w_lo >= w_hi)
        throw StatisticsError("fit_rate: window outside curve support");
    for (Eigen::Index k = 0; k < curve.t.size(); ++k) {
        if (curve.t[k] < w_lo || curve.t[k] > w_hi) continue;
        if (curve.surviving_counts[static_cast<size_t>(k)] < 100)
            throw StatisticsError("fit_rate: fewer than 100 survivors in window");
    }
    return fit_log_slope(curve.t, curve.survival, w_lo, w_hi);
}

}  // namespace lbhom
