// lbhom: homogenized mass decay for transport in a periodically perforated
// plane. Subcommands cover the closed-form free-path law (pdist), empirical
// free paths (fpl-sample), the renewal mass solver (renewal), decay
// exponents (rate), the exact-geometry Monte Carlo (simulate), curve
// comparison (compare) and the acceptance suite (verify).
//
// Every run writes a JSON sidecar echoing all parameters; rerunning with
// --config <sidecar> (plus the same seed) reproduces the outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lbhom/errors.hpp"
#include "lbhom/io.hpp"
#include "lbhom/lattice.hpp"
#include "lbhom/path_distribution.hpp"
#include "lbhom/rate.hpp"
#include "lbhom/renewal.hpp"
#include "lbhom/transport.hpp"
#include "lbhom/verify.hpp"
#include "lbhom/version.hpp"

using nlohmann::json;

namespace {

struct Global {
    std::uint64_t seed = 12345;
    int threads = 0;
    std::string out_dir = ".";
    std::string format = "csv";
};

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir + "/" + name;
}

void write_sidecar(const Global& g, const std::string& command,
                   const json& params, const std::vector<std::string>& outputs) {
    json j;
    j["command"] = command;
    j["version"] = LBHOM_VERSION;
    j["seed"] = g.seed;
    j["threads"] = g.threads;
    j["out_dir"] = g.out_dir;
    j["format"] = g.format;
    j["params"] = params;
    j["outputs"] = outputs;
    std::ofstream os(join_path(g.out_dir, command + "_sidecar.json"));
    os << j.dump(2) << '\n';
}

// --config preload: values from a previous sidecar become defaults for every
// option the user did not set explicitly.
json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw lbhom::ConfigError("cannot open config " + path);
    json j;
    is >> j;
    return j;
}

template <typename T>
void from_config(const json* cfg, const CLI::Option* opt, const char* key, T& value) {
    if (!cfg || opt->count() > 0) return;
    const json& p = cfg->contains("params") ? (*cfg)["params"] : *cfg;
    if (p.contains(key)) value = p[key].get<T>();
}

void apply_global_config(const json* cfg, const CLI::App& app, Global& g) {
    if (!cfg) return;
    if (!app.get_option("--seed")->count() && cfg->contains("seed"))
        g.seed = (*cfg)["seed"].get<std::uint64_t>();
    if (!app.get_option("--threads")->count() && cfg->contains("threads"))
        g.threads = (*cfg)["threads"].get<int>();
    if (!app.get_option("--format")->count() && cfg->contains("format"))
        g.format = (*cfg)["format"].get<std::string>();
}

lbhom::PathDistribution tabulate_for_cli(double tmax, int points) {
    return lbhom::PathDistribution::tabulate(tmax, points);
}

int cmd_verify(const lbhom::VerifyOptions& vo) {
    const auto results = lbhom::run_acceptance(vo);
    bool all = true;
    for (const auto& r : results) {
        std::printf("CRITERION %2d %-4s %-55s [%.1fs] %s\n", r.id,
                    r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                    r.detail.c_str());
        all = all && r.pass;
    }
    std::printf(all ? "verify: all criteria passed\n"
                    : "verify: FAILURES present\n");
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homogenized mass decay in a periodically perforated plane"};
    app.require_subcommand(1);
    app.fallthrough();

    Global g;
    app.add_option("--seed", g.seed, "base RNG seed");
    app.add_option("--threads", g.threads, "worker threads (0 = auto)");
    app.add_option("--out-dir", g.out_dir, "output directory");
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));

    // ---- pdist ----
    auto* pd = app.add_subcommand("pdist", "tabulate p, pdot, Upsilon");
    double pd_tmax = 5.0;
    int pd_points = 501;
    std::string pd_config;
    auto* pd_tmax_o = pd->add_option("--tmax", pd_tmax, "largest tabulated t");
    auto* pd_points_o = pd->add_option("--points", pd_points, "grid size");
    pd->add_option("--config", pd_config, "sidecar to reproduce");

    // ---- fpl-sample ----
    auto* fs = app.add_subcommand("fpl-sample", "empirical free-path tail");
    double fs_eps = 1e-2, fs_tcap = 100.0, fs_gmax = 10.0;
    std::int64_t fs_n = 100000;
    int fs_gpoints = 201;
    double fs_radius = 0.0;  // 0 = epsilon^2
    std::string fs_config;
    auto* fs_eps_o = fs->add_option("--epsilon", fs_eps, "lattice period");
    auto* fs_radius_o = fs->add_option("--radius", fs_radius, "hole radius (default epsilon^2)");
    auto* fs_n_o = fs->add_option("--n", fs_n, "sample count");
    auto* fs_tcap_o = fs->add_option("--t-cap", fs_tcap, "path truncation");
    auto* fs_gmax_o = fs->add_option("--grid-max", fs_gmax, "largest grid t");
    auto* fs_gpoints_o = fs->add_option("--grid-points", fs_gpoints, "grid size");
    fs->add_option("--config", fs_config, "sidecar to reproduce");

    // ---- renewal ----
    auto* rn = app.add_subcommand("renewal", "Volterra mass curve psi");
    double rn_sigma = 1.0, rn_h = 1e-3, rn_T = 20.0;
    double rn_tab_tmax = 40.0;
    int rn_tab_points = 8001;
    bool rn_with_mu = false;
    std::string rn_config;
    auto* rn_sigma_o = rn->add_option("--sigma", rn_sigma, "collision frequency");
    auto* rn_h_o = rn->add_option("--dt", rn_h, "time step");
    auto* rn_T_o = rn->add_option("--T", rn_T, "horizon");
    auto* rn_tabm_o = rn->add_option("--tab-tmax", rn_tab_tmax, "p tabulation extent");
    auto* rn_tabp_o = rn->add_option("--tab-points", rn_tab_points, "p tabulation size");
    auto* rn_mu_o = rn->add_flag("--with-mu", rn_with_mu, "also export the age density");
    rn->add_option("--config", rn_config, "sidecar to reproduce");

    // ---- rate ----
    auto* rt = app.add_subcommand("rate", "decay exponent xi_sigma");
    std::vector<double> rt_sigmas;
    std::string rt_config;
    auto* rt_sigma_o = rt->add_option("--sigma", rt_sigmas, "sigma values");
    auto* rt_sweep_o = rt->add_option(
        "--sweep", [&rt_sigmas](const std::vector<std::string>& vals) {
            for (const auto& v : vals) {
                std::stringstream ss(v);
                std::string tok;
                while (std::getline(ss, tok, ',')) rt_sigmas.push_back(std::stod(tok));
            }
            return true;
        },
        "comma-separated sigma sweep");
    rt->add_option("--config", rt_config, "sidecar to reproduce");

    // ---- simulate ----
    auto* sm = app.add_subcommand("simulate", "exact-geometry Monte Carlo");
    double sm_sigma = 1.0, sm_eps = 1e-2, sm_T = 10.0, sm_radius = 0.0;
    std::int64_t sm_n = 100000;
    int sm_gpoints = 201, sm_agebins = 60;
    double sm_agesmax = 0.0, sm_box = 0.0;
    std::vector<double> sm_checkpoints;
    std::string sm_kernel = "isotropic", sm_ageinit = "exp";
    std::string sm_config;
    auto* sm_sigma_o = sm->add_option("--sigma", sm_sigma, "collision frequency (0 = none)");
    auto* sm_eps_o = sm->add_option("--epsilon", sm_eps, "lattice period");
    auto* sm_radius_o = sm->add_option("--radius", sm_radius, "hole radius (default epsilon^2)");
    auto* sm_n_o = sm->add_option("--n", sm_n, "particle count");
    auto* sm_T_o = sm->add_option("--T", sm_T, "horizon");
    auto* sm_gpoints_o = sm->add_option("--grid-points", sm_gpoints, "survival grid size");
    auto* sm_kernel_o = sm->add_option("--kernel", sm_kernel, "scatter kernel")
                            ->check(CLI::IsMember({"isotropic", "poly-cosine"}));
    auto* sm_ageinit_o = sm->add_option("--age-init", sm_ageinit, "initial age profile")
                             ->check(CLI::IsMember({"exp", "zero"}));
    auto* sm_cp_o = sm->add_option("--checkpoints", sm_checkpoints, "age histogram times");
    auto* sm_ab_o = sm->add_option("--age-bins", sm_agebins, "age histogram bins");
    auto* sm_asm_o = sm->add_option("--age-smax", sm_agesmax, "age histogram extent (0 = auto)");
    auto* sm_box_o = sm->add_option("--box", sm_box, "compact-support box side (0 = torus)");
    sm->add_option("--config", sm_config, "sidecar to reproduce");

    // ---- compare ----
    auto* cp = app.add_subcommand("compare", "error metrics between two curves");
    std::string cp_a, cp_b, cp_col_a, cp_col_b;
    double cp_lo = 0.0, cp_hi = 0.0, cp_scale_a = 1.0, cp_scale_b = 1.0;
    cp->add_option("--a", cp_a, "first curve csv")->required();
    cp->add_option("--b", cp_b, "second curve csv (reference)")->required();
    cp->add_option("--col-a", cp_col_a, "value column in a (default: auto)");
    cp->add_option("--col-b", cp_col_b, "value column in b (default: auto)");
    cp->add_option("--lo", cp_lo, "window start");
    cp->add_option("--hi", cp_hi, "window end (0 = full)");
    cp->add_option("--scale-a", cp_scale_a, "multiply a values");
    cp->add_option("--scale-b", cp_scale_b, "multiply b values");

    // ---- verify ----
    auto* vf = app.add_subcommand("verify", "run the acceptance criteria");
    bool vf_quick = false;
    std::vector<int> vf_only;
    vf->add_flag("--quick", vf_quick, "reduced Monte Carlo proxies (under 5 min)");
    vf->add_option("--only", vf_only, "criteria subset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (pd->parsed()) {
            std::optional<json> cfg;
            if (!pd_config.empty()) cfg = load_config(pd_config);
            const json* cp_ = cfg ? &*cfg : nullptr;
            apply_global_config(cp_, app, g);
            from_config(cp_, pd_tmax_o, "tmax", pd_tmax);
            from_config(cp_, pd_points_o, "points", pd_points);
            const auto dist = tabulate_for_cli(pd_tmax, pd_points);
            lbhom::Table tab;
            std::vector<double> t(dist.grid().data(), dist.grid().data() + dist.grid().size());
            std::vector<double> p(dist.p_values().data(), dist.p_values().data() + dist.grid().size());
            std::vector<double> pdot(dist.pdot_values().data(), dist.pdot_values().data() + dist.grid().size());
            std::vector<double> ups(dist.upsilon_values().data(), dist.upsilon_values().data() + dist.grid().size());
            tab.add("t", t);
            tab.add("p", p);
            tab.add("pdot", pdot);
            tab.add("upsilon", ups);
            const std::string out = tab.write(join_path(g.out_dir, "pdist"), g.format);
            write_sidecar(g, "pdist", {{"tmax", pd_tmax}, {"points", pd_points}}, {out});
            std::printf("pdist: wrote %s (tail A = %.9g)\n", out.c_str(),
                        dist.tail_coefficient());
            return 0;
        }

        if (fs->parsed()) {
            std::optional<json> cfg;
            if (!fs_config.empty()) cfg = load_config(fs_config);
            const json* cp_ = cfg ? &*cfg : nullptr;
            apply_global_config(cp_, app, g);
            from_config(cp_, fs_eps_o, "epsilon", fs_eps);
            from_config(cp_, fs_radius_o, "radius", fs_radius);
            from_config(cp_, fs_n_o, "n", fs_n);
            from_config(cp_, fs_tcap_o, "t_cap", fs_tcap);
            from_config(cp_, fs_gmax_o, "grid_max", fs_gmax);
            from_config(cp_, fs_gpoints_o, "grid_points", fs_gpoints);
            lbhom::LatticeConfig lc{fs_eps, fs_radius > 0.0 ? fs_radius : fs_eps * fs_eps,
                                    fs_tcap};
            Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(fs_gpoints, 0.0, fs_gmax);
            const auto tail = lbhom::sample_empirical(lc, fs_n, g.seed, grid, g.threads);
            lbhom::Table tab;
            std::vector<double> t(tail.t.data(), tail.t.data() + tail.t.size());
            std::vector<double> phi(tail.phi_hat.data(), tail.phi_hat.data() + tail.phi_hat.size());
            tab.add("t", t);
            tab.add("phi_hat", phi);
            tab.add("n_samples", std::vector<std::int64_t>(static_cast<size_t>(fs_gpoints), tail.n));
            tab.add("epsilon", std::vector<double>(static_cast<size_t>(fs_gpoints), tail.epsilon));
            tab.add("seed", std::vector<std::int64_t>(static_cast<size_t>(fs_gpoints),
                                                      static_cast<std::int64_t>(tail.seed)));
            const std::string out = tab.write(join_path(g.out_dir, "fpl"), g.format);
            write_sidecar(g, "fpl-sample",
                          {{"epsilon", fs_eps},
                           {"radius", lc.hole_radius},
                           {"n", fs_n},
                           {"t_cap", fs_tcap},
                           {"grid_max", fs_gmax},
                           {"grid_points", fs_gpoints}},
                          {out});
            std::printf("fpl-sample: wrote %s\n", out.c_str());
            return 0;
        }

        if (rn->parsed()) {
            std::optional<json> cfg;
            if (!rn_config.empty()) cfg = load_config(rn_config);
            const json* cp_ = cfg ? &*cfg : nullptr;
            apply_global_config(cp_, app, g);
            from_config(cp_, rn_sigma_o, "sigma", rn_sigma);
            from_config(cp_, rn_h_o, "h", rn_h);
            from_config(cp_, rn_T_o, "T", rn_T);
            from_config(cp_, rn_tabm_o, "tab_tmax", rn_tab_tmax);
            from_config(cp_, rn_tabp_o, "tab_points", rn_tab_points);
            from_config(cp_, rn_mu_o, "with_mu", rn_with_mu);
            auto dist = std::make_shared<lbhom::PathDistribution>(
                tabulate_for_cli(rn_tab_tmax, rn_tab_points));
            lbhom::RenewalKernel kernel(rn_sigma, dist);
            const auto curve = lbhom::solve_volterra(kernel, rn_h, rn_T);
            lbhom::Table tab;
            std::vector<double> t, psi;
            for (Eigen::Index i = 0; i < curve.values.size(); ++i) {
                t.push_back(rn_h * static_cast<double>(i));
                psi.push_back(curve.values[i]);
            }
            tab.add("t", t);
            tab.add("psi", psi);
            const std::string out = tab.write(join_path(g.out_dir, "renewal"), g.format);
            std::vector<std::string> outputs{out};
            if (rn_with_mu) {
                const auto grid = lbhom::mu_solver(kernel, rn_h, rn_T);
                lbhom::Table mt;
                std::vector<double> mt_t, mt_s, mt_mu;
                for (Eigen::Index a = 0; a < grid.t_coarse.size(); ++a)
                    for (Eigen::Index b = 0; b < grid.s_coarse.size(); ++b) {
                        mt_t.push_back(grid.t_coarse[a]);
                        mt_s.push_back(grid.s_coarse[b]);
                        mt_mu.push_back(grid.values(a, b));
                    }
                mt.add("t", mt_t);
                mt.add("s", mt_s);
                mt.add("mu", mt_mu);
                outputs.push_back(mt.write(join_path(g.out_dir, "mu"), g.format));
            }
            write_sidecar(g, "renewal",
                          {{"sigma", rn_sigma},
                           {"h", rn_h},
                           {"T", rn_T},
                           {"tab_tmax", rn_tab_tmax},
                           {"tab_points", rn_tab_points},
                           {"with_mu", rn_with_mu},
                           {"tab_t_cut", dist->quadrature().t_cut},
                           {"tab_quad_tol", dist->quadrature().abs_tol},
                           {"tab_switch_width", dist->evaluator().switch_width}},
                          outputs);
            std::printf("renewal: wrote %s (psi(0) = %.9g)\n", out.c_str(),
                        curve.values[0]);
            return 0;
        }

        if (rt->parsed()) {
            std::optional<json> cfg;
            if (!rt_config.empty()) cfg = load_config(rt_config);
            const json* cp_ = cfg ? &*cfg : nullptr;
            apply_global_config(cp_, app, g);
            if (rt_sigmas.empty() && cp_) {
                const json& p = (*cp_)["params"];
                if (p.contains("sigmas"))
                    rt_sigmas = p["sigmas"].get<std::vector<double>>();
            }
            (void)rt_sigma_o;
            (void)rt_sweep_o;
            if (rt_sigmas.empty()) rt_sigmas = {1.0};
            std::sort(rt_sigmas.begin(), rt_sigmas.end());
            const auto& dist = lbhom::default_distribution();
            lbhom::Table tab;
            std::vector<double> cs, cxi, clam, cres, cc;
            for (double s : rt_sigmas) {
                const auto r = lbhom::find_xi(dist, s);
                cs.push_back(s);
                cxi.push_back(r.xi);
                clam.push_back(r.lambda);
                cres.push_back(r.residual);
                cc.push_back(r.c_multiplier);
                std::printf("sigma=%-10g xi=%-22.15g lambda=%-22.15g log_lambda=%-14.6f "
                            "residual=%g\n",
                            s, r.xi, r.lambda, r.log_lambda, r.residual);
            }
            tab.add("sigma", cs);
            tab.add("xi", cxi);
            tab.add("lambda", clam);
            tab.add("residual", cres);
            tab.add("c_multiplier", cc);
            const std::string out = tab.write(join_path(g.out_dir, "rate"), g.format);
            write_sidecar(g, "rate", {{"sigmas", rt_sigmas}}, {out});
            std::printf("rate: wrote %s\n", out.c_str());
            return 0;
        }

        if (sm->parsed()) {
            std::optional<json> cfg;
            if (!sm_config.empty()) cfg = load_config(sm_config);
            const json* cp_ = cfg ? &*cfg : nullptr;
            apply_global_config(cp_, app, g);
            from_config(cp_, sm_sigma_o, "sigma", sm_sigma);
            from_config(cp_, sm_eps_o, "epsilon", sm_eps);
            from_config(cp_, sm_radius_o, "radius", sm_radius);
            from_config(cp_, sm_n_o, "n", sm_n);
            from_config(cp_, sm_T_o, "T", sm_T);
            from_config(cp_, sm_gpoints_o, "grid_points", sm_gpoints);
            from_config(cp_, sm_kernel_o, "kernel", sm_kernel);
            from_config(cp_, sm_ageinit_o, "age_init", sm_ageinit);
            from_config(cp_, sm_cp_o, "checkpoints", sm_checkpoints);
            from_config(cp_, sm_ab_o, "age_bins", sm_agebins);
            from_config(cp_, sm_asm_o, "age_smax", sm_agesmax);
            from_config(cp_, sm_box_o, "box", sm_box);
            lbhom::SimConfig sc;
            sc.sigma = sm_sigma;
            sc.lattice = lbhom::LatticeConfig{
                sm_eps, sm_radius > 0.0 ? sm_radius : sm_eps * sm_eps, 100.0};
            sc.n_particles = sm_n;
            sc.horizon = sm_T;
            sc.grid_points = sm_gpoints;
            sc.kernel = (sm_kernel == "poly-cosine")
                            ? lbhom::ScatterKernel::polynomial_cosine()
                            : lbhom::ScatterKernel::isotropic();
            sc.age_init = (sm_ageinit == "zero") ? lbhom::AgeInit::Zero
                                                 : lbhom::AgeInit::ExpSigma;
            sc.checkpoints = sm_checkpoints;
            sc.age_bins = sm_agebins;
            sc.age_s_max = sm_agesmax;
            sc.box_mode = sm_box > 0.0;
            sc.box_size = sm_box > 0.0 ? sm_box : 1.0;
            const auto res = lbhom::simulate(sc, g.seed, g.threads);
            lbhom::Table tab;
            std::vector<double> t(res.curve.t.data(), res.curve.t.data() + res.curve.t.size());
            std::vector<double> sv(res.curve.survival.data(),
                                   res.curve.survival.data() + res.curve.survival.size());
            std::vector<double> se(res.curve.stderr_.data(),
                                   res.curve.stderr_.data() + res.curve.stderr_.size());
            tab.add("t", t);
            tab.add("survival", sv);
            tab.add("stderr", se);
            const std::string out = tab.write(join_path(g.out_dir, "survival"), g.format);
            std::vector<std::string> outputs{out};
            if (!res.ages.empty()) {
                lbhom::Table at;
                std::vector<double> a_t, a_s, a_d;
                for (const auto& h : res.ages)
                    for (Eigen::Index b = 0; b < h.s_centers.size(); ++b) {
                        a_t.push_back(h.t_checkpoint);
                        a_s.push_back(h.s_centers[b]);
                        a_d.push_back(h.density[b]);
                    }
                at.add("t_checkpoint", a_t);
                at.add("s", a_s);
                at.add("density", a_d);
                outputs.push_back(at.write(join_path(g.out_dir, "age_hist"), g.format));
            }
            write_sidecar(g, "simulate",
                          {{"sigma", sm_sigma},
                           {"epsilon", sm_eps},
                           {"radius", sc.lattice.hole_radius},
                           {"n", sm_n},
                           {"T", sm_T},
                           {"grid_points", sm_gpoints},
                           {"kernel", sm_kernel},
                           {"age_init", sm_ageinit},
                           {"checkpoints", sm_checkpoints},
                           {"age_bins", sm_agebins},
                           {"age_smax", sm_agesmax},
                           {"box", sm_box}},
                          outputs);
            std::printf("simulate: wrote %s (final survival %.6g)\n", out.c_str(),
                        res.curve.survival[res.curve.survival.size() - 1]);
            return 0;
        }

        if (cp->parsed()) {
            const auto a = lbhom::read_csv(cp_a);
            const auto b = lbhom::read_csv(cp_b);
            auto pick = [](const lbhom::CsvData& d, const std::string& want) {
                if (!want.empty()) {
                    const int c = d.column(want);
                    if (c < 0) throw lbhom::ConfigError("column not found: " + want);
                    return c;
                }
                for (const char* cand : {"survival", "psi", "phi_hat", "p"}) {
                    const int c = d.column(cand);
                    if (c >= 0) return c;
                }
                throw lbhom::ConfigError("no recognizable value column");
            };
            const int ta = a.column("t"), tb = b.column("t");
            if (ta < 0 || tb < 0) throw lbhom::ConfigError("missing t column");
            const int va = pick(a, cp_col_a), vb = pick(b, cp_col_b);
            const auto& at = a.columns[ta];
            const auto& av = a.columns[va];
            const auto& bt = b.columns[tb];
            const auto& bv = b.columns[vb];
            auto interp_b = [&](double t) {
                if (t <= bt.front()) return bv.front();
                if (t >= bt.back()) return bv.back();
                const auto it = std::lower_bound(bt.begin(), bt.end(), t);
                const size_t i = static_cast<size_t>(it - bt.begin());
                const double x = (t - bt[i - 1]) / (bt[i] - bt[i - 1]);
                return (1.0 - x) * bv[i - 1] + x * bv[i];
            };
            const double lo = cp_lo, hi = (cp_hi > 0.0) ? cp_hi : at.back();
            double l1 = 0.0, ref = 0.0, sup = 0.0;
            for (size_t i = 0; i + 1 < at.size(); ++i) {
                const double t0 = at[i], t1 = at[i + 1];
                if (t0 < lo || t1 > hi) continue;
                const double d0 = std::abs(cp_scale_a * av[i] - cp_scale_b * interp_b(t0));
                const double d1 = std::abs(cp_scale_a * av[i + 1] - cp_scale_b * interp_b(t1));
                const double r0 = std::abs(cp_scale_b * interp_b(t0));
                const double r1 = std::abs(cp_scale_b * interp_b(t1));
                l1 += 0.5 * (d0 + d1) * (t1 - t0);
                ref += 0.5 * (r0 + r1) * (t1 - t0);
                sup = std::max({sup, d0, d1});
            }
            const double rel = (ref > 0.0) ? l1 / ref : 0.0;
            lbhom::Table tab;
            tab.add("l1", std::vector<double>{l1});
            tab.add("rel_l1", std::vector<double>{rel});
            tab.add("sup", std::vector<double>{sup});
            const std::string out = tab.write(join_path(g.out_dir, "compare"), g.format);
            std::printf("compare: L1 = %.9g  relative L1 = %.9g  sup = %.9g  (%s)\n",
                        l1, rel, sup, out.c_str());
            return 0;
        }

        if (vf->parsed()) {
            lbhom::VerifyOptions vo;
            vo.quick = vf_quick;
            vo.threads = g.threads;
            // the acceptance thresholds were frozen against the suite's own
            // default seed; --seed still overrides for robustness sweeps
            if (app.get_option("--seed")->count() > 0) vo.seed = g.seed;
            vo.only = vf_only;
            return cmd_verify(vo);
        }
    } catch (const lbhom::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const lbhom::StatisticsError& e) {
        std::fprintf(stderr, "statistics error: %s\n", e.what());
        return 3;
    } catch (const lbhom::ConfigError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
