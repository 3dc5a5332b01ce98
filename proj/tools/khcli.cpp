#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kh/harness.hpp"

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream sink(out);
        if (!sink) throw std::runtime_error("cannot write " + out);
        sink << text << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quadrature-error bounds via geometric discrepancies"};
    app.require_subcommand(1);
    app.fallthrough(true); // global flags may follow the subcommand

    std::uint64_t seed = 0;
    std::string out;
    std::uint64_t samples = 1u << 16;
    app.add_option("--seed", seed, "global RNG seed");
    app.add_option("--out", out, "output file (default: stdout)");
    app.add_option("--samples", samples, "Monte Carlo sample budget");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a point set");
    std::string gen_type = "halton", gen_out;
    std::size_t gen_n = 1024, gen_dim = 2;
    gen->add_option("--type", gen_type, "halton|kronecker|random|fibonacci-sphere");
    gen->add_option("--n", gen_n, "number of points")->required();
    gen->add_option("--dim", gen_dim, "dimension");
    gen->add_option("--file", gen_out, "destination CSV")->required();

    // disc
    auto* disc = app.add_subcommand("disc", "discrepancy of a point set");
    std::string disc_points, disc_mode = "star", disc_region = "{\"type\":\"full\"}";
    double disc_q = 2.0, disc_a = 0.5, disc_r = 0.25;
    disc->add_option("--points", disc_points, "CSV point file")->required();
    disc->add_option("--mode", disc_mode, "star|boxes|lq|cube|ball");
    disc->add_option("--region", disc_region, "region JSON (boxes/lq/cube/ball)");
    disc->add_option("--q", disc_q, "L^q exponent (lq mode)");
    disc->add_option("--a", disc_a, "cube side (cube mode)");
    disc->add_option("--r", disc_r, "ball radius (ball mode)");

    // var
    auto* var = app.add_subcommand("var", "L^p variation of a named integrand");
    std::string var_integrand = "exp-sum";
    std::size_t var_dim = 2;
    double var_p = 2.0;
    int var_grid = 128;
    var->add_option("--integrand", var_integrand, "const|exp-sum|product-poly|random-trig:<deg>");
    var->add_option("--dim", var_dim, "dimension");
    var->add_option("--p", var_p, "exponent p >= 1 (inf allowed)");
    var->add_option("--grid", var_grid, "grid points per axis");

    // verify
    auto* verify = app.add_subcommand("verify", "run an experiment config");
    std::string verify_config;
    verify->add_option("--config", verify_config, "experiment JSON file")->required();

    // sphere
    auto* sph = app.add_subcommand("sphere", "cap-discrepancy bound on S^2");
    std::string sph_points, sph_region = "hemisphere", sph_variant = "pair";
    double sph_theta = 1.0, sph_gamma = 2.6;
    int sph_nmax = 4;
    sph->add_option("--points", sph_points, "sphere CSV point file")->required();
    sph->add_option("--region", sph_region, "full|hemisphere|cap:<theta>");
    sph->add_option("--theta", sph_theta, "cap radius");
    sph->add_option("--variant", sph_variant, "single|pair");
    sph->add_option("--gamma", sph_gamma, "smoothness exponent (single variant)");
    sph->add_option("--nmax", sph_nmax, "integrand degree (cap expansion by default)");

    // scan-bessel
    auto* scan = app.add_subcommand("scan-bessel", "radius scan for the ball kernel");
    double scan_alpha = 1.0, scan_lo = 0.5, scan_hi = 3.0, scan_beta = 1.3;
    std::uint64_t scan_kmax = 10000;
    std::uint32_t scan_grid = 512;
    scan->add_option("--alpha", scan_alpha, "Bessel order");
    scan->add_option("--lo", scan_lo, "scan interval lower end");
    scan->add_option("--hi", scan_hi, "scan interval upper end");
    scan->add_option("--beta", scan_beta, "decay exponent (> 5/4)");
    scan->add_option("--kmax", scan_kmax, "largest k checked");
    scan->add_option("--grid", scan_grid, "scan grid size");

    // sec4
    auto* sec4 = app.add_subcommand("sec4", "singular-integrand simplex application");
    std::vector<double> sec4_eps = {0.1, 0.05, 0.025};
    std::vector<std::size_t> sec4_ns = {1024, 4096};
    sec4->add_option("--eps", sec4_eps, "epsilon ladder");
    sec4->add_option("--n", sec4_ns, "Halton N ladder");

    // study
    auto* study = app.add_subcommand("study", "convergence slopes over an N-ladder");
    std::string study_config;
    study->add_option("--config", study_config, "experiment JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            if (gen_type == "fibonacci-sphere") {
                kh::save_sphere_points(kh::gen_fibonacci_sphere(gen_n), gen_out);
            } else {
                kh::save_points(kh::make_points(gen_type, gen_n, gen_dim, seed), gen_out);
            }
            return 0;
        }
        if (*disc) {
            auto pts = kh::load_points(disc_points);
            json j;
            j["mode"] = disc_mode;
            kh::DiscrepancyEstimate est;
            if (disc_mode == "star") {
                est = kh::star_discrepancy_exact(pts);
            } else {
                kh::Region omega = kh::region_from_json(disc_region, pts.dim());
                if (disc_mode == "boxes") {
                    kh::BoxSearchConfig cfg;
                    cfg.seed = seed;
                    est = kh::intersection_discrepancy(omega, pts, cfg);
                } else {
                    kh::SampleBudget budget;
                    budget.seed = seed;
                    auto mu = kh::SignedMeasure::qmc(pts);
                    if (disc_mode == "lq")
                        est = kh::lq_discrepancy(omega, mu, disc_q, budget);
                    else if (disc_mode == "cube")
                        est = kh::cube_l2_discrepancy(omega, mu, disc_a, budget);
                    else if (disc_mode == "ball")
                        est = kh::ball_l2_discrepancy(omega, mu, disc_r, budget);
                    else
                        throw std::invalid_argument("unknown disc mode: " + disc_mode);
                }
            }
            j["value"] = est.value;
            j["stderr"] = est.stderr_;
            j["seed"] = est.seed;
            emit(j.dump(), out);
            return 0;
        }
        if (*var) {
            auto f = kh::make_named_integrand(var_integrand, var_dim);
            json j;
            j["integrand"] = var_integrand;
            j["p"] = var_p;
            j["variation"] = kh::variation_p(f, var_p, {var_grid});
            emit(j.dump(), out);
            return 0;
        }
        if (*verify) {
            auto cfg = kh::ExperimentConfig::from_json(slurp(verify_config));
            if (!out.empty()) cfg.out = out;
            auto reports = kh::run_experiment(cfg);
            bool all_pass = true;
            std::uint64_t h = cfg.hash();
            for (std::size_t i = 0; i < reports.size(); ++i) {
                std::cout << kh::report_to_json(reports[i], h, cfg.ns[i]) << "\n";
                all_pass = all_pass && reports[i].pass;
            }
            return all_pass ? 0 : 1;
        }
        if (*sph) {
            auto pts = kh::load_sphere_points(sph_points);
            kh::SphereRegion omega;
            if (sph_region == "full")
                omega = kh::SphereRegion::full();
            else if (sph_region == "hemisphere")
                omega = kh::SphereRegion::hemisphere();
            else if (sph_region.rfind("cap:", 0) == 0)
                omega = kh::SphereRegion::cap(std::stod(sph_region.substr(4)));
            else
                throw std::invalid_argument("unknown sphere region: " + sph_region);
            kh::ZonalExpansion f = kh::cap_coeffs(1.0, sph_nmax);
            kh::SphereVerifyConfig cfg;
            cfg.seed = seed;
            cfg.gamma = sph_gamma;
            auto rep = kh::verify_kh_sphere(f, omega, pts, sph_theta, sph_variant == "pair", cfg);
            emit(kh::report_to_json(rep, 0, pts.size()), out);
            return rep.pass ? 0 : 1;
        }
        if (*scan) {
            auto res = kh::scan_bessel_radius(scan_alpha, scan_lo, scan_hi, scan_beta, scan_kmax,
                                              scan_grid);
            json j;
            j["r"] = res.r;
            j["c"] = res.c;
            emit(j.dump(), out);
            return 0;
        }
        if (*sec4) {
            kh::Sec4Config cfg;
            cfg.seed = seed;
            cfg.mc_samples = samples;
            auto table = kh::sec4_application(sec4_eps, sec4_ns, cfg);
            emit(table.csv(), out);
            bool all_pass = true;
            for (const auto& r : table.rows) all_pass = all_pass && r.pass;
            return all_pass ? 0 : 1;
        }
        if (*study) {
            auto cfg = kh::ExperimentConfig::from_json(slurp(study_config));
            auto rep = kh::convergence_study(cfg);
            json j;
            json rows = json::array();
            for (const auto& r : rep.rows)
                rows.push_back({{"n", r.n}, {"lhs", r.lhs}, {"discrepancy", r.discrepancy}});
            j["rows"] = rows;
            j["lhs_slope"] = rep.lhs_fit.slope;
            j["lhs_r2"] = rep.lhs_fit.r2;
            j["lhs_degenerate"] = rep.lhs_fit.degenerate;
            j["discrepancy_slope"] = rep.discrepancy_fit.slope;
            j["discrepancy_r2"] = rep.discrepancy_fit.r2;
            emit(j.dump(), out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
