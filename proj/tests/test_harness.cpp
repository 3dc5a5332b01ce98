#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kh/harness.hpp"
#include "kh/rng.hpp"

using namespace kh;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("named integrands evaluate to their closed forms") {
    auto c = make_named_integrand("const", 3);
    double x3[3] = {0.1, 0.7, 0.3};
    CHECK(c.eval({x3, 3}).real() == doctest::Approx(1.0));

    auto e = make_named_integrand("exp-sum", 2);
    CHECK(e.coeff(Freq{0, 0}).real() == doctest::Approx(1.0));
    CHECK(e.coeff(Freq{1, 0}).real() == doctest::Approx(0.5));
    CHECK(e.coeff(Freq{0, -1}).real() == doctest::Approx(0.5));
    for (double u : {0.0, 0.13, 0.5, 0.77}) {
        double x[2] = {u, 0.31};
        double expect = 1.0 + std::cos(2.0 * M_PI * u) + std::cos(2.0 * M_PI * 0.31);
        auto v = e.eval({x, 2});
        CHECK(v.real() == doctest::Approx(expect).epsilon(1e-12));
        CHECK(std::abs(v.imag()) < 1e-14);
    }

    auto p = make_named_integrand("product-poly", 2);
    for (double u : {0.05, 0.4, 0.92}) {
        double x[2] = {u, 0.2};
        double f1 = 1.0 + 0.5 * std::cos(2.0 * M_PI * u) + 0.25 * std::sin(4.0 * M_PI * u);
        double f2 = 1.0 + 0.5 * std::cos(2.0 * M_PI * 0.2) + 0.25 * std::sin(4.0 * M_PI * 0.2);
        auto v = p.eval({x, 2});
        CHECK(v.real() == doctest::Approx(f1 * f2).epsilon(1e-12));
        CHECK(std::abs(v.imag()) < 1e-13);
    }

    CHECK_NOTHROW(make_named_integrand("random-trig:3", 2));
    CHECK_THROWS(make_named_integrand("nope", 2));
}

TEST_CASE("random trig polynomials are real and seeded") {
    auto f = random_trigpoly(2, 3, 99);
    auto g = random_trigpoly(2, 3, 99);
    auto h = random_trigpoly(2, 3, 100);
    CHECK(f.coeffs() == g.coeffs());
    CHECK(f.coeffs() != h.coeffs());
    std::uint64_t s = mix64(55);
    for (int i = 0; i < 25; ++i) {
        double x[2] = {stream_unit(s, 2 * i), stream_unit(s, 2 * i + 1)};
        CHECK(std::abs(f.eval({x, 2}).imag()) < 1e-12);
    }
    CHECK_THROWS(random_trigpoly(0, 3, 1));
    CHECK_THROWS(random_trigpoly(2, -1, 1));
}

TEST_CASE("singular integrand partials match finite differences") {
    auto f = sec4_integrand();
    double p[2] = {0.25, 0.25};
    CHECK(f.value({p, 2}) == doctest::Approx(32.0).epsilon(1e-13));

    double hstep = 1e-6;
    std::uint64_t s = mix64(321);
    for (int i = 0; i < 20; ++i) {
        // interior points well away from the singular edges
        double x = 0.15 + 0.4 * stream_unit(s, 2 * i);
        double y = 0.15 + 0.4 * stream_unit(s, 2 * i + 1);
        if (1.0 - x - y < 0.1) continue;
        double xp[2] = {x + hstep, y}, xm[2] = {x - hstep, y};
        double fd_x = (f.value({xp, 2}) - f.value({xm, 2})) / (2.0 * hstep);
        double q[2] = {x, y};
        CHECK(f.partial(0b01, {q, 2}) == doctest::Approx(fd_x).epsilon(1e-5));

        double yp[2] = {x, y + hstep}, ym[2] = {x, y - hstep};
        double fd_y = (f.value({yp, 2}) - f.value({ym, 2})) / (2.0 * hstep);
        CHECK(f.partial(0b10, {q, 2}) == doctest::Approx(fd_y).epsilon(1e-5));

        double pp[2] = {x + hstep, y + hstep}, pm[2] = {x + hstep, y - hstep};
        double mp[2] = {x - hstep, y + hstep}, mm[2] = {x - hstep, y - hstep};
        double fd_xy = (f.value({pp, 2}) - f.value({pm, 2}) - f.value({mp, 2}) +
                        f.value({mm, 2})) /
                       (4.0 * hstep * hstep);
        CHECK(f.partial(0b11, {q, 2}) == doctest::Approx(fd_xy).epsilon(1e-4));
    }
}

TEST_CASE("experiment config round trip, hash, and validation") {
    std::string text = R"({"name":"t","dim":2,"integrand":"exp-sum",
        "region":{"type":"full"},"generator":"halton","ns":[16,64,256],
        "variant":{"type":"thm1","p":2,"q":2},"budget":{"mt":8,"mx":64,"cloud":256},
        "slack":0.1,"seed":7})";
    auto cfg = ExperimentConfig::from_json(text);
    CHECK(cfg.ns == std::vector<std::size_t>{16, 64, 256});
    CHECK(cfg.budget.mt == 8);
    CHECK(cfg.slack == doctest::Approx(0.1));
    CHECK(cfg.seed == 7);

    auto cfg2 = ExperimentConfig::from_json(cfg.to_json());
    CHECK(cfg2.to_json() == cfg.to_json());
    CHECK(cfg2.hash() == cfg.hash());
    cfg2.seed = 8;
    CHECK(cfg2.hash() != cfg.hash());

    CHECK_THROWS(ExperimentConfig::from_json(R"({"name":"x"})"));            // no ladder
    CHECK_THROWS(ExperimentConfig::from_json(R"({"ns":[64,64]})"));          // not increasing
    CHECK_THROWS(ExperimentConfig::from_json(R"({"ns":[256,64]})"));         // decreasing
}

TEST_CASE("point factory and variant parsing") {
    CHECK(make_points("halton", 32, 3, 0).size() == 32);
    CHECK(make_points("kronecker", 32, 2, 0).dim() == 2);
    CHECK(make_points("random", 32, 2, 5).size() == 32);
    CHECK_THROWS(make_points("sobol", 32, 2, 0));

    auto v1 = variant_from_json(R"({"type":"thm1","p":2,"q":2})");
    CHECK(std::holds_alternative<Thm1Variant>(v1));
    auto v8 = variant_from_json(R"({"type":"thm8","a":0.3,"gamma":2.5})");
    REQUIRE(std::holds_alternative<Thm8Variant>(v8));
    CHECK(std::get<Thm8Variant>(v8).a == doctest::Approx(0.3));
    auto v10 = variant_from_json(R"({"type":"thm10","r":0.2})");
    REQUIRE(std::holds_alternative<Thm10Variant>(v10));
    CHECK(std::get<Thm10Variant>(v10).r == doctest::Approx(0.2));
    CHECK_THROWS(variant_from_json(R"({"type":"thm11"})"));
}

TEST_CASE("thm10 variant without a radius runs the scan") {
    auto v = variant_from_json(R"({"type":"thm10","scan_lo":0.15,"scan_hi":0.45,
                                   "beta":1.3,"kmax":2000,"scan_grid":64})");
    REQUIRE(std::holds_alternative<Thm10Variant>(v));
    const auto& t = std::get<Thm10Variant>(v);
    CHECK(t.r > 0.15);
    CHECK(t.r < 0.45);
    CHECK(t.scan_c > 0.0);
}

TEST_CASE("experiment run writes reproducible reports") {
    ExperimentConfig cfg;
    cfg.name = "zero";
    cfg.dim = 2;
    cfg.integrand = "const"; // zero quadrature error at any N
    cfg.generator = "halton";
    cfg.ns = {16, 64};
    cfg.budget = {8, 128, 1024, 0};
    cfg.seed = 3;

    std::string p1 = "/tmp/kh_rep1.jsonl", p2 = "/tmp/kh_rep2.jsonl";
    std::remove(p1.c_str());
    std::remove(p2.c_str());

    cfg.out = p1;
    auto reports = run_experiment(cfg);
    REQUIRE(reports.size() == 2);
    for (const auto& r : reports) {
        CHECK(r.lhs < 1e-12);
        CHECK(r.pass);
    }

    cfg.out = p2;
    run_experiment(cfg);
    std::string a = slurp(p1), b = slurp(p2);
    CHECK(!a.empty());
    CHECK(a == b); // byte-identical across reruns

    std::istringstream lines(a);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) ++count;
    CHECK(count == 2);
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("log-log fitting recovers power laws") {
    std::vector<double> xs, ys;
    for (double x : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        xs.push_back(x);
        ys.push_back(3.0 * std::pow(x, -1.5));
    }
    auto fit = fit_loglog(xs, ys);
    CHECK_FALSE(fit.degenerate);
    CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> zs(5, 0.0);
    CHECK(fit_loglog(xs, zs).degenerate);
}

TEST_CASE("convergence study ladder validation and shape") {
    ExperimentConfig cfg;
    cfg.dim = 1;
    cfg.integrand = "exp-sum";
    cfg.generator = "kronecker";
    cfg.ns = {64, 128};
    CHECK_THROWS(convergence_study(cfg));

    cfg.ns = {32, 64, 128, 256};
    cfg.budget = {8, 128, 1024, 0};
    auto study = convergence_study(cfg);
    REQUIRE(study.rows.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(study.rows[i].n == cfg.ns[i]);
    CHECK(study.discrepancy_fit.slope < 0.0); // discrepancy decays along the ladder
}

TEST_CASE("Halton star discrepancy decays near the expected rate") {
    std::vector<double> ns, ds;
    for (std::size_t n : {64u, 256u, 1024u, 4096u}) {
        auto est = star_discrepancy_exact(gen_halton(n, 2));
        ns.push_back(static_cast<double>(n));
        ds.push_back(est.value);
    }
    auto fit = fit_loglog(ns, ds);
    CHECK(fit.slope < -0.75); // near N^{-1} log N for Halton in d = 2
    CHECK(fit.slope > -1.2);
}

TEST_CASE("singular application table") {
    CHECK_THROWS(sec4_application(std::vector<double>{0.4}, std::vector<std::size_t>{64}));

    Sec4Config cfg;
    cfg.mc_samples = 1u << 15;
    cfg.search.random_boxes = 512;
    cfg.search.cloud = 4096;
    auto table = sec4_application(std::vector<double>{0.2}, std::vector<std::size_t>{512}, cfg);
    REQUIRE(table.rows.size() == 1);
    const auto& row = table.rows[0];
    CHECK(row.eps == doctest::Approx(0.2));
    CHECK(row.n == 512);
    CHECK(row.variation_sum > 0.0);
    CHECK(row.discrepancy > 0.0);
    CHECK(row.bound == doctest::Approx(row.discrepancy * row.variation_sum));
    CHECK(std::isfinite(row.error));

    auto csv = table.csv();
    CHECK(csv.find("eps,n,variation_sum") == 0);
    CHECK(csv.find("exponent_fit") != std::string::npos);
}
