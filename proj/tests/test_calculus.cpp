#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kh/calculus.hpp"
#include "kh/harness.hpp"
#include "kh/rng.hpp"

using namespace kh;

namespace {

TrigPoly exp_one(std::size_t dim) { // e^{2 pi i (x_1 + ... + x_d)}
    TrigPoly f(dim);
    f.set_coeff(Freq(dim, 1), {1.0, 0.0});
    return f;
}

} // namespace

TEST_CASE("variation of constants is 2^d") {
    for (std::size_t d : {1u, 2u, 3u}) {
        auto f = TrigPoly::constant(d, {1.0, 0.0});
        for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()})
            CHECK(variation_p(f, p) == doctest::Approx(std::pow(2.0, d)).epsilon(1e-10));
    }
}

TEST_CASE("variation of a pure exponential") {
    auto f1 = exp_one(1);
    CHECK(variation_p(f1, 1.0) == doctest::Approx(2.0 + 2.0 * M_PI).epsilon(1e-9));
    auto f2 = exp_one(2);
    double expected = 4.0 + 2.0 * 2.0 * M_PI + 2.0 * 2.0 * M_PI + 4.0 * M_PI * M_PI;
    CHECK(variation_p(f2, 2.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("variation rejects p < 1") {
    CHECK_THROWS(variation_p(exp_one(1), 0.5));
}

TEST_CASE("variation homogeneity") {
    auto f = make_named_integrand("product-poly", 2);
    double v1 = variation_p(f, 2.0);
    double v3 = variation_p(f.scaled({3.0, 0.0}), 2.0);
    CHECK(v3 == doctest::Approx(3.0 * v1).epsilon(1e-12));
}

TEST_CASE("D multiplier on simple polynomials") {
    auto c = TrigPoly::constant(2, {1.5, 0.0});
    auto dc = apply_D_fourier(c);
    CHECK(dc.coeff(Freq{0, 0}).real() == doctest::Approx(6.0)); // 4c

    auto f = exp_one(2);
    auto df = apply_D_fourier(f);
    CHECK(df.coeff(Freq{1, 1}).real() == doctest::Approx(-4.0 * M_PI * M_PI).epsilon(1e-14));
    CHECK(df.coeff(Freq{1, 1}).imag() == doctest::Approx(0.0));

    TrigPoly g(1);
    g.set_coeff(Freq{0}, {1.0, 0.0});
    g.set_coeff(Freq{1}, {1.0, 0.0});
    auto dg = apply_D_fourier(g);
    CHECK(dg.coeff(Freq{0}).real() == doctest::Approx(2.0));
    CHECK(dg.coeff(Freq{1}).real() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(dg.coeff(Freq{1}).imag() == doctest::Approx(-2.0 * M_PI).epsilon(1e-15));
}

TEST_CASE("D spatial form at specific points") {
    auto c = TrigPoly::constant(2, {0.7, 0.0});
    double origin[2] = {0.0, 0.0};
    CHECK(apply_D_spatial(c, origin).real() == doctest::Approx(2.8).epsilon(1e-12));

    auto f = exp_one(2);
    auto v = apply_D_spatial(f, origin);
    CHECK(v.real() == doctest::Approx(-4.0 * M_PI * M_PI).epsilon(1e-12));
    CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Lemma-4 identity: spatial equals Fourier for random polynomials") {
    std::uint64_t seed = mix64(4242);
    int idx = 0;
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t d = 1 + trial % 3;
        auto f = random_trigpoly(d, 3, 1000 + trial);
        auto df = apply_D_fourier(f);
        for (int j = 0; j < 20; ++j) {
            std::vector<double> x(d);
            for (std::size_t k = 0; k < d; ++k) x[k] = stream_unit(seed, idx++);
            Complex a = apply_D_spatial(f, x);
            Complex b = df.eval(x);
            CHECK(std::abs(a - b) < 1e-8);
        }
    }
}

TEST_CASE("spectral norms of single-frequency polynomials") {
    auto one = TrigPoly::constant(1, {1.0, 0.0});
    CHECK(spectral_norm(one, {SpectralKind::Product, 3.0}) == doctest::Approx(1.0));

    // weight (1+|n|)^{2 gamma} at n = 1, gamma = 2: sqrt(2^4) = 4
    auto f = exp_one(1);
    CHECK(spectral_norm(f, {SpectralKind::Product, 2.0}) == doctest::Approx(4.0));

    auto g = exp_one(2);
    CHECK(spectral_norm(g, {SpectralKind::Radial, 2.25}) ==
          doctest::Approx(std::pow(3.0, 9.0 / 8.0)).epsilon(1e-14));
}

TEST_CASE("pairing against qmc measures") {
    auto one = TrigPoly::constant(1, {1.0, 0.0});
    auto mu = SignedMeasure::qmc(gen_random(17, 1, 5));
    CHECK(std::abs(pair(one, mu)) < 1e-14);

    auto f = exp_one(1);
    auto mu0 = SignedMeasure::qmc(PointSet(1, {0.0}));
    CHECK(pair(f, mu0).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pair(f, mu0).imag() == doctest::Approx(0.0));

    auto mu2 = SignedMeasure::qmc(PointSet(1, {0.0, 0.5}));
    CHECK(std::abs(pair(f, mu2)) < 1e-14);
}

TEST_CASE("mu_hat closed forms") {
    auto mu = SignedMeasure::qmc(PointSet(1, {0.25}));
    auto c = mu_hat(mu, Freq{1}); // e^{-2 pi i /4} = -i
    CHECK(c.real() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(c.imag() == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(mu_hat(mu, Freq{0}).real() == doctest::Approx(0.0)); // mass balance
}

TEST_CASE("qmc error examples") {
    auto one = TrigPoly::constant(1, {1.0, 0.0});
    CHECK(qmc_error(one, Region::full_cube(1), gen_random(9, 1, 2)).value ==
          doctest::Approx(0.0).epsilon(1e-14));
    CHECK(qmc_error(one, Region::axis_box({0.0}, {0.5}), PointSet(1, {0.25, 0.75})).value ==
          doctest::Approx(0.0).epsilon(1e-14));
    auto f = exp_one(1);
    CHECK(qmc_error(f, Region::full_cube(1), PointSet(1, {0.0})).value ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("grid quadrature matches Parseval without aliasing") {
    auto f = random_trigpoly(2, 5, 77);
    double parseval = 0.0;
    for (const auto& [n, c] : f.coeffs()) parseval += std::norm(c);
    parseval = std::sqrt(parseval);
    // midpoint rule on a 64x64 grid integrates frequencies below 64 exactly
    int g = 64;
    double acc = 0.0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            double x[2] = {(i + 0.5) / g, (j + 0.5) / g};
            acc += std::norm(f.eval(x));
        }
    CHECK(std::sqrt(acc / (g * g)) == doctest::Approx(parseval).epsilon(1e-10));
}

TEST_CASE("callback periodicity probe") {
    CHECK_THROWS(CallbackFunction(1, [](std::span<const double> x) { return x[0]; }));
    CHECK_NOTHROW(CallbackFunction(
        1, [](std::span<const double> x) { return std::sin(2.0 * M_PI * x[0]); }));
}

TEST_CASE("finite differences track exact partials") {
    auto f = make_named_integrand("exp-sum", 2);
    CallbackFunction cb(2, [&](std::span<const double> x) { return f.eval(x).real(); });
    auto fx = f.derivative(0b01);
    auto fxy = f.derivative(0b11);
    std::uint64_t seed = mix64(31);
    for (int i = 0; i < 50; ++i) {
        double x[2] = {stream_unit(seed, 2 * i), stream_unit(seed, 2 * i + 1)};
        CHECK(std::abs(cb.partial(0b01, {x, 2}) - fx.eval({x, 2}).real()) < 1e-5);
        CHECK(std::abs(cb.partial(0b11, {x, 2}) - fxy.eval({x, 2}).real()) < 1e-4);
    }
}

TEST_CASE("callback variation approximates the trig-poly value") {
    auto f = make_named_integrand("exp-sum", 1);
    CallbackFunction cb(1, [&](std::span<const double> x) { return f.eval(x).real(); });
    double a = variation_p(f, 2.0);
    double b = variation_p(cb, 2.0);
    CHECK(std::abs(a - b) < 1e-3 * a);
}
