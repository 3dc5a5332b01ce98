#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "kh/pointset.hpp"
#include "kh/rng.hpp"
#include "kh/sphere.hpp"

using namespace kh;

namespace {

double p3_explicit(double z) { return 0.5 * (5.0 * z * z * z - 3.0 * z); }
double p4_explicit(double z) { return (35.0 * z * z * z * z - 30.0 * z * z + 3.0) / 8.0; }

} // namespace

TEST_CASE("Legendre basics and explicit low degrees") {
    CHECK(legendre(0, 0.3) == doctest::Approx(1.0));
    CHECK(legendre(1, -0.7) == doctest::Approx(-0.7));
    CHECK(legendre(2, 0.5) == doctest::Approx(-0.125));
    for (int n = 0; n <= 20; ++n) {
        CHECK(legendre(n, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(legendre(n, -1.0) == doctest::Approx(n % 2 ? -1.0 : 1.0).epsilon(1e-13));
    }
    for (double z = -1.0; z <= 1.0; z += 0.125) {
        CHECK(legendre(3, z) == doctest::Approx(p3_explicit(z)).epsilon(1e-13));
        CHECK(legendre(4, z) == doctest::Approx(p4_explicit(z)).epsilon(1e-13));
    }
    CHECK_THROWS(legendre(-1, 0.0));
    CHECK_THROWS(legendre(2, 1.0 + 1e-9));
    auto all = legendre_all(12, 0.37);
    REQUIRE(all.size() == 13);
    for (int n = 0; n <= 12; ++n) CHECK(all[n] == doctest::Approx(legendre(n, 0.37)).epsilon(1e-14));
}

TEST_CASE("Legendre orthogonality by midpoint quadrature") {
    const int m = 20000;
    for (int a = 0; a <= 5; ++a)
        for (int b = a; b <= 5; ++b) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i) {
                double z = -1.0 + 2.0 * (i + 0.5) / m;
                acc += legendre(a, z) * legendre(b, z);
            }
            acc *= 2.0 / m;
            double expect = a == b ? 2.0 / (2.0 * a + 1.0) : 0.0;
            CHECK(acc == doctest::Approx(expect).epsilon(1e-6).scale(1.0));
        }
}

TEST_CASE("cap coefficients at the hemisphere") {
    auto c = cap_coeffs(M_PI / 2.0, 8);
    CHECK(c.coeffs[0] == doctest::Approx(0.5));
    // (P_0(0) - P_2(0)) / 6 = (1 + 1/2) / 6
    CHECK(c.coeffs[1] == doctest::Approx(0.25));
    CHECK(c.coeffs[2] == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS(cap_coeffs(0.0, 8));
    CHECK_THROWS(cap_coeffs(M_PI, 8));
    CHECK_THROWS(cap_coeffs(1.0, -1));
}

TEST_CASE("cap expansion: Parseval mass and L2 projection error") {
    double theta = 1.0;
    int nmax = 512;
    auto c = cap_coeffs(theta, nmax);
    double area = (1.0 - std::cos(theta)) / 2.0;
    // sum c_n^2 (2n+1) converges to sigma(cap); the ~1/n tail is small at 512
    double mass = 0.0;
    for (int n = 0; n <= nmax; ++n) mass += c.coeffs[n] * c.coeffs[n] * (2.0 * n + 1.0);
    CHECK(mass < area + 1e-12);
    CHECK(mass == doctest::Approx(area).epsilon(0.01));

    // L2(S^2) distance between the partial sum and the indicator
    const int m = 4000;
    double err2 = 0.0;
    for (int i = 0; i < m; ++i) {
        double z = -1.0 + 2.0 * (i + 0.5) / m;
        double ind = z >= std::cos(theta) ? 1.0 : 0.0;
        double diff = c.eval(z) - ind;
        err2 += diff * diff;
    }
    err2 /= m; // = (1/2) int |.|^2 dz = L2(S^2)^2 under normalized measure
    CHECK(std::sqrt(err2) < 0.05);
}

TEST_CASE("cap kernel reciprocal multiplier closed forms") {
    CapKernel half(M_PI / 2.0, false, 8);
    CHECK(half.phi(0).real() == doctest::Approx(2.0));
    CHECK(half.phi(1).real() == doctest::Approx(4.0));
    CHECK_THROWS(half.phi(2)); // coefficient vanishes at the equatorial cap

    // theta = pi/3: c_0 = 1/4, and the double cap has c_0 = 3/4
    CapKernel pair(M_PI / 3.0, true, 8);
    Complex expect = 1.0 / Complex{0.25, 0.75};
    CHECK(std::abs(pair.phi(0) - expect) < 1e-14);

    CHECK_THROWS(CapKernel(M_PI / 2.0 + 0.1, true, 8)); // pair needs theta < pi/2
    CHECK_THROWS(CapKernel(-1.0, false, 8));
}

TEST_CASE("phi growth diagnostics for the cap pair") {
    auto g = verify_phi_growth(1.0, 512, true);
    CHECK(g.exponent == doctest::Approx(1.5));
    CHECK(g.slope > 1.35);
    CHECK(g.slope < 1.65);
    CHECK(g.c1 > 0.0);
    CHECK(g.c2 / g.c1 < 50.0);

    int in_band = 0;
    for (int i = 0; i < 20; ++i) {
        double theta = 0.2 + 1.2 * i / 19.0;
        auto gi = verify_phi_growth(theta, 256, true);
        if (gi.slope > 1.35 && gi.slope < 1.65) ++in_band;
    }
    CHECK(in_band >= 15);

    CHECK_THROWS(verify_phi_growth(M_PI / 2.0, 256, false)); // degenerate theta
    CHECK_THROWS(verify_phi_growth(1.0, 8, true));           // nmax too small
}

TEST_CASE("partial sums of the cap expansion track the indicator pointwise") {
    double theta = 1.0;
    auto c = cap_coeffs(theta, 2048);
    // away from the edge the expansion settles well within 0.1
    for (double z : {-0.9, -0.3, 0.2, 0.9}) {
        double ind = z >= std::cos(theta) ? 1.0 : 0.0;
        CHECK(std::abs(c.eval(z) - ind) < 0.1);
    }
}

TEST_CASE("sphere regions") {
    CHECK(SphereRegion::full().area() == doctest::Approx(1.0));
    CHECK(SphereRegion::hemisphere().area() == doctest::Approx(0.5));
    CHECK(SphereRegion::cap(M_PI / 3.0).area() == doctest::Approx(0.25));
    CHECK(SphereRegion::hemisphere().contains({1.0, 0.0, 0.0}));
    CHECK_FALSE(SphereRegion::hemisphere().contains({0.0, 0.0, -0.1}));
    CHECK(SphereRegion::cap(0.5).contains({0.0, 0.0, 1.0}));
    CHECK_FALSE(SphereRegion::cap(0.5).contains({1.0, 0.0, 0.0}));
    CHECK_THROWS(SphereRegion::cap(0.0));
    CHECK_THROWS(SphereRegion::cap(M_PI));
}

TEST_CASE("seeded sphere sampler is deterministic and balanced") {
    auto a = sphere_point(42, 7);
    auto b = sphere_point(42, 7);
    CHECK(a == b);
    double mz = 0.0;
    for (int i = 0; i < 20000; ++i) {
        auto x = sphere_point(9, i);
        double n2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        CHECK(std::abs(n2 - 1.0) < 1e-12);
        mz += x[2];
    }
    CHECK(std::abs(mz / 20000.0) < 0.02);
}

TEST_CASE("cap discrepancy closed cases") {
    auto zero = cap_l2_discrepancy(SphereRegion::full(), SphereSignedMeasure::zero(), 1.0, 64, 3);
    CHECK(zero.value == 0.0);

    // uniform measure only, full region: every cap has sigma-mass (1-cos theta)/2
    double theta = 1.0;
    auto uni = cap_l2_discrepancy(SphereRegion::full(), SphereSignedMeasure::surface_only(),
                                  theta, 256, 5, 16384);
    double exact = (1.0 - std::cos(theta)) / 2.0;
    CHECK(uni.value == doctest::Approx(exact).epsilon(0.02));

    CHECK_THROWS(cap_l2_discrepancy(SphereRegion::full(), SphereSignedMeasure::zero(), 0.0, 8, 1));
    CHECK_THROWS(cap_l2_discrepancy(SphereRegion::full(), SphereSignedMeasure::zero(), 1.0, 0, 1));
}

TEST_CASE("Fibonacci points drive the cap discrepancy down") {
    double prev = 1e9;
    for (std::size_t n : {250u, 1000u, 4000u}) {
        auto mu = SphereSignedMeasure::qmc(gen_fibonacci_sphere(n));
        auto est = cap_l2_discrepancy(SphereRegion::full(), mu, 1.0, 512, 21, 8192);
        CHECK(est.value < prev);
        prev = est.value;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("sphere verification exact-integral cases") {
    auto pts = gen_fibonacci_sphere(500);

    ZonalExpansion one{{1.0}};
    auto rep = verify_kh_sphere(one, SphereRegion::full(), pts, 1.0, false, {64, 2048, 3, 2.6});
    CHECK(rep.lhs < 1e-9); // mean of a constant equals its integral
    CHECK(rep.ratio_only);
    CHECK(rep.pass);
    CHECK(rep.variant == "sphere-single");

    // f(x) = z = P_1(z): coefficients c_0 = 0, c_1 = 1/3
    ZonalExpansion fz{{0.0, 1.0 / 3.0}};
    double mean_z = 0.0;
    for (const auto& x : pts.points()) mean_z += x[2];
    mean_z /= static_cast<double>(pts.size());
    auto repz = verify_kh_sphere(fz, SphereRegion::full(), pts, 1.0, false, {64, 2048, 3, 2.6});
    CHECK(repz.lhs == doctest::Approx(std::abs(mean_z)).epsilon(1e-10));
    CHECK(repz.rhs > 0.0);
}

TEST_CASE("sphere verification pair variant and validation") {
    auto pts = gen_fibonacci_sphere(400);
    auto f = cap_coeffs(1.0, 64);
    auto rep = verify_kh_sphere(f, SphereRegion::hemisphere(), pts, 0.8, true, {128, 4096, 7, 2.6});
    CHECK(rep.variant == "sphere-pair");
    CHECK(rep.discrepancy > 0.0);
    CHECK(rep.discrepancy2 > 0.0);
    CHECK(std::isfinite(rep.ratio));
    CHECK(rep.pass);

    CHECK_THROWS(verify_kh_sphere(f, SphereRegion::full(), pts, 1.0, false, {64, 2048, 3, 2.0}));
    CHECK_THROWS(verify_kh_sphere(ZonalExpansion{}, SphereRegion::full(), pts, 1.0, false, {}));
}
