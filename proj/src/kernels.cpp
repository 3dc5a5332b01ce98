#include "kh/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kh {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double bessel_series(double alpha, double t) {
    // sum_m (-1)^m (t/2)^{2m+alpha} / (m! Gamma(m+alpha+1))
    if (t == 0.0) return alpha == 0.0 ? 1.0 : 0.0;
    double log_half_t = std::log(0.5 * t);
    double sum = 0.0;
    for (int m = 0; m < 200; ++m) {
        double log_term = (2.0 * m + alpha) * log_half_t - std::lgamma(m + 1.0) -
                          std::lgamma(m + alpha + 1.0);
        double term = std::exp(log_term);
        sum += (m % 2 == 0) ? term : -term;
        if (term < 1e-18 && m > t) break;
    }
    return sum;
}

bool is_half_integer(double alpha) {
    return std::abs(alpha - std::floor(alpha) - 0.5) < 1e-14;
}

// Upward recurrence from the trigonometric seeds J_{-1/2}, J_{1/2}.
double bessel_half_integer(double alpha, double t) {
    double jm = std::sqrt(2.0 / (M_PI * t)) * std::cos(t); // J_{-1/2}
    double jp = std::sqrt(2.0 / (M_PI * t)) * std::sin(t); // J_{+1/2}
    if (alpha == -0.5) return jm;
    double nu = 0.5;
    while (nu < alpha - 0.25) {
        double next = (2.0 * nu / t) * jp - jm;
        jm = jp;
        jp = next;
        nu += 1.0;
    }
    return jp;
}

// Hankel asymptotic expansion, truncated where the terms stop improving.
double bessel_asymptotic(double alpha, double t) {
    double mu = 4.0 * alpha * alpha;
    double p = 1.0, q = 0.0;
    double term = 1.0;
    double prev_mag = std::abs(term);
    for (int k = 1; k < 40; ++k) {
        term *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * t);
        double mag = std::abs(term);
        if (mag > prev_mag || mag < 1e-18) break;
        prev_mag = mag;
        if (k % 2 == 1)
            q += (k % 4 == 1) ? term : -term;
        else
            p += (k % 4 == 2) ? -term : term;
    }
    double omega = t - alpha * M_PI / 2.0 - M_PI / 4.0;
    return std::sqrt(2.0 / (M_PI * t)) * (p * std::cos(omega) - q * std::sin(omega));
}

} // namespace

double bessel_j(double alpha, double t) {
    if (alpha < -0.5) throw std::invalid_argument("bessel_j: unsupported order alpha < -1/2");
    if (t < 0.0) throw std::invalid_argument("bessel_j: t must be >= 0");
    if (t < 15.0) return bessel_series(alpha, t);
    if (is_half_integer(alpha)) return bessel_half_integer(alpha, t);
    return bessel_asymptotic(alpha, t);
}

Complex interval_kernel_coeff(const Freq& n) {
    Complex c{1.0, 0.0};
    for (int nk : n)
        c /= nk == 0 ? Complex{2.0, 0.0} : Complex{0.0, kTwoPi * nk};
    return c;
}

double interval_kernel_spatial(std::span<const double> x) {
    double v = 1.0;
    for (double xk : x) {
        if (xk < 0.0 || xk >= 1.0)
            throw std::invalid_argument("interval_kernel_spatial: x outside [0,1)");
        v *= 1.0 - xk;
    }
    return v;
}

double cube_kernel_coeff(const Freq& n, double a) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("cube_kernel_coeff: need 0 < a < 1");
    double v = 1.0;
    for (int nk : n)
        v *= nk == 0 ? a : std::sin(M_PI * a * nk) / (M_PI * nk);
    return v;
}

double ball_kernel_coeff(const Freq& n, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("ball_kernel_coeff: need r > 0");
    double d = static_cast<double>(n.size());
    double n2 = 0.0;
    for (int nk : n) n2 += static_cast<double>(nk) * nk;
    if (n2 == 0.0)
        return std::pow(M_PI, 0.5 * d) * std::pow(r, d) / std::tgamma(0.5 * d + 1.0);
    double nn = std::sqrt(n2);
    return std::pow(r / nn, 0.5 * d) * bessel_j(0.5 * d, kTwoPi * r * nn);
}

CoefficientRule CoefficientRule::interval_product(std::size_t dim) {
    return {Kind::IntervalProduct, dim};
}
CoefficientRule CoefficientRule::cube(std::size_t dim, double a) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("CoefficientRule: need 0 < a < 1");
    return {Kind::Cube, dim, a, 0.0};
}
CoefficientRule CoefficientRule::ball(std::size_t dim, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("CoefficientRule: need r > 0");
    return {Kind::Ball, dim, 0.0, r};
}

Complex CoefficientRule::coeff(const Freq& n) const {
    if (n.size() != dim) throw std::invalid_argument("CoefficientRule: dimension mismatch");
    Complex c;
    switch (kind) {
    case Kind::IntervalProduct: c = interval_kernel_coeff(n); break;
    case Kind::Cube: c = {cube_kernel_coeff(n, a), 0.0}; break;
    case Kind::Ball: c = {ball_kernel_coeff(n, r), 0.0}; break;
    }
    if (std::abs(c) < 1e-14) { // exact zeros land here as rounding residue
        std::string msg = "CoefficientRule: kernel coefficient vanishes at n = (";
        for (std::size_t k = 0; k < n.size(); ++k)
            msg += (k ? "," : "") + std::to_string(n[k]);
        throw std::runtime_error(msg + ")");
    }
    return c;
}

BesselScanResult scan_bessel_radius(double alpha, double lo, double hi, double beta,
                                    std::uint64_t kmax, std::uint32_t grid) {
    if (!(lo > 0.0 && lo < hi)) throw std::invalid_argument("scan_bessel_radius: need 0 < lo < hi");
    if (!(beta > 1.25)) throw std::invalid_argument("scan_bessel_radius: need beta > 5/4");
    if (kmax < 1) throw std::invalid_argument("scan_bessel_radius: kmax must be >= 1");
    if (grid < 1) throw std::invalid_argument("scan_bessel_radius: grid must be >= 1");
    BesselScanResult best;
    for (std::uint32_t i = 0; i < grid; ++i) {
        double r = lo + (hi - lo) * (i + 1.0) / (grid + 1.0);
        double cmin = std::numeric_limits<double>::infinity();
        for (std::uint64_t k = 1; k <= kmax; ++k) {
            double v = std::pow(static_cast<double>(k), beta) *
                       std::abs(bessel_j(alpha, r * std::sqrt(static_cast<double>(k))));
            if (v < cmin) {
                cmin = v;
                if (cmin <= best.c) break; // cannot beat the incumbent
            }
        }
        if (cmin > best.c) {
            best.c = cmin;
            best.r = r;
        }
    }
    if (best.c <= 0.0)
        throw std::runtime_error("scan_bessel_radius: all candidates hit a zero; refine the grid");
    return best;
}

std::vector<double> bessel_min_profile(double alpha, double r, double beta,
                                       std::span<const std::uint64_t> ks) {
    std::vector<double> out;
    out.reserve(ks.size());
    double cmin = std::numeric_limits<double>::infinity();
    std::uint64_t k = 1;
    for (std::uint64_t kcap : ks) {
        for (; k <= kcap; ++k)
            cmin = std::min(cmin, std::pow(static_cast<double>(k), beta) *
                                      std::abs(bessel_j(alpha, r * std::sqrt(static_cast<double>(k)))));
        out.push_back(cmin);
    }
    return out;
}

DiophantineResult check_diophantine(double a, double delta, double gamma, std::int64_t kmax) {
    if (kmax < 1) throw std::invalid_argument("check_diophantine: kmax must be >= 1");
    DiophantineResult res;
    res.worst = std::numeric_limits<double>::infinity();
    for (std::int64_t k = 1; k <= kmax; ++k) {
        double ak = a * static_cast<double>(k);
        std::int64_t h = static_cast<std::int64_t>(std::llround(ak));
        // k^gamma |a - h/k| = k^{gamma-1} |ak - h|
        double v = std::pow(static_cast<double>(k), gamma - 1.0) * std::abs(ak - h);
        if (v < res.worst) {
            res.worst = v;
            res.h = h;
            res.k = k;
        }
    }
    res.ok = res.worst >= delta;
    return res;
}

} // namespace kh
