#ifndef KH_KERNELS_HPP
#define KH_KERNELS_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "kh/calculus.hpp"

namespace kh {

// Fourier coefficient of the interval-superposition kernel:
// prod_k (2 delta(n_k) + 2 pi i n_k)^{-1}.
Complex interval_kernel_coeff(const Freq& n);

// The kernel restricted to one cell: prod_k (1 - x_k) on [0,1)^d.
double interval_kernel_spatial(std::span<const double> x);

// prod_k s(n_k) with s(0) = a and s(m) = sin(pi a m) / (pi m).
double cube_kernel_coeff(const Freq& n, double a);

// r^{d/2} |n|^{-d/2} J_{d/2}(2 pi r |n|); ball volume at n = 0.
double ball_kernel_coeff(const Freq& n, double r);

// Bessel function of the first kind, order alpha >= -1/2, t >= 0.
// Power series below t = 15, closed trigonometric forms for half-integer
// orders, asymptotic expansion otherwise.
double bessel_j(double alpha, double t);

// Multiplier sequence 1/phi(n) in its three torus guises. coeff() throws
// if the kernel coefficient vanishes at some n (degenerate parameter).
struct CoefficientRule {
    enum class Kind { IntervalProduct, Cube, Ball };
    Kind kind;
    std::size_t dim;
    double a = 0.0; // cube side, in (0,1)
    double r = 0.0; // ball radius

    static CoefficientRule interval_product(std::size_t dim);
    static CoefficientRule cube(std::size_t dim, double a);
    static CoefficientRule ball(std::size_t dim, double r);

    Complex coeff(const Freq& n) const;
};

struct BesselScanResult {
    double r = 0.0; // argmax radius
    double c = 0.0; // min_{1<=k<=K} k^beta |J_alpha(r sqrt(k))|
};

// Constructive form of the almost-every-radius existence claim: uniform
// grid of candidates in (lo, hi), deterministic argmax (smallest r wins
// ties).
BesselScanResult scan_bessel_radius(double alpha, double lo, double hi, double beta,
                                    std::uint64_t kmax, std::uint32_t grid = 512);

// min_{1<=k<=K} k^beta |J_alpha(r sqrt(k))| for each K in ks.
std::vector<double> bessel_min_profile(double alpha, double r, double beta,
                                       std::span<const std::uint64_t> ks);

struct DiophantineResult {
    bool ok = false;
    double worst = 0.0; // min over k <= kmax of k^gamma |a - h/k|
    std::int64_t h = 0, k = 0;
};

// Checks |a - h/k| >= delta k^{-gamma} for all k <= kmax, h = round(ak).
DiophantineResult check_diophantine(double a, double delta, double gamma,
                                    std::int64_t kmax);

} // namespace kh

#endif
