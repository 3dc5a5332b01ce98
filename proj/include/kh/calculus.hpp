#ifndef KH_CALCULUS_HPP
#define KH_CALCULUS_HPP

#include <complex>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "kh/region.hpp"

namespace kh {

using Freq = std::vector<int>;
using Complex = std::complex<double>;

// Finite trigonometric expansion f(x) = sum_n c(n) e^{2 pi i n.x}.
class TrigPoly {
public:
    explicit TrigPoly(std::size_t dim) : dim_(dim) {}

    static TrigPoly constant(std::size_t dim, Complex c);

    std::size_t dim() const { return dim_; }
    const std::map<Freq, Complex>& coeffs() const { return coeffs_; }
    void set_coeff(Freq n, Complex c);
    Complex coeff(const Freq& n) const;

    Complex eval(std::span<const double> x) const;
    // Multiply coefficient n by prod over set bits of alpha of (2 pi i n_k).
    TrigPoly derivative(unsigned alpha_mask) const;
    // Drop every coefficient with n_k != 0 for some set bit of beta
    // (averaging over those coordinates).
    TrigPoly average_out(unsigned beta_mask) const;
    TrigPoly scaled(Complex a) const;
    int max_degree() const;

private:
    std::size_t dim_;
    std::map<Freq, Complex> coeffs_;
};

// Integrand given by callbacks; 1-periodicity of the value callback is
// probe-checked on construction. Missing partials fall back to central
// finite differences at step fd_step.
struct CallbackFunction {
    std::size_t dim;
    std::function<double(std::span<const double>)> value;
    std::map<unsigned, std::function<double(std::span<const double>)>> partials;
    double fd_step = 1e-5;

    CallbackFunction(std::size_t dim_, std::function<double(std::span<const double>)> value_,
                     bool check_periodicity = true);

    double partial(unsigned alpha_mask, std::span<const double> x) const;
};

enum class SpectralKind { Product, Radial, Zonal };

struct SpectralNorm {
    SpectralKind kind;
    double gamma; // > 0
};

struct GridConfig {
    int points_per_axis = 128; // midpoint rule
};

double variation_p(const TrigPoly& f, double p, const GridConfig& grid = {});
double variation_p(const CallbackFunction& f, double p, const GridConfig& grid = {});

TrigPoly apply_D_fourier(const TrigPoly& f);
Complex apply_D_spatial(const TrigPoly& f, std::span<const double> x);
Complex apply_D_spatial(const CallbackFunction& f, std::span<const double> x,
                        const GridConfig& grid = {});

double spectral_norm(const TrigPoly& f, const SpectralNorm& norm);

Complex mu_hat(const SignedMeasure& mu, const Freq& n);
Complex pair(const TrigPoly& f, const SignedMeasure& mu);

struct QmcErrorResult {
    double value = 0.0;   // |N^{-1} sum (f chi_Omega)(x_j) - integral|
    double stderr_ = 0.0; // Monte Carlo error of the reference integral
    Complex signed_error{0.0, 0.0};
};

QmcErrorResult qmc_error(const TrigPoly& f, const Region& omega, const PointSet& pts,
                         const SamplingConfig& cfg = {});
QmcErrorResult qmc_error(const CallbackFunction& f, const Region& omega, const PointSet& pts,
                         const SamplingConfig& cfg = {});

} // namespace kh

#endif
