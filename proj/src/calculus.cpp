#include "kh/calculus.hpp"
#include "kh/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace kh {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap01(double x) {
    double f = x - std::floor(x);
    return f >= 1.0 ? 0.0 : f;
}

// e^{2 pi i n s} integrated over [lo, hi].
Complex exp_antiderivative(int n, double lo, double hi) {
    if (n == 0) return {hi - lo, 0.0};
    Complex i2pin(0.0, kTwoPi * n);
    return (std::exp(i2pin * hi) - std::exp(i2pin * lo)) / i2pin;
}

// Values of f on the d-dimensional midpoint grid with m points per axis,
// accumulated one separable coefficient at a time.
std::vector<Complex> eval_grid(const TrigPoly& f, int m) {
    std::size_t d = f.dim();
    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) total *= static_cast<std::size_t>(m);
    std::vector<Complex> out(total, Complex{0.0, 0.0});
    std::vector<std::vector<Complex>> axis(d, std::vector<Complex>(m));
    std::vector<std::size_t> idx(d);
    for (const auto& [n, c] : f.coeffs()) {
        for (std::size_t k = 0; k < d; ++k)
            for (int i = 0; i < m; ++i)
                axis[k][i] = std::exp(Complex(0.0, kTwoPi * n[k] * (i + 0.5) / m));
        std::fill(idx.begin(), idx.end(), 0);
        for (std::size_t flat = 0; flat < total; ++flat) {
            Complex v = c;
            for (std::size_t k = 0; k < d; ++k) v *= axis[k][idx[k]];
            out[flat] += v;
            for (std::size_t k = 0; k < d; ++k) {
                if (++idx[k] < static_cast<std::size_t>(m)) break;
                idx[k] = 0;
            }
        }
    }
    return out;
}

double lp_norm(const TrigPoly& f, double p, const GridConfig& grid) {
    if (p == 2.0) { // Parseval, exact
        double s = 0.0;
        for (const auto& [n, c] : f.coeffs()) s += std::norm(c);
        return std::sqrt(s);
    }
    auto vals = eval_grid(f, grid.points_per_axis);
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : vals) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (const auto& v : vals) s += std::pow(std::abs(v), p);
    return std::pow(s / static_cast<double>(vals.size()), 1.0 / p);
}

} // namespace

TrigPoly TrigPoly::constant(std::size_t dim, Complex c) {
    TrigPoly f(dim);
    f.set_coeff(Freq(dim, 0), c);
    return f;
}

void TrigPoly::set_coeff(Freq n, Complex c) {
    if (n.size() != dim_) throw std::invalid_argument("TrigPoly: frequency dimension mismatch");
    if (c == Complex{0.0, 0.0})
        coeffs_.erase(n);
    else
        coeffs_[std::move(n)] = c;
}

Complex TrigPoly::coeff(const Freq& n) const {
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? Complex{0.0, 0.0} : it->second;
}

Complex TrigPoly::eval(std::span<const double> x) const {
    if (x.size() != dim_) throw std::invalid_argument("TrigPoly::eval: dimension mismatch");
    Complex s{0.0, 0.0};
    for (const auto& [n, c] : coeffs_) {
        double phase = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) phase += n[k] * x[k];
        s += c * std::exp(Complex(0.0, kTwoPi * phase));
    }
    return s;
}

TrigPoly TrigPoly::derivative(unsigned alpha_mask) const {
    TrigPoly out(dim_);
    for (const auto& [n, c] : coeffs_) {
        Complex m = c;
        for (std::size_t k = 0; k < dim_; ++k)
            if (alpha_mask & (1u << k)) m *= Complex(0.0, kTwoPi * n[k]);
        if (m != Complex{0.0, 0.0}) out.coeffs_[n] = m;
    }
    return out;
}

TrigPoly TrigPoly::average_out(unsigned beta_mask) const {
    TrigPoly out(dim_);
    for (const auto& [n, c] : coeffs_) {
        bool keep = true;
        for (std::size_t k = 0; k < dim_; ++k)
            if ((beta_mask & (1u << k)) && n[k] != 0) {
                keep = false;
                break;
            }
        if (keep) out.coeffs_[n] += c;
    }
    return out;
}

TrigPoly TrigPoly::scaled(Complex a) const {
    TrigPoly out(dim_);
    if (a == Complex{0.0, 0.0}) return out;
    for (const auto& [n, c] : coeffs_) out.coeffs_[n] = a * c;
    return out;
}

int TrigPoly::max_degree() const {
    int deg = 0;
    for (const auto& [n, c] : coeffs_)
        for (int nk : n) deg = std::max(deg, std::abs(nk));
    return deg;
}

CallbackFunction::CallbackFunction(std::size_t dim_,
                                   std::function<double(std::span<const double>)> value_,
                                   bool check_periodicity)
    : dim(dim_), value(std::move(value_)) {
    if (dim < 1) throw std::invalid_argument("CallbackFunction: dim must be >= 1");
    if (!value) throw std::invalid_argument("CallbackFunction: missing value callback");
    if (!check_periodicity) return;
    std::vector<double> x(dim), y(dim);
    for (int probe = 0; probe < 100; ++probe) {
        for (std::size_t k = 0; k < dim; ++k)
            x[k] = stream_unit(0xfeedULL, probe * dim + k);
        std::size_t axis = stream_u64(0xbeefULL, probe) % dim;
        y = x;
        y[axis] = x[axis] + 1.0;
        if (std::abs(value(x) - value(y)) > 1e-8)
            throw std::invalid_argument("CallbackFunction: value callback is not 1-periodic");
    }
}

double CallbackFunction::partial(unsigned alpha_mask, std::span<const double> x) const {
    if (alpha_mask == 0) return value(x);
    if (auto it = partials.find(alpha_mask); it != partials.end()) return it->second(x);
    unsigned k = static_cast<unsigned>(std::countr_zero(alpha_mask));
    unsigned rest = alpha_mask & (alpha_mask - 1);
    std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
    xp[k] = x[k] + fd_step;
    xm[k] = x[k] - fd_step;
    return (partial(rest, xp) - partial(rest, xm)) / (2.0 * fd_step);
}

double variation_p(const TrigPoly& f, double p, const GridConfig& grid) {
    if (p < 1.0) throw std::invalid_argument("variation_p: p must be >= 1");
    std::size_t d = f.dim();
    double total = 0.0;
    for (unsigned alpha = 0; alpha < (1u << d); ++alpha) {
        int bits = std::popcount(alpha);
        total += std::pow(2.0, static_cast<double>(d - bits)) *
                 lp_norm(f.derivative(alpha), p, grid);
    }
    return total;
}

double variation_p(const CallbackFunction& f, double p, const GridConfig& grid) {
    if (p < 1.0) throw std::invalid_argument("variation_p: p must be >= 1");
    std::size_t d = f.dim;
    int m = grid.points_per_axis;
    std::size_t total_pts = 1;
    for (std::size_t k = 0; k < d; ++k) total_pts *= static_cast<std::size_t>(m);
    std::vector<double> x(d);
    std::vector<std::size_t> idx(d);
    double total = 0.0;
    for (unsigned alpha = 0; alpha < (1u << d); ++alpha) {
        std::fill(idx.begin(), idx.end(), 0);
        double acc = 0.0, sup = 0.0;
        for (std::size_t flat = 0; flat < total_pts; ++flat) {
            for (std::size_t k = 0; k < d; ++k) x[k] = (idx[k] + 0.5) / m;
            double v = std::abs(f.partial(alpha, x));
            if (std::isinf(p))
                sup = std::max(sup, v);
            else
                acc += std::pow(v, p);
            for (std::size_t k = 0; k < d; ++k) {
                if (++idx[k] < static_cast<std::size_t>(m)) break;
                idx[k] = 0;
            }
        }
        double norm = std::isinf(p) ? sup
                                    : std::pow(acc / static_cast<double>(total_pts), 1.0 / p);
        total += std::pow(2.0, static_cast<double>(d - std::popcount(alpha))) * norm;
    }
    return total;
}

TrigPoly apply_D_fourier(const TrigPoly& f) {
    TrigPoly out(f.dim());
    for (const auto& [n, c] : f.coeffs()) {
        Complex m{1.0, 0.0};
        for (int nk : n) m *= nk == 0 ? Complex{2.0, 0.0} : Complex(0.0, -kTwoPi * nk);
        out.set_coeff(n, m * c);
    }
    return out;
}

Complex apply_D_spatial(const TrigPoly& f, std::span<const double> x) {
    std::size_t d = f.dim();
    unsigned full = (1u << d) - 1u;
    Complex total{0.0, 0.0};
    for (unsigned alpha = 0; alpha <= full; ++alpha) {
        unsigned beta = full & ~alpha;
        double sign = std::popcount(alpha) % 2 == 0 ? 1.0 : -1.0;
        double w = std::pow(2.0, static_cast<double>(std::popcount(beta)));
        total += sign * w * f.derivative(alpha).average_out(beta).eval(x);
    }
    return total;
}

Complex apply_D_spatial(const CallbackFunction& f, std::span<const double> x,
                        const GridConfig& grid) {
    std::size_t d = f.dim;
    unsigned full = (1u << d) - 1u;
    int m = grid.points_per_axis;
    double total = 0.0;
    std::vector<double> y(d);
    for (unsigned alpha = 0; alpha <= full; ++alpha) {
        unsigned beta = full & ~alpha;
        std::vector<unsigned> beta_axes;
        for (std::size_t k = 0; k < d; ++k)
            if (beta & (1u << k)) beta_axes.push_back(static_cast<unsigned>(k));
        std::size_t cells = 1;
        for (std::size_t i = 0; i < beta_axes.size(); ++i) cells *= static_cast<std::size_t>(m);
        double avg = 0.0;
        std::vector<std::size_t> idx(beta_axes.size(), 0);
        for (std::size_t flat = 0; flat < cells; ++flat) {
            for (std::size_t k = 0; k < d; ++k) y[k] = x[k];
            for (std::size_t i = 0; i < beta_axes.size(); ++i)
                y[beta_axes[i]] = wrap01(x[beta_axes[i]] + (idx[i] + 0.5) / m);
            avg += f.partial(alpha, y);
            for (std::size_t i = 0; i < beta_axes.size(); ++i) {
                if (++idx[i] < static_cast<std::size_t>(m)) break;
                idx[i] = 0;
            }
        }
        avg /= static_cast<double>(cells);
        double sign = std::popcount(alpha) % 2 == 0 ? 1.0 : -1.0;
        total += sign * std::pow(2.0, static_cast<double>(std::popcount(beta))) * avg;
    }
    return {total, 0.0};
}

double spectral_norm(const TrigPoly& f, const SpectralNorm& norm) {
    if (norm.gamma <= 0.0) throw std::invalid_argument("spectral_norm: gamma must be > 0");
    if (norm.kind == SpectralKind::Zonal)
        throw std::invalid_argument("spectral_norm: zonal norms apply to sphere expansions");
    double s = 0.0;
    for (const auto& [n, c] : f.coeffs()) {
        double w = 1.0;
        if (norm.kind == SpectralKind::Product) {
            for (int nk : n) w *= std::pow(1.0 + std::abs(nk), 2.0 * norm.gamma);
        } else {
            double n2 = 0.0;
            for (int nk : n) n2 += static_cast<double>(nk) * nk;
            w = std::pow(1.0 + n2, norm.gamma);
        }
        s += w * std::norm(c);
    }
    return std::sqrt(s);
}

Complex mu_hat(const SignedMeasure& mu, const Freq& n) {
    Complex s{0.0, 0.0};
    for (const auto& a : mu.atoms) {
        double phase = 0.0;
        for (std::size_t k = 0; k < n.size(); ++k) phase += n[k] * a.x[k];
        s += a.weight * std::exp(Complex(0.0, -kTwoPi * phase));
    }
    bool zero = std::all_of(n.begin(), n.end(), [](int v) { return v == 0; });
    if (zero) s -= mu.uniform_coeff;
    return s;
}

Complex pair(const TrigPoly& f, const SignedMeasure& mu) {
    if (f.dim() != mu.dim) throw std::invalid_argument("pair: dimension mismatch");
    Complex s{0.0, 0.0};
    for (const auto& [n, c] : f.coeffs()) s += c * std::conj(mu_hat(mu, n));
    return s;
}

namespace {

// Exact integral of a trig poly over an axis box (per-axis antiderivatives).
Complex box_integral(const TrigPoly& f, const std::vector<double>& lo,
                     const std::vector<double>& hi) {
    Complex total{0.0, 0.0};
    for (const auto& [n, c] : f.coeffs()) {
        Complex v = c;
        for (std::size_t k = 0; k < n.size(); ++k) v *= exp_antiderivative(n[k], lo[k], hi[k]);
        total += v;
    }
    return total;
}

bool box_like(const Region& omega) {
    return std::holds_alternative<FullCubeShape>(omega.shape()) ||
           std::holds_alternative<AxisBoxShape>(omega.shape()) ||
           std::holds_alternative<EmptyShape>(omega.shape());
}

template <typename F>
QmcErrorResult qmc_error_impl(const F& evaluate, std::size_t dim, const Region& omega,
                              const PointSet& pts, const SamplingConfig& cfg,
                              const TrigPoly* exact_poly) {
    if (pts.dim() != dim || omega.dim() != dim)
        throw std::invalid_argument("qmc_error: dimension mismatch");
    Complex node_sum{0.0, 0.0};
    for (std::size_t j = 0; j < pts.size(); ++j) {
        auto p = pts.point(j);
        if (contains(omega, p)) node_sum += evaluate(p);
    }
    node_sum /= static_cast<double>(pts.size());

    Complex integral{0.0, 0.0};
    double se = 0.0;
    if (std::holds_alternative<EmptyShape>(omega.shape())) {
        // nothing
    } else if (exact_poly != nullptr && box_like(omega)) {
        std::vector<double> lo, hi;
        if (omega.bounding_box(lo, hi)) integral = box_integral(*exact_poly, lo, hi);
    } else {
        std::vector<double> lo, hi;
        if (omega.bounding_box(lo, hi)) {
            double boxvol = 1.0;
            for (std::size_t k = 0; k < dim; ++k) boxvol *= hi[k] - lo[k];
            Complex acc{0.0, 0.0};
            double acc2 = 0.0;
            std::vector<double> x(dim);
            for (std::uint64_t i = 0; i < cfg.samples; ++i) {
                for (std::size_t k = 0; k < dim; ++k)
                    x[k] = lo[k] + (hi[k] - lo[k]) * stream_unit(cfg.seed, i * dim + k);
                if (contains(omega, x)) {
                    Complex v = evaluate(x);
                    acc += v;
                    acc2 += std::norm(v);
                }
            }
            double ns = static_cast<double>(cfg.samples);
            integral = boxvol * acc / ns;
            double var = std::max(0.0, acc2 / ns - std::norm(acc / ns));
            se = boxvol * std::sqrt(var / ns);
        }
    }
    QmcErrorResult out;
    out.signed_error = node_sum - integral;
    out.value = std::abs(out.signed_error);
    out.stderr_ = se;
    return out;
}

} // namespace

QmcErrorResult qmc_error(const TrigPoly& f, const Region& omega, const PointSet& pts,
                         const SamplingConfig& cfg) {
    return qmc_error_impl([&](std::span<const double> x) { return f.eval(x); }, f.dim(), omega,
                          pts, cfg, &f);
}

QmcErrorResult qmc_error(const CallbackFunction& f, const Region& omega, const PointSet& pts,
                         const SamplingConfig& cfg) {
    return qmc_error_impl(
        [&](std::span<const double> x) { return Complex{f.value(x), 0.0}; }, f.dim, omega, pts,
        cfg, nullptr);
}

} // namespace kh
