#include "kh/region.hpp"
#include "kh/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace kh {

namespace {

double ball_volume(std::size_t d, double r) {
    return std::pow(M_PI, 0.5 * static_cast<double>(d)) * std::pow(r, static_cast<double>(d)) /
           std::tgamma(0.5 * static_cast<double>(d) + 1.0);
}

} // namespace

Region::Region(std::size_t dim, Shape shape) : dim_(dim), shape_(std::move(shape)) {
    if (dim_ < 1) throw std::invalid_argument("Region: dim must be >= 1");
    if (const auto* b = std::get_if<AxisBoxShape>(&shape_)) {
        if (b->lo.size() != dim_ || b->hi.size() != dim_)
            throw std::invalid_argument("Region: box bounds have wrong dimension");
        for (std::size_t k = 0; k < dim_; ++k)
            if (b->lo[k] > b->hi[k]) throw std::invalid_argument("Region: box lo > hi");
    } else if (const auto* s = std::get_if<BallShape>(&shape_)) {
        if (s->center.size() != dim_)
            throw std::invalid_argument("Region: ball center has wrong dimension");
        if (s->radius < 0) throw std::invalid_argument("Region: negative radius");
    } else if (const auto* p = std::get_if<PolytopeShape>(&shape_)) {
        if (p->normals.size() != p->offsets.size())
            throw std::invalid_argument("Region: normals/offsets size mismatch");
        for (const auto& n : p->normals)
            if (n.size() != dim_)
                throw std::invalid_argument("Region: polytope normal has wrong dimension");
    }
}

Region Region::axis_box(std::vector<double> lo, std::vector<double> hi) {
    std::size_t d = lo.size();
    return Region(d, AxisBoxShape{std::move(lo), std::move(hi)});
}

Region Region::ball(std::vector<double> center, double radius) {
    std::size_t d = center.size();
    return Region(d, BallShape{std::move(center), radius});
}

Region Region::polytope(std::size_t dim, std::vector<std::vector<double>> normals,
                        std::vector<double> offsets) {
    return Region(dim, PolytopeShape{std::move(normals), std::move(offsets)});
}

Region Region::simplex_sec4(std::size_t dim, double eps) {
    if (!(eps > 0.0 && eps < 1.0 / static_cast<double>(dim + 1)))
        throw std::invalid_argument("simplex_sec4: need 0 < eps < 1/(d+1)");
    std::vector<std::vector<double>> normals;
    std::vector<double> offsets;
    // x_{k+1} <= x_k
    for (std::size_t k = 0; k + 1 < dim; ++k) {
        std::vector<double> n(dim, 0.0);
        n[k] = -1.0;
        n[k + 1] = 1.0;
        normals.push_back(std::move(n));
        offsets.push_back(0.0);
    }
    // x_d >= eps
    {
        std::vector<double> n(dim, 0.0);
        n[dim - 1] = -1.0;
        normals.push_back(std::move(n));
        offsets.push_back(-eps);
    }
    // sum x_k <= 1 - eps
    normals.push_back(std::vector<double>(dim, 1.0));
    offsets.push_back(1.0 - eps);
    return polytope(dim, std::move(normals), std::move(offsets));
}

AnchoredBox::AnchoredBox(std::vector<double> t_, std::vector<double> shift_)
    : t(std::move(t_)), shift(std::move(shift_)) {
    if (t.size() != shift.size()) throw std::invalid_argument("AnchoredBox: size mismatch");
    for (double tk : t)
        if (!(tk >= 0.0 && tk <= 1.0))
            throw std::invalid_argument("AnchoredBox: t outside [0,1]");
}

SignedMeasure SignedMeasure::qmc(const PointSet& pts) {
    SignedMeasure mu;
    mu.dim = pts.dim();
    mu.uniform_coeff = 1.0;
    double w = 1.0 / static_cast<double>(pts.size());
    mu.atoms.reserve(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
        auto p = pts.point(j);
        mu.atoms.push_back({std::vector<double>(p.begin(), p.end()), w});
    }
    return mu;
}

bool contains(const Region& region, std::span<const double> x) {
    if (x.size() != region.dim())
        throw std::invalid_argument("contains: dimension mismatch");
    if (region.clipped()) {
        for (std::size_t k = 0; k < x.size(); ++k)
            if (x[k] < region.clip_lo()[k] || x[k] > region.clip_hi()[k]) return false;
    }
    return std::visit(
        [&](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, EmptyShape>) {
                return false;
            } else if constexpr (std::is_same_v<T, FullCubeShape>) {
                for (double c : x)
                    if (c < 0.0 || c > 1.0) return false;
                return true;
            } else if constexpr (std::is_same_v<T, AxisBoxShape>) {
                for (std::size_t k = 0; k < x.size(); ++k)
                    if (x[k] < s.lo[k] || x[k] > s.hi[k]) return false;
                return true;
            } else if constexpr (std::is_same_v<T, BallShape>) {
                double d2 = 0.0;
                for (std::size_t k = 0; k < x.size(); ++k) {
                    double d = x[k] - s.center[k];
                    d2 += d * d;
                }
                return d2 <= s.radius * s.radius;
            } else {
                for (std::size_t i = 0; i < s.normals.size(); ++i) {
                    double dot = 0.0;
                    for (std::size_t k = 0; k < x.size(); ++k) dot += s.normals[i][k] * x[k];
                    if (dot > s.offsets[i] + 1e-15 * std::abs(s.offsets[i])) return false;
                }
                return true;
            }
        },
        region.shape());
}

Region clip(const Region& region, const AnchoredBox& box) {
    if (box.t.size() != region.dim())
        throw std::invalid_argument("clip: dimension mismatch");
    std::size_t d = region.dim();
    std::vector<double> lo(d), hi(d);
    for (std::size_t k = 0; k < d; ++k) {
        lo[k] = box.lo(k);
        hi[k] = box.hi(k);
        if (region.clipped()) {
            lo[k] = std::max(lo[k], region.clip_lo()[k]);
            hi[k] = std::min(hi[k], region.clip_hi()[k]);
        }
        if (lo[k] > hi[k]) return Region::empty(d);
    }
    // Box-like shapes absorb the clip and stay boxes.
    if (std::holds_alternative<FullCubeShape>(region.shape())) {
        for (std::size_t k = 0; k < d; ++k) {
            lo[k] = std::max(lo[k], 0.0);
            hi[k] = std::min(hi[k], 1.0);
            if (lo[k] > hi[k]) return Region::empty(d);
        }
        return Region::axis_box(std::move(lo), std::move(hi));
    }
    if (const auto* b = std::get_if<AxisBoxShape>(&region.shape())) {
        for (std::size_t k = 0; k < d; ++k) {
            lo[k] = std::max(lo[k], b->lo[k]);
            hi[k] = std::min(hi[k], b->hi[k]);
            if (lo[k] > hi[k]) return Region::empty(d);
        }
        return Region::axis_box(std::move(lo), std::move(hi));
    }
    if (std::holds_alternative<EmptyShape>(region.shape())) return Region::empty(d);
    Region out = region;
    out.clipped_ = true;
    out.clip_lo_ = std::move(lo);
    out.clip_hi_ = std::move(hi);
    return out;
}

bool Region::bounding_box(std::vector<double>& lo, std::vector<double>& hi) const {
    lo.assign(dim_, 0.0);
    hi.assign(dim_, 1.0);
    if (std::holds_alternative<EmptyShape>(shape_)) return false;
    if (const auto* b = std::get_if<AxisBoxShape>(&shape_)) {
        for (std::size_t k = 0; k < dim_; ++k) {
            lo[k] = std::max(lo[k], b->lo[k]);
            hi[k] = std::min(hi[k], b->hi[k]);
        }
    } else if (const auto* s = std::get_if<BallShape>(&shape_)) {
        for (std::size_t k = 0; k < dim_; ++k) {
            lo[k] = std::max(lo[k], s->center[k] - s->radius);
            hi[k] = std::min(hi[k], s->center[k] + s->radius);
        }
    }
    if (clipped_) {
        for (std::size_t k = 0; k < dim_; ++k) {
            lo[k] = std::max(lo[k], clip_lo_[k]);
            hi[k] = std::min(hi[k], clip_hi_[k]);
        }
    }
    for (std::size_t k = 0; k < dim_; ++k)
        if (lo[k] > hi[k]) return false;
    return true;
}

VolumeEstimate volume(const Region& region, const SamplingConfig& cfg) {
    std::size_t d = region.dim();
    std::vector<double> lo, hi;
    if (!region.bounding_box(lo, hi)) return {0.0, 0.0, EstimateMethod::Exact, 0, 0};

    if (std::holds_alternative<FullCubeShape>(region.shape()) ||
        std::holds_alternative<AxisBoxShape>(region.shape())) {
        // bounding box == the set itself here
        double v = 1.0;
        for (std::size_t k = 0; k < d; ++k) v *= hi[k] - lo[k];
        return {v, 0.0, EstimateMethod::Exact, 0, 0};
    }
    if (const auto* s = std::get_if<BallShape>(&region.shape())) {
        if (!region.clipped()) {
            bool inside = true;
            for (std::size_t k = 0; k < d; ++k)
                inside = inside && s->center[k] - s->radius >= 0.0 &&
                         s->center[k] + s->radius <= 1.0;
            if (inside)
                return {ball_volume(d, s->radius), 0.0, EstimateMethod::Exact, 0, 0};
        }
    }

    if (cfg.samples < 1) throw std::invalid_argument("volume: samples must be >= 1");
    double boxvol = 1.0;
    for (std::size_t k = 0; k < d; ++k) boxvol *= hi[k] - lo[k];
    if (boxvol == 0.0) return {0.0, 0.0, EstimateMethod::Exact, 0, 0};

    std::uint64_t hits = 0;
    std::vector<double> x(d);
    for (std::uint64_t i = 0; i < cfg.samples; ++i) {
        for (std::size_t k = 0; k < d; ++k)
            x[k] = lo[k] + (hi[k] - lo[k]) * stream_unit(cfg.seed, i * d + k);
        if (contains(region, x)) ++hits;
    }
    double p = static_cast<double>(hits) / static_cast<double>(cfg.samples);
    double se = boxvol * std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.samples));
    return {boxvol * p, se, EstimateMethod::MonteCarlo, cfg.samples, cfg.seed};
}

VolumeEstimate measure_of(const SignedMeasure& mu, const Region& region,
                          const SamplingConfig& cfg) {
    if (mu.dim != region.dim())
        throw std::invalid_argument("measure_of: dimension mismatch");
    double atom_sum = 0.0;
    for (const auto& a : mu.atoms)
        if (contains(region, a.x)) atom_sum += a.weight;
    VolumeEstimate v{0.0, 0.0, EstimateMethod::Exact, 0, 0};
    if (mu.uniform_coeff != 0.0) v = volume(region, cfg);
    VolumeEstimate out;
    out.value = atom_sum - mu.uniform_coeff * v.value;
    out.stderr_ = std::abs(mu.uniform_coeff) * v.stderr_;
    out.method = v.method;
    out.samples = v.samples;
    out.seed = v.seed;
    return out;
}

double periodized_measure(const SignedMeasure& mu, const Region& omega,
                          std::span<const double> x, std::span<const double> t,
                          const SamplingConfig& cfg) {
    std::size_t d = omega.dim();
    if (x.size() != d || t.size() != d)
        throw std::invalid_argument("periodized_measure: dimension mismatch");
    if (const auto* b = std::get_if<AxisBoxShape>(&omega.shape())) {
        for (std::size_t k = 0; k < d; ++k)
            if (b->lo[k] < 0.0 || b->hi[k] > 1.0)
                throw std::invalid_argument("periodized_measure: omega outside unit cube");
    }
    if (const auto* s = std::get_if<BallShape>(&omega.shape())) {
        for (std::size_t k = 0; k < d; ++k)
            if (s->center[k] - s->radius < 0.0 || s->center[k] + s->radius > 1.0)
                throw std::invalid_argument("periodized_measure: omega outside unit cube");
    }
    double total = 0.0;
    std::vector<double> shift(d);
    std::vector<int> n(d, -1);
    while (true) {
        for (std::size_t k = 0; k < d; ++k) shift[k] = x[k] + n[k];
        total += measure_of(mu, clip(omega, AnchoredBox({t.begin(), t.end()}, shift)), cfg).value;
        std::size_t k = 0;
        for (; k < d; ++k) {
            if (++n[k] <= 1) break;
            n[k] = -1;
        }
        if (k == d) break;
    }
    return total;
}

Region region_from_json(const std::string& json_text, std::size_t dim_hint) {
    auto j = nlohmann::json::parse(json_text);
    std::string type = j.at("type").get<std::string>();
    if (type == "box")
        return Region::axis_box(j.at("lo").get<std::vector<double>>(),
                                j.at("hi").get<std::vector<double>>());
    if (type == "ball")
        return Region::ball(j.at("center").get<std::vector<double>>(),
                            j.at("r").get<double>());
    if (type == "polytope") {
        auto normals = j.at("normals").get<std::vector<std::vector<double>>>();
        std::size_t d = normals.empty() ? dim_hint : normals.front().size();
        return Region::polytope(d, std::move(normals),
                                j.at("offsets").get<std::vector<double>>());
    }
    if (type == "simplex-sec4") {
        std::size_t d = j.value("dim", dim_hint ? dim_hint : std::size_t{2});
        return Region::simplex_sec4(d, j.at("eps").get<double>());
    }
    if (type == "full") return Region::full_cube(j.value("dim", dim_hint ? dim_hint : std::size_t{1}));
    if (type == "empty") return Region::empty(j.value("dim", dim_hint ? dim_hint : std::size_t{1}));
    throw std::invalid_argument("region_from_json: unknown type '" + type + "'");
}

} // namespace kh
