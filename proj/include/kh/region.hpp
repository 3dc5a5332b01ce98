#ifndef KH_REGION_HPP
#define KH_REGION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kh/pointset.hpp"

namespace kh {

struct EmptyShape {};
struct FullCubeShape {};

struct AxisBoxShape {
    std::vector<double> lo, hi; // lo_k <= hi_k
};

struct BallShape {
    std::vector<double> center;
    double radius; // >= 0
};

// Closed set { x : n_i . x <= c_i for all i }.
struct PolytopeShape {
    std::vector<std::vector<double>> normals;
    std::vector<double> offsets;
};

// A Borel test set in [0,1]^d. All variants are closed sets with exact
// membership. clip() attaches an axis-box constraint; membership is the
// conjunction.
class Region {
public:
    using Shape = std::variant<EmptyShape, FullCubeShape, AxisBoxShape, BallShape, PolytopeShape>;

    Region(std::size_t dim, Shape shape);

    static Region empty(std::size_t dim) { return Region(dim, EmptyShape{}); }
    static Region full_cube(std::size_t dim) { return Region(dim, FullCubeShape{}); }
    static Region axis_box(std::vector<double> lo, std::vector<double> hi);
    static Region ball(std::vector<double> center, double radius);
    static Region polytope(std::size_t dim, std::vector<std::vector<double>> normals,
                           std::vector<double> offsets);
    // The simplex {x_1 >= x_2 >= ... >= x_d >= eps, 1 - sum x_k >= eps}.
    static Region simplex_sec4(std::size_t dim, double eps);

    std::size_t dim() const { return dim_; }
    const Shape& shape() const { return shape_; }
    bool clipped() const { return clipped_; }
    const std::vector<double>& clip_lo() const { return clip_lo_; }
    const std::vector<double>& clip_hi() const { return clip_hi_; }

    // Bounding box, already intersected with [0,1]^d and any clip box.
    // Returns false if provably empty.
    bool bounding_box(std::vector<double>& lo, std::vector<double>& hi) const;

    friend Region clip(const Region& region, const struct AnchoredBox& box);

private:
    std::size_t dim_;
    Shape shape_;
    bool clipped_ = false;
    std::vector<double> clip_lo_, clip_hi_;
};

// The translated anchored interval shift - I(t) = [shift - t, shift].
struct AnchoredBox {
    std::vector<double> t;     // edge lengths, in [0,1]
    std::vector<double> shift; // x + n

    AnchoredBox(std::vector<double> t_, std::vector<double> shift_);
    double lo(std::size_t k) const { return shift[k] - t[k]; }
    double hi(std::size_t k) const { return shift[k]; }
};

// mu(S) = sum of atom weights in S - uniform_coeff * vol(S).
struct SignedMeasure {
    struct Atom {
        std::vector<double> x;
        double weight;
    };
    std::size_t dim = 1;
    std::vector<Atom> atoms;
    double uniform_coeff = 0.0;

    // N^{-1} sum of deltas at the nodes minus Lebesgue measure.
    static SignedMeasure qmc(const PointSet& pts);
    static SignedMeasure zero(std::size_t dim) { return {dim, {}, 0.0}; }
};

enum class EstimateMethod { Exact, MonteCarlo };

struct VolumeEstimate {
    double value = 0.0;
    double stderr_ = 0.0; // 0 iff exact
    EstimateMethod method = EstimateMethod::Exact;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

struct SamplingConfig {
    std::uint64_t samples = 1u << 16;
    std::uint64_t seed = 0;
};

bool contains(const Region& region, std::span<const double> x);
Region clip(const Region& region, const AnchoredBox& box);
VolumeEstimate volume(const Region& region, const SamplingConfig& cfg = {});
VolumeEstimate measure_of(const SignedMeasure& mu, const Region& region,
                          const SamplingConfig& cfg = {});

// Sum over n in {-1,0,1}^d of mu((x + n - I(t)) cap omega); exact lattice
// sum when omega is inside the unit cube (rejected otherwise).
double periodized_measure(const SignedMeasure& mu, const Region& omega,
                          std::span<const double> x, std::span<const double> t,
                          const SamplingConfig& cfg = {});

// Region literal from a JSON string, per the CLI config schema.
Region region_from_json(const std::string& json_text, std::size_t dim_hint = 0);

} // namespace kh

#endif
