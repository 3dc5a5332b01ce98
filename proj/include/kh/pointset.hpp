#ifndef KH_POINTSET_HPP
#define KH_POINTSET_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kh {

// Quadrature nodes in [0,1)^d, stored row-major. Immutable after
// construction; every coordinate is validated to lie in [0,1).
class PointSet {
public:
    PointSet(std::size_t dim, std::vector<double> coords);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return coords_.size() / dim_; }
    std::span<const double> point(std::size_t j) const {
        return {coords_.data() + j * dim_, dim_};
    }
    const std::vector<double>& coords() const { return coords_; }

private:
    std::size_t dim_;
    std::vector<double> coords_;
};

// Unit vectors on S^2 (norm 1 within 1e-12).
class SpherePointSet {
public:
    explicit SpherePointSet(std::vector<std::array<double, 3>> points);

    std::size_t size() const { return points_.size(); }
    const std::array<double, 3>& operator[](std::size_t j) const { return points_[j]; }
    const std::vector<std::array<double, 3>>& points() const { return points_; }

private:
    std::vector<std::array<double, 3>> points_;
};

PointSet gen_kronecker(std::size_t n, std::size_t dim, std::span<const double> alphas);
PointSet gen_halton(std::size_t n, std::size_t dim);
PointSet gen_random(std::size_t n, std::size_t dim, std::uint64_t seed);
SpherePointSet gen_fibonacci_sphere(std::size_t n);

// CSV format: "# dim=<d>" header (plus "sphere=1" for sphere sets), one
// point per row, >= 15 significant digits.
void save_points(const PointSet& pts, const std::string& path);
PointSet load_points(const std::string& path);
void save_sphere_points(const SpherePointSet& pts, const std::string& path);
SpherePointSet load_sphere_points(const std::string& path);

double radical_inverse(std::uint64_t index, std::uint64_t base);

} // namespace kh

#endif
