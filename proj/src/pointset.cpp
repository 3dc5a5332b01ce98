#include "kh/pointset.hpp"
#include "kh/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kh {

namespace {

const std::uint64_t kPrimes[16] = {2,  3,  5,  7,  11, 13, 17, 19,
                                   23, 29, 31, 37, 41, 43, 47, 53};

double frac(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0; // floor rounding at integer arguments
    return f;
}

} // namespace

PointSet::PointSet(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
    if (dim_ < 1) throw std::invalid_argument("PointSet: dim must be >= 1");
    if (coords_.empty() || coords_.size() % dim_ != 0)
        throw std::invalid_argument("PointSet: coordinate count not a multiple of dim");
    for (double c : coords_)
        if (!(c >= 0.0 && c < 1.0))
            throw std::out_of_range("PointSet: coordinate outside [0,1)");
}

SpherePointSet::SpherePointSet(std::vector<std::array<double, 3>> points)
    : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("SpherePointSet: empty");
    for (const auto& p : points_) {
        double norm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        if (std::abs(norm - 1.0) > 1e-12)
            throw std::invalid_argument("SpherePointSet: vector not unit norm");
    }
}

PointSet gen_kronecker(std::size_t n, std::size_t dim, std::span<const double> alphas) {
    if (n < 1) throw std::invalid_argument("gen_kronecker: N must be >= 1");
    if (alphas.size() != dim) throw std::invalid_argument("gen_kronecker: need d alphas");
    for (double a : alphas)
        if (!std::isfinite(a)) throw std::invalid_argument("gen_kronecker: non-finite alpha");
    std::vector<double> coords;
    coords.reserve(n * dim);
    for (std::size_t j = 1; j <= n; ++j)
        for (std::size_t k = 0; k < dim; ++k)
            coords.push_back(frac(static_cast<double>(j) * alphas[k]));
    return PointSet(dim, std::move(coords));
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double result = 0.0, scale = inv;
    while (index > 0) {
        result += static_cast<double>(index % base) * scale;
        index /= base;
        scale *= inv;
    }
    return result;
}

PointSet gen_halton(std::size_t n, std::size_t dim) {
    if (n < 1) throw std::invalid_argument("gen_halton: N must be >= 1");
    if (dim > 16) throw std::invalid_argument("gen_halton: unsupported dimension (max 16)");
    std::vector<double> coords;
    coords.reserve(n * dim);
    for (std::size_t j = 1; j <= n; ++j)
        for (std::size_t k = 0; k < dim; ++k)
            coords.push_back(radical_inverse(j, kPrimes[k]));
    return PointSet(dim, std::move(coords));
}

PointSet gen_random(std::size_t n, std::size_t dim, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_random: N must be >= 1");
    std::vector<double> coords(n * dim);
    for (std::size_t i = 0; i < coords.size(); ++i)
        coords[i] = stream_unit(seed, i);
    return PointSet(dim, std::move(coords));
}

SpherePointSet gen_fibonacci_sphere(std::size_t n) {
    if (n < 1) throw std::invalid_argument("gen_fibonacci_sphere: N must be >= 1");
    const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
    std::vector<std::array<double, 3>> pts(n);
    for (std::size_t j = 1; j <= n; ++j) {
        double z = 1.0 - (2.0 * static_cast<double>(j) - 1.0) / static_cast<double>(n);
        double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = golden_angle * static_cast<double>(j);
        pts[j - 1] = {rho * std::cos(phi), rho * std::sin(phi), z};
    }
    return SpherePointSet(std::move(pts));
}

namespace {

void write_rows(std::ofstream& out, std::size_t dim, const std::vector<double>& flat) {
    char buf[40];
    for (std::size_t j = 0; j < flat.size() / dim; ++j) {
        for (std::size_t k = 0; k < dim; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", flat[j * dim + k]);
            out << (k ? "," : "") << buf;
        }
        out << "\n";
    }
}

std::vector<std::vector<double>> parse_rows(std::istream& in, std::size_t dim,
                                            const std::string& path) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 1; // header consumed already
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": malformed value '" + cell + "'");
            }
            if (used != cell.size())
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": trailing garbage in '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != dim)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(dim) + " columns, got " +
                                     std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::size_t parse_header(const std::string& header, bool expect_sphere,
                         const std::string& path) {
    bool sphere = header.find("sphere=1") != std::string::npos;
    if (sphere != expect_sphere)
        throw std::runtime_error(path + ": sphere flag mismatch in header");
    auto pos = header.find("dim=");
    if (header.rfind("#", 0) != 0 || pos == std::string::npos)
        throw std::runtime_error(path + ": missing '# dim=<d>' header");
    return static_cast<std::size_t>(std::stoul(header.substr(pos + 4)));
}

} // namespace

void save_points(const PointSet& pts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_points: cannot open " + path);
    out << "# dim=" << pts.dim() << "\n";
    write_rows(out, pts.dim(), pts.coords());
}

PointSet load_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_points: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error(path + ": empty file");
    std::size_t dim = parse_header(header, false, path);
    auto rows = parse_rows(in, dim, path);
    std::vector<double> flat;
    flat.reserve(rows.size() * dim);
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (double c : rows[j]) {
            if (!(c >= 0.0 && c < 1.0))
                throw std::out_of_range(path + ": coordinate " + std::to_string(c) +
                                        " outside [0,1) at point " + std::to_string(j + 1));
            flat.push_back(c);
        }
    return PointSet(dim, std::move(flat));
}

void save_sphere_points(const SpherePointSet& pts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_sphere_points: cannot open " + path);
    out << "# sphere=1, dim=3\n";
    std::vector<double> flat;
    flat.reserve(pts.size() * 3);
    for (const auto& p : pts.points()) {
        flat.push_back(p[0]);
        flat.push_back(p[1]);
        flat.push_back(p[2]);
    }
    write_rows(out, 3, flat);
}

SpherePointSet load_sphere_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_sphere_points: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error(path + ": empty file");
    std::size_t dim = parse_header(header, true, path);
    if (dim != 3) throw std::runtime_error(path + ": sphere sets must have dim=3");
    auto rows = parse_rows(in, 3, path);
    std::vector<std::array<double, 3>> pts;
    pts.reserve(rows.size());
    for (const auto& r : rows) pts.push_back({r[0], r[1], r[2]});
    return SpherePointSet(std::move(pts));
}

} // namespace kh
