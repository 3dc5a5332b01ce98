#include "kh/harness.hpp"
#include "kh/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace kh {

using nlohmann::json;

namespace {

// per-axis factor tables multiplied out into a full coefficient map
TrigPoly product_of_axes(std::size_t dim, const std::vector<std::pair<int, Complex>>& axis) {
    TrigPoly f(dim);
    std::vector<std::size_t> idx(dim, 0);
    while (true) {
        Freq n(dim);
        Complex c{1.0, 0.0};
        for (std::size_t k = 0; k < dim; ++k) {
            n[k] = axis[idx[k]].first;
            c *= axis[idx[k]].second;
        }
        f.set_coeff(std::move(n), c);
        std::size_t k = 0;
        for (; k < dim; ++k) {
            if (++idx[k] < axis.size()) break;
            idx[k] = 0;
        }
        if (k == dim) break;
    }
    return f;
}

} // namespace

TrigPoly make_named_integrand(const std::string& name, std::size_t dim) {
    if (name == "const") {
        return TrigPoly::constant(dim, {1.0, 0.0});
    }
    if (name == "exp-sum") {
        TrigPoly f = TrigPoly::constant(dim, {1.0, 0.0});
        for (std::size_t k = 0; k < dim; ++k) {
            Freq n(dim, 0);
            n[k] = 1;
            f.set_coeff(n, {0.5, 0.0});
            n[k] = -1;
            f.set_coeff(n, {0.5, 0.0});
        }
        return f;
    }
    if (name == "product-poly") {
        std::vector<std::pair<int, Complex>> axis = {
            {0, {1.0, 0.0}},   {1, {0.25, 0.0}}, {-1, {0.25, 0.0}},
            {2, {0.0, -0.125}}, {-2, {0.0, 0.125}},
        };
        return product_of_axes(dim, axis);
    }
    if (name.rfind("random-trig:", 0) == 0) {
        int degree = std::stoi(name.substr(12));
        return random_trigpoly(dim, degree, 1);
    }
    throw std::invalid_argument("unknown integrand: " + name);
}

TrigPoly random_trigpoly(std::size_t dim, int degree, std::uint64_t seed) {
    if (dim < 1 || dim > 6) throw std::invalid_argument("random_trigpoly: dim out of range");
    if (degree < 0) throw std::invalid_argument("random_trigpoly: degree must be >= 0");
    TrigPoly f(dim);
    int side = 2 * degree + 1;
    std::vector<int> idx(dim, 0);
    std::uint64_t s = mix64(seed ^ 0x747269676dULL);
    std::uint64_t counter = 0;
    while (true) {
        Freq n(dim);
        for (std::size_t k = 0; k < dim; ++k) n[k] = idx[k] - degree;
        // take one representative per (n, -n) pair
        int sign = 0;
        for (std::size_t k = 0; k < dim && sign == 0; ++k) sign = (n[k] > 0) - (n[k] < 0);
        if (sign >= 0) {
            double decay = 1.0;
            for (int nk : n) decay *= 1.0 + std::abs(nk);
            decay = 1.0 / (decay * decay);
            double re = (2.0 * stream_unit(s, 2 * counter) - 1.0) * decay;
            double im = (2.0 * stream_unit(s, 2 * counter + 1) - 1.0) * decay;
            if (sign == 0) {
                f.set_coeff(n, {re, 0.0});
            } else {
                f.set_coeff(n, {re, im});
                Freq m(dim);
                for (std::size_t k = 0; k < dim; ++k) m[k] = -n[k];
                f.set_coeff(std::move(m), {re, -im});
            }
        }
        ++counter;
        std::size_t k = 0;
        for (; k < dim; ++k) {
            if (++idx[k] < side) break;
            idx[k] = 0;
        }
        if (k == dim) break;
    }
    return f;
}

CallbackFunction sec4_integrand() {
    auto value = [](std::span<const double> x) {
        double s = 1.0 - x[0] - x[1];
        return 1.0 / (x[0] * x[1] * s);
    };
    CallbackFunction f(2, value, /*check_periodicity=*/false);
    f.partials[0b01] = [](std::span<const double> x) {
        double s = 1.0 - x[0] - x[1];
        double f0 = 1.0 / (x[0] * x[1] * s);
        return f0 * (1.0 / s - 1.0 / x[0]);
    };
    f.partials[0b10] = [](std::span<const double> x) {
        double s = 1.0 - x[0] - x[1];
        double f0 = 1.0 / (x[0] * x[1] * s);
        return f0 * (1.0 / s - 1.0 / x[1]);
    };
    f.partials[0b11] = [](std::span<const double> x) {
        double s = 1.0 - x[0] - x[1];
        double f0 = 1.0 / (x[0] * x[1] * s);
        return f0 * ((1.0 / s - 1.0 / x[0]) * (1.0 / s - 1.0 / x[1]) + 1.0 / (s * s));
    };
    return f;
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j = json::parse(text);
    ExperimentConfig cfg;
    cfg.name = j.value("name", std::string{});
    cfg.dim = j.value("dim", std::size_t{2});
    cfg.integrand = j.value("integrand", cfg.integrand);
    if (j.contains("region")) cfg.region_json = j["region"].dump();
    cfg.generator = j.value("generator", cfg.generator);
    if (!j.contains("ns") || !j["ns"].is_array() || j["ns"].empty())
        throw std::invalid_argument("config: 'ns' ladder required");
    for (const auto& v : j["ns"]) cfg.ns.push_back(v.get<std::size_t>());
    for (std::size_t i = 1; i < cfg.ns.size(); ++i)
        if (cfg.ns[i] <= cfg.ns[i - 1])
            throw std::invalid_argument("config: N-ladder must be strictly increasing");
    if (j.contains("variant")) cfg.variant_json = j["variant"].dump();
    if (j.contains("budget")) {
        const auto& b = j["budget"];
        cfg.budget.mt = b.value("mt", cfg.budget.mt);
        cfg.budget.mx = b.value("mx", cfg.budget.mx);
        cfg.budget.cloud = b.value("cloud", cfg.budget.cloud);
    }
    cfg.grid.points_per_axis = j.value("grid", cfg.grid.points_per_axis);
    cfg.volume_cfg.samples = j.value("volume_samples", cfg.volume_cfg.samples);
    cfg.slack = j.value("slack", cfg.slack);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out = j.value("out", std::string{});
    cfg.budget.seed = cfg.seed;
    cfg.volume_cfg.seed = cfg.seed;
    return cfg;
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["name"] = name;
    j["dim"] = dim;
    j["integrand"] = integrand;
    j["region"] = json::parse(region_json);
    j["generator"] = generator;
    j["ns"] = ns;
    j["variant"] = json::parse(variant_json);
    j["budget"] = {{"mt", budget.mt}, {"mx", budget.mx}, {"cloud", budget.cloud}};
    j["grid"] = grid.points_per_axis;
    j["volume_samples"] = volume_cfg.samples;
    j["slack"] = slack;
    j["seed"] = seed;
    if (!out.empty()) j["out"] = out;
    return j.dump();
}

std::uint64_t ExperimentConfig::hash() const {
    json j = json::parse(to_json());
    j.erase("out"); // the sink location does not change the experiment
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

PointSet make_points(const std::string& generator, std::size_t n, std::size_t dim,
                     std::uint64_t seed) {
    if (generator == "halton") return gen_halton(n, dim);
    if (generator == "random") return gen_random(n, dim, seed);
    if (generator == "kronecker") {
        static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
        if (dim > 16) throw std::invalid_argument("kronecker: dim > 16 unsupported");
        std::vector<double> alphas(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            double s = std::sqrt(static_cast<double>(primes[k]));
            alphas[k] = s - std::floor(s);
        }
        return gen_kronecker(n, dim, alphas);
    }
    throw std::invalid_argument("unknown generator: " + generator);
}

KhVariant variant_from_json(const std::string& text) {
    json j = json::parse(text);
    std::string type = j.value("type", std::string{"thm1"});
    if (type == "thm1") {
        Thm1Variant v;
        v.p = j.value("p", v.p);
        v.q = j.value("q", v.q);
        return v;
    }
    if (type == "thm8") {
        Thm8Variant v;
        v.a = j.value("a", v.a);
        v.gamma = j.value("gamma", v.gamma);
        v.dioph_kmax = j.value("kmax", v.dioph_kmax);
        return v;
    }
    if (type == "thm10") {
        Thm10Variant v;
        if (j.contains("r")) {
            v.r = j["r"].get<double>();
        } else {
            // derive a radius from the Bessel scan over 2 pi r
            double lo = j.value("scan_lo", 0.1), hi = j.value("scan_hi", 0.45);
            double beta = j.value("beta", 1.3);
            auto scan = scan_bessel_radius(1.0, 2.0 * M_PI * lo, 2.0 * M_PI * hi, beta,
                                           j.value("kmax", std::uint64_t{10000}),
                                           j.value("scan_grid", std::uint32_t{256}));
            v.r = scan.r / (2.0 * M_PI);
            v.scan_c = scan.c;
        }
        v.gamma = j.value("gamma", v.gamma);
        return v;
    }
    throw std::invalid_argument("unknown variant: " + type);
}

std::string report_to_json(const VerificationReport& rep, std::uint64_t config_hash,
                           std::size_t n) {
    json j;
    j["config_hash"] = config_hash;
    j["n"] = n;
    j["variant"] = rep.variant;
    j["lhs"] = rep.lhs;
    j["lhs_stderr"] = rep.lhs_stderr;
    j["discrepancy"] = rep.discrepancy;
    j["discrepancy_stderr"] = rep.discrepancy_stderr;
    if (rep.discrepancy2 != 0.0) {
        j["discrepancy2"] = rep.discrepancy2;
        j["discrepancy2_stderr"] = rep.discrepancy2_stderr;
    }
    if (rep.variation != 0.0) j["variation"] = rep.variation;
    if (rep.dual_norm != 0.0) j["dual_norm"] = rep.dual_norm;
    if (rep.spectral != 0.0) j["spectral"] = rep.spectral;
    if (rep.constant != 0.0) j["constant"] = rep.constant;
    j["rhs"] = rep.rhs;
    j["ratio"] = rep.ratio;
    j["pass"] = rep.pass;
    j["ratio_only"] = rep.ratio_only;
    j["slack"] = rep.slack;
    j["seed"] = rep.seed;
    if (!rep.note.empty()) j["note"] = rep.note;
    return j.dump();
}

std::vector<VerificationReport> run_experiment(const ExperimentConfig& cfg) {
    TrigPoly f = make_named_integrand(cfg.integrand, cfg.dim);
    Region omega = region_from_json(cfg.region_json, cfg.dim);
    KhVariant variant = variant_from_json(cfg.variant_json);
    VerifyConfig vc;
    vc.budget = cfg.budget;
    vc.budget.seed = cfg.seed;
    vc.grid = cfg.grid;
    vc.volume_cfg = cfg.volume_cfg;
    vc.slack = cfg.slack;

    std::vector<VerificationReport> reports;
    std::ofstream sink;
    if (!cfg.out.empty()) {
        sink.open(cfg.out, std::ios::app);
        if (!sink) throw std::runtime_error("cannot open results file: " + cfg.out);
    }
    std::uint64_t h = cfg.hash();
    for (std::size_t n : cfg.ns) {
        PointSet pts = make_points(cfg.generator, n, cfg.dim, cfg.seed);
        VerificationReport rep = verify_kh(f, omega, pts, variant, vc);
        if (sink.is_open()) sink << report_to_json(rep, h, n) << "\n";
        reports.push_back(std::move(rep));
    }
    return reports;
}

SlopeFit fit_loglog(std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i)
        if (xs[i] > 0.0 && ys[i] > 0.0) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    SlopeFit fit;
    if (lx.size() < 2) {
        fit.degenerate = true;
        return fit;
    }
    double n = static_cast<double>(lx.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
        syy += ly[i] * ly[i];
    }
    double den = n * sxx - sx * sx;
    if (den == 0.0) {
        fit.degenerate = true;
        return fit;
    }
    fit.slope = (n * sxy - sx * sy) / den;
    double sst = syy - sy * sy / n;
    double ssr = fit.slope * (sxy - sx * sy / n);
    fit.r2 = sst > 0.0 ? ssr / sst : 1.0;
    return fit;
}

StudyReport convergence_study(const ExperimentConfig& cfg) {
    if (cfg.ns.size() < 4)
        throw std::invalid_argument("convergence_study: need an N-ladder with >= 4 entries");
    StudyReport out;
    auto reports = run_experiment(cfg);
    std::vector<double> ns, lhs, disc;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        out.rows.push_back({cfg.ns[i], reports[i].lhs, reports[i].discrepancy});
        ns.push_back(static_cast<double>(cfg.ns[i]));
        lhs.push_back(reports[i].lhs);
        disc.push_back(reports[i].discrepancy);
    }
    out.lhs_fit = fit_loglog(ns, lhs);
    out.discrepancy_fit = fit_loglog(ns, disc);
    return out;
}

namespace {

// Monte Carlo of |g| over the simplex via its bounding box.
double simplex_integral_abs(const Region& sigma,
                            const std::function<double(std::span<const double>)>& g,
                            std::uint64_t samples, std::uint64_t seed) {
    std::vector<double> lo, hi;
    if (!sigma.bounding_box(lo, hi)) return 0.0;
    double boxvol = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    std::uint64_t s = mix64(seed ^ 0x73696d70ULL);
    double acc = 0.0;
    double x[2];
    for (std::uint64_t i = 0; i < samples; ++i) {
        x[0] = lo[0] + (hi[0] - lo[0]) * stream_unit(s, 2 * i);
        x[1] = lo[1] + (hi[1] - lo[1]) * stream_unit(s, 2 * i + 1);
        if (contains(sigma, {x, 2})) acc += std::abs(g({x, 2}));
    }
    return boxvol * acc / static_cast<double>(samples);
}

} // namespace

std::string Sec4Table::csv() const {
    std::ostringstream os;
    os << "eps,n,variation_sum,discrepancy,error,bound,pass\n";
    os.precision(12);
    for (const auto& r : rows)
        os << r.eps << "," << r.n << "," << r.variation_sum << "," << r.discrepancy << ","
           << r.error << "," << r.bound << "," << (r.pass ? 1 : 0) << "\n";
    os << "# exponent_fit," << exponent_fit << "\n";
    return os.str();
}

Sec4Table sec4_application(std::span<const double> eps_ladder,
                           std::span<const std::size_t> n_ladder, const Sec4Config& cfg) {
    CallbackFunction f = sec4_integrand();
    Sec4Table table;
    std::vector<double> inv_eps, varsums;
    for (double eps : eps_ladder) {
        if (!(eps > 0.0 && eps < 1.0 / 3.0))
            throw std::invalid_argument("sec4_application: need 0 < eps < 1/3");
        Region sigma = Region::simplex_sec4(2, eps);

        double varsum = 0.0, integral = 0.0;
        for (unsigned mask = 0; mask < 4; ++mask) {
            std::uint64_t seed = mix64(cfg.seed + 101 * mask + 7);
            double term = simplex_integral_abs(
                sigma, [&](std::span<const double> x) { return f.partial(mask, x); },
                cfg.mc_samples, seed);
            varsum += term;
        }
        {
            // signed integral of f itself for the quadrature error
            std::vector<double> lo, hi;
            sigma.bounding_box(lo, hi);
            double boxvol = (hi[0] - lo[0]) * (hi[1] - lo[1]);
            std::uint64_t s = mix64(cfg.seed ^ 0x696e74ULL);
            double acc = 0.0;
            double x[2];
            for (std::uint64_t i = 0; i < cfg.mc_samples; ++i) {
                x[0] = lo[0] + (hi[0] - lo[0]) * stream_unit(s, 2 * i);
                x[1] = lo[1] + (hi[1] - lo[1]) * stream_unit(s, 2 * i + 1);
                if (contains(sigma, {x, 2})) acc += f.value({x, 2});
            }
            integral = boxvol * acc / static_cast<double>(cfg.mc_samples);
        }
        inv_eps.push_back(1.0 / eps);
        varsums.push_back(varsum);

        for (std::size_t n : n_ladder) {
            PointSet pts = gen_halton(n, 2);
            double mean = 0.0;
            for (std::size_t j = 0; j < pts.size(); ++j)
                if (contains(sigma, pts.point(j))) mean += f.value(pts.point(j));
            mean /= static_cast<double>(pts.size());
            double error = std::abs(mean - integral);

            BoxSearchConfig sc = cfg.search;
            sc.seed = cfg.seed;
            auto disc = intersection_discrepancy(sigma, pts, sc);

            Sec4Row row;
            row.eps = eps;
            row.n = n;
            row.variation_sum = varsum;
            row.discrepancy = disc.value;
            row.error = error;
            row.bound = disc.value * varsum;
            row.pass = error <= row.bound;
            table.rows.push_back(row);
        }
    }
    table.exponent_fit = fit_loglog(inv_eps, varsums).slope;
    return table;
}

} // namespace kh
