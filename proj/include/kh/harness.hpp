#ifndef KH_HARNESS_HPP
#define KH_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kh/discrepancy.hpp"
#include "kh/sphere.hpp"

namespace kh {

// Named torus integrands used by the CLI and the experiment configs.
//   const        : f = 1
//   exp-sum      : 1 + sum_k cos(2 pi x_k)
//   product-poly : prod_k (1 + cos(2 pi x_k)/2 + sin(4 pi x_k)/4)
TrigPoly make_named_integrand(const std::string& name, std::size_t dim);

// Seeded polynomial with frequencies |n_k| <= degree and decaying random
// coefficients; real-valued (Hermitian coefficient pairs).
TrigPoly random_trigpoly(std::size_t dim, int degree, std::uint64_t seed);

// The singular integrand of the simplex application (d = 2 only):
// f = 1/(x y (1-x-y)) with hand-derived exact mixed partials.
CallbackFunction sec4_integrand();

struct ExperimentConfig {
    std::string name;
    std::size_t dim = 2;
    std::string integrand = "exp-sum"; // named; "random-trig:<degree>" also accepted
    std::string region_json = "{\"type\":\"full\"}";
    std::string generator = "halton"; // halton | kronecker | random
    std::vector<std::size_t> ns;      // strictly increasing ladder
    std::string variant_json = "{\"type\":\"thm1\",\"p\":2,\"q\":2}";
    SampleBudget budget;
    GridConfig grid;
    SamplingConfig volume_cfg;
    double slack = 0.05;
    std::uint64_t seed = 0;
    std::string out; // optional JSON-lines sink

    static ExperimentConfig from_json(const std::string& text);
    std::string to_json() const;
    std::uint64_t hash() const; // over the canonical JSON
};

PointSet make_points(const std::string& generator, std::size_t n, std::size_t dim,
                     std::uint64_t seed);
KhVariant variant_from_json(const std::string& text);

// One line of JSON per report; embeds config hash, N, seeds, budgets.
std::string report_to_json(const VerificationReport& rep, std::uint64_t config_hash,
                           std::size_t n);

// One report per N in the ladder; appended to cfg.out when set.
std::vector<VerificationReport> run_experiment(const ExperimentConfig& cfg);

struct SlopeFit {
    double slope = 0.0;
    double r2 = 0.0;
    bool degenerate = false; // fewer than two positive samples
};

// Least squares of log(y) against log(x), ignoring non-positive y.
SlopeFit fit_loglog(std::span<const double> xs, std::span<const double> ys);

struct StudyRow {
    std::size_t n = 0;
    double lhs = 0.0;
    double discrepancy = 0.0;
};

struct StudyReport {
    std::vector<StudyRow> rows;
    SlopeFit lhs_fit;
    SlopeFit discrepancy_fit;
};

// Requires a ladder of at least 4 sizes; slopes are observational.
StudyReport convergence_study(const ExperimentConfig& cfg);

struct Sec4Row {
    double eps = 0.0;
    std::size_t n = 0;
    double variation_sum = 0.0; // sum_alpha int_Sigma |d^alpha f|
    double discrepancy = 0.0;
    double error = 0.0; // |qmc - integral| for f chi_Sigma
    double bound = 0.0; // discrepancy * variation_sum
    bool pass = false;
};

struct Sec4Config {
    std::uint64_t mc_samples = 1u << 17; // per simplex integral
    BoxSearchConfig search;
    std::uint64_t seed = 0;
};

struct Sec4Table {
    std::vector<Sec4Row> rows;
    double exponent_fit = 0.0; // slope of log(variation_sum) vs log(1/eps)
    std::string csv() const;
};

// d = 2 pipeline over an eps ladder and an N ladder of Halton nodes.
Sec4Table sec4_application(std::span<const double> eps_ladder,
                           std::span<const std::size_t> n_ladder, const Sec4Config& cfg = {});

} // namespace kh

#endif
