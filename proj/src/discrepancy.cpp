#include "kh/discrepancy.hpp"
#include "kh/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kh {

namespace {

// ---------------------------------------------------------------- star

// Final axis: ys sorted ascending. Checks every critical t (each distinct
// coordinate, from below and from above) plus t = 1.
double star_axis_core(const std::vector<double>& ys, double weight, double ntot) {
    double best = 0.0;
    std::size_t m = ys.size(), i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j < m && ys[j] == ys[i]) ++j;
        double v = weight * ys[i];
        best = std::max(best, std::abs(static_cast<double>(i) / ntot - v));
        best = std::max(best, std::abs(static_cast<double>(j) / ntot - v));
        i = j;
    }
    best = std::max(best, std::abs(static_cast<double>(m) / ntot - weight));
    return best;
}

// points: rows of the remaining axes, already sorted by the final axis.
double star_recurse(const std::vector<std::vector<double>>& points, std::size_t axis,
                    std::size_t dim, double weight, double ntot) {
    if (axis + 1 == dim) {
        std::vector<double> ys;
        ys.reserve(points.size());
        for (const auto& p : points) ys.push_back(p[axis]);
        return star_axis_core(ys, weight, ntot); // already sorted
    }
    std::vector<double> values;
    values.reserve(points.size());
    for (const auto& p : points) values.push_back(p[axis]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    double best = 0.0;
    std::vector<std::vector<double>> subset;
    auto eval_at = [&](double c, bool open) {
        subset.clear();
        for (const auto& p : points)
            if (open ? p[axis] < c : p[axis] <= c) subset.push_back(p);
        best = std::max(best, star_recurse(subset, axis + 1, dim, weight * c, ntot));
    };
    for (double c : values) {
        eval_at(c, true);
        eval_at(c, false);
    }
    eval_at(1.0, false);
    return best;
}

// ---------------------------------------------------------- evaluator

// Shared state for the periodized-measure sample loops: atoms restricted
// to Omega, plus a reusable volume cloud when Omega is not box-like.
struct PeriodizedEvaluator {
    std::size_t d = 0;
    double ucoeff = 0.0;
    std::vector<double> atom_x; // flattened, atoms inside Omega only
    std::vector<double> atom_w;
    bool omega_box = false;
    std::vector<double> olo, ohi; // exact box when omega_box
    std::vector<double> blo, bhi; // omega bounding box
    std::vector<double> cloud_x;  // flattened cloud points inside Omega
    double cloud_w = 0.0;
    bool empty = false;

    PeriodizedEvaluator(const SignedMeasure& mu, const Region& omega, std::uint32_t cloud,
                        std::uint64_t seed, bool need_cloud) {
        d = omega.dim();
        if (mu.dim != d) throw std::invalid_argument("dimension mismatch");
        ucoeff = mu.uniform_coeff;
        if (!omega.bounding_box(blo, bhi)) {
            empty = true;
            return;
        }
        for (const auto& a : mu.atoms)
            if (contains(omega, a.x)) {
                atom_x.insert(atom_x.end(), a.x.begin(), a.x.end());
                atom_w.push_back(a.weight);
            }
        omega_box = std::holds_alternative<FullCubeShape>(omega.shape()) ||
                    std::holds_alternative<AxisBoxShape>(omega.shape());
        if (omega_box) {
            olo = blo;
            ohi = bhi;
        }
        if ((!omega_box || need_cloud) && ucoeff != 0.0) {
            if (cloud < 1) throw std::invalid_argument("cloud samples must be >= 1");
            double boxvol = 1.0;
            for (std::size_t k = 0; k < d; ++k) boxvol *= bhi[k] - blo[k];
            cloud_w = boxvol / static_cast<double>(cloud);
            std::vector<double> x(d);
            std::uint64_t cseed = mix64(seed ^ 0x636c6f7564ULL);
            for (std::uint32_t i = 0; i < cloud; ++i) {
                for (std::size_t k = 0; k < d; ++k)
                    x[k] = blo[k] + (bhi[k] - blo[k]) * stream_unit(cseed, std::uint64_t{i} * d + k);
                if (contains(omega, x)) cloud_x.insert(cloud_x.end(), x.begin(), x.end());
            }
        }
    }

    // mu over (box [lo,hi] cap Omega)
    double box_piece(const double* lo, const double* hi) const {
        double atoms = 0.0;
        std::size_t na = atom_w.size();
        for (std::size_t j = 0; j < na; ++j) {
            const double* a = atom_x.data() + j * d;
            bool in = true;
            for (std::size_t k = 0; k < d; ++k)
                if (a[k] < lo[k] || a[k] > hi[k]) {
                    in = false;
                    break;
                }
            if (in) atoms += atom_w[j];
        }
        double vol = 0.0;
        if (ucoeff != 0.0) {
            if (omega_box) {
                vol = 1.0;
                for (std::size_t k = 0; k < d; ++k) {
                    double e = std::min(hi[k], ohi[k]) - std::max(lo[k], olo[k]);
                    if (e <= 0.0) {
                        vol = 0.0;
                        break;
                    }
                    vol *= e;
                }
            } else {
                std::size_t hits = 0, nc = cloud_x.size() / d;
                for (std::size_t j = 0; j < nc; ++j) {
                    const double* cpt = cloud_x.data() + j * d;
                    bool in = true;
                    for (std::size_t k = 0; k < d; ++k)
                        if (cpt[k] < lo[k] || cpt[k] > hi[k]) {
                            in = false;
                            break;
                        }
                    if (in) ++hits;
                }
                vol = cloud_w * static_cast<double>(hits);
            }
        }
        return atoms - ucoeff * vol;
    }

    // mu over (ball(center, r) cap Omega); cloud-based volume
    double ball_piece(const double* center, double r) const {
        double r2 = r * r;
        double atoms = 0.0;
        std::size_t na = atom_w.size();
        for (std::size_t j = 0; j < na; ++j) {
            const double* a = atom_x.data() + j * d;
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                double dd = a[k] - center[k];
                s += dd * dd;
            }
            if (s <= r2) atoms += atom_w[j];
        }
        double vol = 0.0;
        if (ucoeff != 0.0) {
            std::size_t hits = 0, nc = cloud_x.size() / d;
            for (std::size_t j = 0; j < nc; ++j) {
                const double* cpt = cloud_x.data() + j * d;
                double s = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    double dd = cpt[k] - center[k];
                    s += dd * dd;
                }
                if (s <= r2) ++hits;
            }
            vol = cloud_w * static_cast<double>(hits);
        }
        return atoms - ucoeff * vol;
    }

    // sum over n in {-1,0,1}^d of mu((x + n + offset - [t,0]) cap Omega)
    double periodized_box(const double* x, const double* t, const double* offset) const {
        if (empty) return 0.0;
        double total = 0.0;
        int n[3] = {0, 0, 0};
        double lo[3], hi[3];
        for (std::size_t k = 0; k < d; ++k) n[k] = -1;
        while (true) {
            bool overlap = true;
            for (std::size_t k = 0; k < d; ++k) {
                double s = x[k] + n[k] + (offset ? offset[k] : 0.0);
                lo[k] = s - t[k];
                hi[k] = s;
                if (lo[k] > bhi[k] || hi[k] < blo[k]) {
                    overlap = false;
                    break;
                }
            }
            if (overlap) total += box_piece(lo, hi);
            std::size_t k = 0;
            for (; k < d; ++k) {
                if (++n[k] <= 1) break;
                n[k] = -1;
            }
            if (k == d) break;
        }
        return total;
    }

    double periodized_ball(const double* x, double r) const {
        if (empty) return 0.0;
        double total = 0.0;
        int n[3] = {0, 0, 0};
        double c[3];
        for (std::size_t k = 0; k < d; ++k) n[k] = -1;
        while (true) {
            double dist2 = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                c[k] = x[k] + n[k];
                double e = std::max({blo[k] - c[k], c[k] - bhi[k], 0.0});
                dist2 += e * e;
            }
            if (dist2 <= r * r) total += ball_piece(c, r);
            std::size_t k = 0;
            for (; k < d; ++k) {
                if (++n[k] <= 1) break;
                n[k] = -1;
            }
            if (k == d) break;
        }
        return total;
    }
};

void require_in_unit_cube(const Region& omega) {
    if (const auto* b = std::get_if<AxisBoxShape>(&omega.shape())) {
        for (std::size_t k = 0; k < omega.dim(); ++k)
            if (b->lo[k] < 0.0 || b->hi[k] > 1.0)
                throw std::invalid_argument("omega outside unit cube");
    } else if (const auto* s = std::get_if<BallShape>(&omega.shape())) {
        for (std::size_t k = 0; k < omega.dim(); ++k)
            if (s->center[k] - s->radius < 0.0 || s->center[k] + s->radius > 1.0)
                throw std::invalid_argument("omega outside unit cube");
    }
}

// RMS over x-samples of a periodized-measure functional.
template <typename F>
DiscrepancyEstimate rms_over_centers(const F& value_at, std::size_t d, std::uint32_t mx,
                                     std::uint64_t seed) {
    if (mx < 1) throw std::invalid_argument("mx must be >= 1");
    double acc = 0.0, acc2 = 0.0;
    std::vector<double> x(d);
    std::uint64_t xseed = mix64(seed ^ 0x78733233ULL);
    for (std::uint32_t i = 0; i < mx; ++i) {
        for (std::size_t k = 0; k < d; ++k)
            x[k] = stream_unit(xseed, std::uint64_t{i} * d + k);
        double v = value_at(x.data());
        double s = v * v;
        acc += s;
        acc2 += s * s;
    }
    double mean = acc / mx;
    double var = std::max(0.0, acc2 / mx - mean * mean);
    double se_mean = std::sqrt(var / mx);
    DiscrepancyEstimate out;
    out.value = std::sqrt(mean);
    out.stderr_ = out.value > 0.0 ? se_mean / (2.0 * out.value) : std::sqrt(se_mean);
    out.mode = DiscrepancyMode::MonteCarlo;
    out.seed = seed;
    out.samples = mx;
    return out;
}

} // namespace

DiscrepancyEstimate star_discrepancy_exact(const PointSet& pts) {
    std::size_t d = pts.dim(), n = pts.size();
    bool ok = (d == 1) || (d == 2 && n <= 16384) || (d == 3 && n <= 512);
    if (!ok)
        throw std::invalid_argument(
            "star_discrepancy_exact: size guard exceeded; use intersection_discrepancy");
    std::vector<std::vector<double>> points(n, std::vector<double>(d));
    for (std::size_t j = 0; j < n; ++j) {
        auto p = pts.point(j);
        std::copy(p.begin(), p.end(), points[j].begin());
    }
    std::sort(points.begin(), points.end(),
              [d](const auto& a, const auto& b) { return a[d - 1] < b[d - 1]; });
    DiscrepancyEstimate out;
    out.value = star_recurse(points, 0, d, 1.0, static_cast<double>(n));
    out.mode = DiscrepancyMode::Exact;
    return out;
}

DiscrepancyEstimate intersection_discrepancy(const Region& omega, const PointSet& pts,
                                             const BoxSearchConfig& cfg) {
    require_in_unit_cube(omega);
    std::size_t d = omega.dim(), n = pts.size();
    if (pts.dim() != d) throw std::invalid_argument("intersection_discrepancy: dim mismatch");
    if (std::holds_alternative<EmptyShape>(omega.shape()))
        return {0.0, DiscrepancyMode::Exact, 0.0, cfg.seed, 0};

    SignedMeasure mu = SignedMeasure::qmc(pts);
    PeriodizedEvaluator ev(mu, omega, cfg.cloud, cfg.seed, false);

    // lower faces may sit just above a node (excluding it), upper faces just
    // below; boxes must have positive extent so atoms are never caught by
    // degenerate intervals
    std::vector<std::vector<double>> cand_lo(d), cand_hi(d);
    for (std::size_t k = 0; k < d; ++k) {
        cand_lo[k] = {0.0, 1.0};
        cand_hi[k] = {0.0, 1.0};
        for (std::size_t j = 0; j < n; ++j) {
            double c = pts.point(j)[k];
            cand_lo[k].push_back(c);
            cand_hi[k].push_back(c);
            if (c + 1e-12 < 1.0) cand_lo[k].push_back(c + 1e-12);
            if (c > 1e-12) cand_hi[k].push_back(c - 1e-12);
        }
        for (auto* cv : {&cand_lo[k], &cand_hi[k]}) {
            std::sort(cv->begin(), cv->end());
            cv->erase(std::unique(cv->begin(), cv->end()), cv->end());
        }
    }

    std::vector<double> best_lo(d), best_hi(d);
    double best = -1.0;
    auto consider = [&](const std::vector<double>& lo, const std::vector<double>& hi) {
        double v = std::abs(ev.box_piece(lo.data(), hi.data()));
        if (v > best) {
            best = v;
            best_lo = lo;
            best_hi = hi;
        }
    };

    if (d <= 2 && n <= cfg.exhaustive_max_n) {
        std::vector<double> lo(d), hi(d);
        if (d == 1) {
            for (double a : cand_lo[0])
                for (double b : cand_hi[0])
                    if (a < b) {
                        lo[0] = a;
                        hi[0] = b;
                        consider(lo, hi);
                    }
        } else {
            for (double a0 : cand_lo[0])
                for (double b0 : cand_hi[0]) {
                    if (a0 >= b0) continue;
                    for (double a1 : cand_lo[1])
                        for (double b1 : cand_hi[1]) {
                            if (a1 >= b1) continue;
                            lo = {a0, a1};
                            hi = {b0, b1};
                            consider(lo, hi);
                        }
                }
        }
    } else {
        std::uint64_t bseed = mix64(cfg.seed ^ 0x626f786573ULL);
        std::vector<double> lo(d), hi(d);
        for (std::uint32_t i = 0; i < cfg.random_boxes; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                double u = stream_unit(bseed, (std::uint64_t{i} * d + k) * 2);
                double v = stream_unit(bseed, (std::uint64_t{i} * d + k) * 2 + 1);
                lo[k] = std::min(u, v);
                hi[k] = std::max(u, v);
            }
            consider(lo, hi);
        }
        // coordinate-wise face sweeps around the incumbent
        for (std::uint32_t round = 0; round < cfg.refine_rounds; ++round) {
            double before = best;
            for (std::size_t k = 0; k < d; ++k) {
                std::vector<double> lo2 = best_lo, hi2 = best_hi;
                for (double c : cand_lo[k]) {
                    if (c < best_hi[k]) {
                        lo2[k] = c;
                        consider(lo2, best_hi);
                    }
                }
                lo2 = best_lo;
                for (double c : cand_hi[k]) {
                    if (c > best_lo[k]) {
                        hi2[k] = c;
                        consider(best_lo, hi2);
                    }
                }
            }
            if (best <= before) break;
        }
    }

    DiscrepancyEstimate out;
    double scale = std::pow(2.0, static_cast<double>(d));
    out.value = scale * best;
    out.mode = DiscrepancyMode::SearchLowerBound;
    out.seed = cfg.seed;
    // volume noise at the best box (zero when omega is box-like)
    if (!ev.omega_box && ev.ucoeff != 0.0 && !ev.cloud_x.empty()) {
        std::size_t nc = ev.cloud_x.size() / d;
        double p = 0.0;
        {
            std::size_t hits = 0;
            for (std::size_t j = 0; j < nc; ++j) {
                const double* cpt = ev.cloud_x.data() + j * d;
                bool in = true;
                for (std::size_t k = 0; k < d; ++k)
                    if (cpt[k] < best_lo[k] || cpt[k] > best_hi[k]) {
                        in = false;
                        break;
                    }
                if (in) ++hits;
            }
            p = static_cast<double>(hits) / nc;
        }
        double boxvol = 1.0;
        for (std::size_t k = 0; k < d; ++k) boxvol *= ev.bhi[k] - ev.blo[k];
        out.stderr_ = scale * boxvol * std::sqrt(p * (1.0 - p) / nc);
    }
    return out;
}

DiscrepancyEstimate lq_discrepancy(const Region& omega, const SignedMeasure& mu, double q,
                                   const SampleBudget& budget) {
    require_in_unit_cube(omega);
    if (!(q >= 1.0)) throw std::invalid_argument("lq_discrepancy: q must be >= 1");
    if (budget.mt < 1 || budget.mx < 1)
        throw std::invalid_argument("lq_discrepancy: mt, mx must be >= 1");
    std::size_t d = omega.dim();
    PeriodizedEvaluator ev(mu, omega, budget.cloud, budget.seed, false);

    std::uint64_t tseed = mix64(budget.seed ^ 0x745f736565ULL);
    std::uint64_t xseed = mix64(budget.seed ^ 0x785f736565ULL);
    bool qinf = std::isinf(q);
    double acc = 0.0, acc2 = 0.0;
    std::vector<double> t(d), x(d);
    for (std::uint32_t it = 0; it < budget.mt; ++it) {
        for (std::size_t k = 0; k < d; ++k)
            t[k] = stream_unit(tseed, std::uint64_t{it} * d + k);
        double inner_acc = 0.0, inner_max = 0.0;
        for (std::uint32_t ix = 0; ix < budget.mx; ++ix) {
            std::uint64_t base = (std::uint64_t{it} * budget.mx + ix) * d;
            for (std::size_t k = 0; k < d; ++k) x[k] = stream_unit(xseed, base + k);
            double v = std::abs(ev.periodized_box(x.data(), t.data(), nullptr));
            if (qinf)
                inner_max = std::max(inner_max, v);
            else
                inner_acc += std::pow(v, q);
        }
        double inner = qinf ? inner_max : std::pow(inner_acc / budget.mx, 1.0 / q);
        acc += inner;
        acc2 += inner * inner;
    }
    DiscrepancyEstimate out;
    out.value = acc / budget.mt;
    double var = std::max(0.0, acc2 / budget.mt - out.value * out.value);
    out.stderr_ = std::sqrt(var / budget.mt);
    out.mode = qinf ? DiscrepancyMode::SearchLowerBound : DiscrepancyMode::MonteCarlo;
    out.seed = budget.seed;
    out.samples = std::uint64_t{budget.mt} * budget.mx;
    return out;
}

DiscrepancyEstimate cube_l2_discrepancy(const Region& omega, const SignedMeasure& mu, double a,
                                        const SampleBudget& budget) {
    require_in_unit_cube(omega);
    if (!(a > 0.0 && a < 1.0))
        throw std::invalid_argument("cube_l2_discrepancy: need 0 < a < 1");
    std::size_t d = omega.dim();
    PeriodizedEvaluator ev(mu, omega, budget.cloud, budget.seed, false);
    std::vector<double> t(d, a), offset(d, a / 2.0);
    return rms_over_centers(
        [&](const double* x) { return ev.periodized_box(x, t.data(), offset.data()); }, d,
        budget.mx, budget.seed);
}

DiscrepancyEstimate ball_l2_discrepancy(const Region& omega, const SignedMeasure& mu, double r,
                                        const SampleBudget& budget) {
    require_in_unit_cube(omega);
    if (!(r > 0.0 && r < 0.5))
        throw std::invalid_argument("ball_l2_discrepancy: need 0 < r < 1/2");
    std::size_t d = omega.dim();
    PeriodizedEvaluator ev(mu, omega, budget.cloud, budget.seed, true);
    return rms_over_centers([&](const double* x) { return ev.periodized_ball(x, r); }, d,
                            budget.mx, budget.seed);
}

namespace {

double dual_coefficient_norm(const TrigPoly& f, const CoefficientRule& rule) {
    double s = 0.0;
    for (const auto& [n, c] : f.coeffs()) s += std::norm(c) / std::norm(rule.coeff(n));
    return std::sqrt(s);
}

VerificationReport finish_report(VerificationReport rep, double margin) {
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    rep.pass = rep.lhs <= rep.rhs * (1.0 + rep.slack) + 4.0 * margin;
    return rep;
}

} // namespace

VerificationReport verify_kh(const TrigPoly& f, const Region& omega, const PointSet& pts,
                             const KhVariant& variant, const VerifyConfig& cfg) {
    VerificationReport rep;
    rep.slack = cfg.slack;
    rep.seed = cfg.budget.seed;
    auto lhs = qmc_error(f, omega, pts, cfg.volume_cfg);
    rep.lhs = lhs.value;
    rep.lhs_stderr = lhs.stderr_;
    SignedMeasure mu = SignedMeasure::qmc(pts);

    if (const auto* v = std::get_if<Thm1Variant>(&variant)) {
        if (std::abs(1.0 / v->p + 1.0 / v->q - 1.0) > 1e-12)
            throw std::invalid_argument("verify_kh: need 1/p + 1/q = 1");
        rep.variant = "thm1";
        auto disc = lq_discrepancy(omega, mu, v->q, cfg.budget);
        rep.discrepancy = disc.value;
        rep.discrepancy_stderr = disc.stderr_;
        rep.variation = variation_p(f, v->p, cfg.grid);
        rep.rhs = disc.value * rep.variation;
        return finish_report(rep, disc.stderr_ * rep.variation + lhs.stderr_);
    }
    if (const auto* v = std::get_if<Thm8Variant>(&variant)) {
        rep.variant = "thm8";
        auto dioph = check_diophantine(v->a, 0.0, v->gamma, v->dioph_kmax);
        rep.note = "diophantine delta observed " + std::to_string(dioph.worst) + " at h/k = " +
                   std::to_string(dioph.h) + "/" + std::to_string(dioph.k);
        auto disc = cube_l2_discrepancy(omega, mu, v->a, cfg.budget);
        rep.discrepancy = disc.value;
        rep.discrepancy_stderr = disc.stderr_;
        rep.dual_norm = dual_coefficient_norm(f, CoefficientRule::cube(f.dim(), v->a));
        rep.spectral = spectral_norm(f, {SpectralKind::Product, v->gamma});
        rep.constant = rep.spectral > 0.0 ? rep.dual_norm / rep.spectral : 0.0;
        rep.rhs = disc.value * rep.dual_norm;
        return finish_report(rep, disc.stderr_ * rep.dual_norm + lhs.stderr_);
    }
    const auto& v = std::get<Thm10Variant>(variant);
    rep.variant = "thm10";
    auto disc = ball_l2_discrepancy(omega, mu, v.r, cfg.budget);
    rep.discrepancy = disc.value;
    rep.discrepancy_stderr = disc.stderr_;
    rep.dual_norm = dual_coefficient_norm(f, CoefficientRule::ball(f.dim(), v.r));
    rep.spectral = spectral_norm(f, {SpectralKind::Radial, v.gamma});
    rep.constant = rep.spectral > 0.0 ? rep.dual_norm / rep.spectral : 0.0;
    rep.rhs = disc.value * rep.dual_norm;
    return finish_report(rep, disc.stderr_ * rep.dual_norm + lhs.stderr_);
}

VerificationReport verify_kh(const CallbackFunction& f, const Region& omega,
                             const PointSet& pts, const Thm1Variant& variant,
                             const VerifyConfig& cfg) {
    if (std::abs(1.0 / variant.p + 1.0 / variant.q - 1.0) > 1e-12)
        throw std::invalid_argument("verify_kh: need 1/p + 1/q = 1");
    VerificationReport rep;
    rep.variant = "thm1";
    rep.slack = cfg.slack;
    rep.seed = cfg.budget.seed;
    auto lhs = qmc_error(f, omega, pts, cfg.volume_cfg);
    rep.lhs = lhs.value;
    rep.lhs_stderr = lhs.stderr_;
    auto disc = lq_discrepancy(omega, SignedMeasure::qmc(pts), variant.q, cfg.budget);
    rep.discrepancy = disc.value;
    rep.discrepancy_stderr = disc.stderr_;
    rep.variation = variation_p(f, variant.p, cfg.grid);
    rep.rhs = disc.value * rep.variation;
    return finish_report(rep, disc.stderr_ * rep.variation + lhs.stderr_);
}

} // namespace kh
