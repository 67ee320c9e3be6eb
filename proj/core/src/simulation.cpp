#include "anchorstream/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <thread>

#include "anchorstream/estimators.hpp"
#include "anchorstream/intervals.hpp"
#include "anchorstream/variance.hpp"

namespace anchorstream {

namespace {

bool is_prob(double p) { return p >= 0.0 && p <= 1.0; }

constexpr int kN5Variants = 3;  // unadjusted, fpc1, fpc2

// Fallback flags tracked per replication.
enum FallbackBit : std::uint32_t {
    kJeffreysSmoothing = 1u << 0,
    kPStarSmoothed = 1u << 1,
    kFpcReplaced = 1u << 2,
    kN6ZeroPointLimit = 1u << 3,
    kChapmanDegenerate = 1u << 4,
};

constexpr std::array<std::pair<std::uint32_t, const char*>, 5> kFallbackNames = {{
    {kJeffreysSmoothing, "jeffreys_cell_smoothing"},
    {kPStarSmoothed, "p_star_smoothed"},
    {kFpcReplaced, "fpc_replaced_by_unadjusted"},
    {kN6ZeroPointLimit, "n6_zero_point_limit"},
    {kChapmanDegenerate, "chapman_degenerate_interval"},
}};

std::uint32_t flags_of(const std::vector<std::string>& names) {
    std::uint32_t mask = 0;
    for (const std::string& n : names) {
        for (const auto& [bit, name] : kFallbackNames) {
            if (n == name) mask |= bit;
        }
    }
    return mask;
}

struct RepRow {
    double n5 = 0;
    std::array<double, kN5Variants> n5_se{};
    std::array<double, kN5Variants> wald_lo{}, wald_hi{};
    std::array<double, kN5Variants> cred_lo{}, cred_hi{};
    double rs = 0;
    std::array<double, 2> rs_se{};  // unadjusted, cochran
    std::array<double, 2> rs_wald_lo{}, rs_wald_hi{};
    double rs_cred_lo = 0, rs_cred_hi = 0;
    double chap = 0, chap_se = 0;
    double logit_lo = 0, logit_hi = 0;
    std::uint32_t fallbacks = 0;
};

// Clamp-then-interpolate percentile of {a*x+b : x in sorted}, touching only
// the two order statistics the rank needs. Matches transforming and
// truncating every draw and then interpolating.
double transformed_percentile(const std::vector<double>& sorted, double a, double b,
                              double lo, double hi, double q) {
    const std::size_t m = sorted.size();
    const double h = q * static_cast<double>(m - 1);
    const std::size_t i = static_cast<std::size_t>(h);
    const double v0 = std::clamp(a * sorted[i] + b, lo, hi);
    if (i + 1 >= m) return v0;
    const double v1 = std::clamp(a * sorted[i + 1] + b, lo, hi);
    return v0 + (h - static_cast<double>(i)) * (v1 - v0);
}

RepRow run_one(const SimScenario& sc, std::int64_t rep_index) {
    RngStream stream(sc.master_seed, static_cast<std::uint64_t>(rep_index));
    const CellCounts5 counts = generate_replication(sc, stream);
    const double z = z_for_level(sc.level);
    const double n_tot = static_cast<double>(sc.n_tot);

    RepRow row;

    // --- full-data estimator ---
    const PointEstimate n5 = estimate_5cell(counts);
    row.n5 = n5.n_hat;
    row.fallbacks |= flags_of(n5.diagnostics);

    const std::array<VarianceResult, kN5Variants> vars = {
        var5_unadjusted(counts), var5_fpc1(counts), var5_fpc2(counts)};
    for (int v = 0; v < kN5Variants; ++v) {
        row.n5_se[v] = vars[v].se();
        row.wald_lo[v] = n5.n_hat - z * row.n5_se[v];
        row.wald_hi[v] = n5.n_hat + z * row.n5_se[v];
        row.fallbacks |= flags_of(vars[v].fallbacks_applied);
    }

    // One Dirichlet draw set serves all three adjustments; the adjustments
    // differ only in the affine transform applied to the draws.
    const std::array<double, 5> alphas = {
        static_cast<double>(counts.n15) + 0.5, static_cast<double>(counts.n2) + 0.5,
        static_cast<double>(counts.n4) + 0.5,  static_cast<double>(counts.n6) + 0.5,
        static_cast<double>(counts.n37) + 0.5};
    std::vector<double> draws(sc.credible_draws);
    std::array<double, 5> p;
    for (double& d : draws) {
        stream.dirichlet(alphas, p);
        d = n_tot * (p[1] + p[2] + p[3] * ((p[0] + p[3] + p[4]) / (p[0] + p[3])));
    }
    std::sort(draws.begin(), draws.end());

    const double tr_lo = static_cast<double>(counts.known_cases());
    const double tr_hi = static_cast<double>(counts.n_tot - counts.n15);
    const double q_lo = 0.5 * (1.0 - sc.level);
    const double q_hi = 0.5 * (1.0 + sc.level);
    const double var_unadj = vars[0].var_n;
    for (int v = 0; v < kN5Variants; ++v) {
        double a = 1.0;
        if (v > 0 && var_unadj > 0.0) {
            a = std::min(std::sqrt(vars[v].var_n / var_unadj), 1.0);
        }
        const double b = n5.n_hat * (1.0 - a);
        row.cred_lo[v] = transformed_percentile(draws, a, b, tr_lo, tr_hi, q_lo);
        row.cred_hi[v] = transformed_percentile(draws, a, b, tr_lo, tr_hi, q_hi);
    }

    // --- anchor-sample estimator ---
    const RsSummary rs(counts.anchor_size(), counts.anchor_positives(), counts.n_tot);
    const PointEstimate rs_est = estimate_rs(rs);
    row.rs = rs_est.n_hat;
    const VarianceResult rs_un = var_rs(rs, false);
    const VarianceResult rs_ad = rs.n_rs >= 2 ? var_rs(rs, true) : rs_un;
    row.rs_se = {rs_un.se(), rs_ad.se()};
    for (int v = 0; v < 2; ++v) {
        row.rs_wald_lo[v] = rs_est.n_hat - z * row.rs_se[v];
        row.rs_wald_hi[v] = rs_est.n_hat + z * row.rs_se[v];
    }

    std::vector<double>& beta_draws = draws;
    beta_draws.resize(sc.credible_draws);
    const double a_post = static_cast<double>(rs.n_rs_pos) + 0.5;
    const double b_post = static_cast<double>(rs.n_rs - rs.n_rs_pos) + 0.5;
    for (double& d : beta_draws) d = n_tot * stream.beta(a_post, b_post);
    std::sort(beta_draws.begin(), beta_draws.end());

    double a_rs = 1.0;
    if (rs_un.var_n > 0.0) a_rs = std::min(std::sqrt(rs_ad.var_n / rs_un.var_n), 1.0);
    const double b_rs = rs_est.n_hat * (1.0 - a_rs);
    const double rs_lo = static_cast<double>(rs.n_rs_pos);
    const double rs_hi = static_cast<double>(rs.n_tot - (rs.n_rs - rs.n_rs_pos));
    row.rs_cred_lo = transformed_percentile(beta_draws, a_rs, b_rs, rs_lo, rs_hi, q_lo);
    row.rs_cred_hi = transformed_percentile(beta_draws, a_rs, b_rs, rs_lo, rs_hi, q_hi);

    // --- Chapman ---
    const PointEstimate chap = estimate_chapman(counts);
    row.chap = chap.n_hat;
    row.chap_se = var_chapman(counts).se();
    const Interval logit = logit_chapman(counts, sc.level);
    row.logit_lo = logit.lower;
    row.logit_hi = logit.upper;
    if (counts.n4 == 0 || counts.n6 == 0) row.fallbacks |= kChapmanDegenerate;

    return row;
}

double mean_of(const std::vector<RepRow>& rows, double (*get)(const RepRow&)) {
    double s = 0.0;
    for (const RepRow& r : rows) s += get(r);
    return s / static_cast<double>(rows.size());
}

double sd_about(const std::vector<RepRow>& rows, double mean, double (*get)(const RepRow&)) {
    if (rows.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (const RepRow& r : rows) {
        const double d = get(r) - mean;
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(rows.size() - 1));
}

IntervalStats interval_stats(const std::vector<RepRow>& rows, double target,
                             double (*lo)(const RepRow&), double (*hi)(const RepRow&)) {
    IntervalStats st;
    double covered = 0.0, width = 0.0;
    for (const RepRow& r : rows) {
        const double l = lo(r), h = hi(r);
        if (l <= target && target <= h) covered += 1.0;
        width += h - l;
    }
    st.coverage = covered / static_cast<double>(rows.size());
    st.avg_width = width / static_cast<double>(rows.size());
    return st;
}

}  // namespace

void SimScenario::validate() const {
    if (n_tot <= 0) throw ValidationError("n_tot must be positive");
    if (n_true < 0 || n_true > n_tot) throw ValidationError("n_true must lie in [0, n_tot]");
    if (anchor_size <= 0 || anchor_size > n_tot) {
        throw ValidationError("anchor_size must lie in [1, n_tot]");
    }
    if (!is_prob(p_symp_case) || !is_prob(p_symp_noncase) || !is_prob(p_s1_symp) ||
        !is_prob(p_s1_asymp)) {
        throw ValidationError("scenario probabilities must lie in [0,1]");
    }
    if (replications < 1) throw ValidationError("replications must be positive");
    if (credible_draws < 1) throw ValidationError("credible_draws must be positive");
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("level must lie in (0,1)");
}

CellCounts5 generate_replication(const SimScenario& sc, RngStream& stream) {
    // anchor first, then one (symptomatic, stream-1) pair per individual
    std::vector<std::uint8_t> in_anchor(static_cast<std::size_t>(sc.n_tot), 0);
    for (std::int64_t i : stream.srswor(sc.n_tot, sc.anchor_size)) {
        in_anchor[static_cast<std::size_t>(i)] = 1;
    }

    Count n15 = 0, n2 = 0, n4 = 0, n6 = 0;
    for (std::int64_t i = 0; i < sc.n_tot; ++i) {
        const bool is_case = i < sc.n_true;
        const bool symptomatic = stream.bernoulli(is_case ? sc.p_symp_case : sc.p_symp_noncase);
        const bool s1_sampled = stream.bernoulli(symptomatic ? sc.p_s1_symp : sc.p_s1_asymp);
        const bool recorded = is_case && s1_sampled;  // sampled non-cases are invisible
        const bool anchored = in_anchor[static_cast<std::size_t>(i)] != 0;
        if (recorded) {
            (anchored ? n2 : n4) += 1;
        } else if (anchored) {
            (is_case ? n6 : n15) += 1;
        }
    }
    return CellCounts5(n15, n2, n4, n6, sc.n_tot - n15 - n2 - n4 - n6, sc.n_tot);
}

SimSummary run_scenario(const SimScenario& sc) {
    sc.validate();

    std::vector<RepRow> rows(static_cast<std::size_t>(sc.replications));
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned n_threads = sc.threads > 0
                                   ? static_cast<unsigned>(sc.threads)
                                   : std::min<unsigned>(hw, static_cast<unsigned>(sc.replications));

    if (n_threads <= 1) {
        for (std::int64_t r = 0; r < sc.replications; ++r) {
            rows[static_cast<std::size_t>(r)] = run_one(sc, r);
        }
    } else {
        std::atomic<std::int64_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::int64_t r = next.fetch_add(1, std::memory_order_relaxed);
                if (r >= sc.replications) return;
                rows[static_cast<std::size_t>(r)] = run_one(sc, r);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    // aggregation is a fixed-order reduction over the row vector, so the
    // summary does not depend on how the rows were produced
    SimSummary out;
    out.replications = sc.replications;
    out.n_true = sc.n_true;
    const double target = static_cast<double>(sc.n_true);

    {
        EstimatorStats& e = out.n5;
        e.mean = mean_of(rows, [](const RepRow& r) { return r.n5; });
        e.sd = sd_about(rows, e.mean, [](const RepRow& r) { return r.n5; });
        static constexpr std::array<const char*, kN5Variants> se_names = {"unadjusted", "fpc1", "fpc2"};
        static constexpr std::array<double (*)(const RepRow&), kN5Variants> se_get = {
            [](const RepRow& r) { return r.n5_se[0]; },
            [](const RepRow& r) { return r.n5_se[1]; },
            [](const RepRow& r) { return r.n5_se[2]; }};
        for (int v = 0; v < kN5Variants; ++v) {
            e.avg_se.emplace_back(se_names[v], mean_of(rows, se_get[v]));
        }
        static constexpr std::array<double (*)(const RepRow&), kN5Variants> wl = {
            [](const RepRow& r) { return r.wald_lo[0]; },
            [](const RepRow& r) { return r.wald_lo[1]; },
            [](const RepRow& r) { return r.wald_lo[2]; }};
        static constexpr std::array<double (*)(const RepRow&), kN5Variants> wh = {
            [](const RepRow& r) { return r.wald_hi[0]; },
            [](const RepRow& r) { return r.wald_hi[1]; },
            [](const RepRow& r) { return r.wald_hi[2]; }};
        static constexpr std::array<double (*)(const RepRow&), kN5Variants> cl = {
            [](const RepRow& r) { return r.cred_lo[0]; },
            [](const RepRow& r) { return r.cred_lo[1]; },
            [](const RepRow& r) { return r.cred_lo[2]; }};
        static constexpr std::array<double (*)(const RepRow&), kN5Variants> ch = {
            [](const RepRow& r) { return r.cred_hi[0]; },
            [](const RepRow& r) { return r.cred_hi[1]; },
            [](const RepRow& r) { return r.cred_hi[2]; }};
        for (int v = 0; v < kN5Variants; ++v) {
            e.intervals.emplace_back(std::string("wald/") + se_names[v],
                                     interval_stats(rows, target, wl[v], wh[v]));
        }
        for (int v = 0; v < kN5Variants; ++v) {
            e.intervals.emplace_back(std::string("credible/") + se_names[v],
                                     interval_stats(rows, target, cl[v], ch[v]));
        }
    }
    {
        EstimatorStats& e = out.rs;
        e.mean = mean_of(rows, [](const RepRow& r) { return r.rs; });
        e.sd = sd_about(rows, e.mean, [](const RepRow& r) { return r.rs; });
        e.avg_se.emplace_back("unadjusted", mean_of(rows, [](const RepRow& r) { return r.rs_se[0]; }));
        e.avg_se.emplace_back("cochran", mean_of(rows, [](const RepRow& r) { return r.rs_se[1]; }));
        e.intervals.emplace_back(
            "wald/unadjusted",
            interval_stats(
                rows, target, [](const RepRow& r) { return r.rs_wald_lo[0]; },
                [](const RepRow& r) { return r.rs_wald_hi[0]; }));
        e.intervals.emplace_back(
            "wald/cochran",
            interval_stats(
                rows, target, [](const RepRow& r) { return r.rs_wald_lo[1]; },
                [](const RepRow& r) { return r.rs_wald_hi[1]; }));
        e.intervals.emplace_back(
            "credible/cochran",
            interval_stats(
                rows, target, [](const RepRow& r) { return r.rs_cred_lo; },
                [](const RepRow& r) { return r.rs_cred_hi; }));
    }
    {
        EstimatorStats& e = out.chapman;
        e.mean = mean_of(rows, [](const RepRow& r) { return r.chap; });
        e.sd = sd_about(rows, e.mean, [](const RepRow& r) { return r.chap; });
        e.avg_se.emplace_back("chapman", mean_of(rows, [](const RepRow& r) { return r.chap_se; }));
        e.intervals.emplace_back(
            "logit", interval_stats(
                         rows, target, [](const RepRow& r) { return r.logit_lo; },
                         [](const RepRow& r) { return r.logit_hi; }));
    }
    for (const auto& [bit, name] : kFallbackNames) {
        std::int64_t hits = 0;
        for (const RepRow& r : rows) {
            if (r.fallbacks & bit) ++hits;
        }
        out.fallback_counts.emplace_back(name, hits);
    }
    return out;
}

namespace {

double exact_binomial(Count n, Count k) {
    if (k < 0 || k > n) return 0.0;
    __int128 num = 1;
    for (Count i = 0; i < std::min(k, n - k); ++i) {
        num = num * (n - i) / (i + 1);  // product of consecutive ints stays integral
    }
    return static_cast<double>(num);
}

double hypergeometric_pmf(Count pop, Count successes, Count sample, Count k) {
    return exact_binomial(successes, k) * exact_binomial(pop - successes, sample - k) /
           exact_binomial(pop, sample);
}

}  // namespace

ConditionalCheckResult exact_conditional_check(const SimScenario& sc) {
    sc.validate();
    if (sc.n_tot > 25) throw ValidationError("enumeration scale exceeded (n_tot > 25)");
    const double n_anchor_subsets = exact_binomial(sc.n_tot, sc.anchor_size);
    const double work = n_anchor_subsets * std::pow(2.0, static_cast<double>(sc.n_true));
    if (work > 5e7) throw ValidationError("enumeration scale exceeded");

    // per-case probability of being *recorded* in Stream 1
    const double rho =
        sc.p_symp_case * sc.p_s1_symp + (1.0 - sc.p_symp_case) * sc.p_s1_asymp;

    ConditionalCheckResult res;

    // anchor subsets as a sorted index combination; cases are indices [0, n_true)
    std::vector<Count> anchor(static_cast<std::size_t>(sc.anchor_size));
    for (std::size_t i = 0; i < anchor.size(); ++i) anchor[i] = static_cast<Count>(i);
    const double subset_prob = 1.0 / n_anchor_subsets;

    const std::uint64_t n_masks = std::uint64_t{1} << sc.n_true;
    std::vector<double> mask_prob(n_masks);
    for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
        const int recorded = std::popcount(mask);
        mask_prob[mask] = std::pow(rho, recorded) *
                          std::pow(1.0 - rho, static_cast<double>(sc.n_true - recorded));
    }

    for (;;) {
        std::uint64_t anchor_case_bits = 0;
        Count anchored_noncases = 0;
        for (Count idx : anchor) {
            if (idx < sc.n_true) {
                anchor_case_bits |= std::uint64_t{1} << idx;
            } else {
                ++anchored_noncases;
            }
        }
        for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
            const Count recorded = std::popcount(mask);
            const Count n2 = std::popcount(mask & anchor_case_bits);
            const Count n4 = recorded - n2;
            const Count n6 = std::popcount(anchor_case_bits) - n2;
            const Count n15 = anchored_noncases;
            res.joint[{n15, n2, n4, n6}] += mask_prob[mask] * subset_prob;
        }

        // next anchor combination in lexicographic order
        std::int64_t pos = sc.anchor_size - 1;
        while (pos >= 0 && anchor[static_cast<std::size_t>(pos)] == sc.n_tot - sc.anchor_size + pos) {
            --pos;
        }
        if (pos < 0) break;
        ++anchor[static_cast<std::size_t>(pos)];
        for (std::int64_t j = pos + 1; j < sc.anchor_size; ++j) {
            anchor[static_cast<std::size_t>(j)] = anchor[static_cast<std::size_t>(j - 1)] + 1;
        }
    }

    // group by the conditioning margins (n_rs*, N_tot*)
    std::map<std::pair<Count, Count>, std::map<Count, double>> classes;
    for (const auto& [cells, prob] : res.joint) {
        const auto [n15, n2, n4, n6] = cells;
        const Count n37 = sc.n_tot - n15 - n2 - n4 - n6;
        classes[{n15 + n6, n15 + n6 + n37}][n6] += prob;
    }
    res.conditioning_classes = static_cast<std::int64_t>(classes.size());

    for (const auto& [margins, dist] : classes) {
        const auto [n_rs_star, n_tot_star] = margins;
        const Count recorded_total = sc.n_tot - n_tot_star;  // = n2 + n4
        const Count n_d_star = sc.n_true - recorded_total;
        double mass = 0.0;
        for (const auto& [n6, prob] : dist) mass += prob;

        double mean_p = 0.0;
        for (const auto& [n6, prob] : dist) {
            const double cond = prob / mass;
            const double hyper = hypergeometric_pmf(n_tot_star, n_d_star, n_rs_star, n6);
            res.max_pmf_discrepancy = std::max(res.max_pmf_discrepancy, std::abs(cond - hyper));
            if (n_rs_star > 0) mean_p += cond * static_cast<double>(n6) / static_cast<double>(n_rs_star);
        }
        if (n_rs_star >= 2) {
            double var_p = 0.0, expected_vhat = 0.0;
            const double fpc = static_cast<double>(n_rs_star * (n_tot_star - n_rs_star)) /
                               static_cast<double>(n_tot_star * (n_rs_star - 1));
            for (const auto& [n6, prob] : dist) {
                const double cond = prob / mass;
                const double p_star = static_cast<double>(n6) / static_cast<double>(n_rs_star);
                var_p += cond * (p_star - mean_p) * (p_star - mean_p);
                expected_vhat += cond * fpc * p_star * (1.0 - p_star) / static_cast<double>(n_rs_star);
            }
            res.max_variance_gap = std::max(res.max_variance_gap, std::abs(expected_vhat - var_p));
        }
    }
    return res;
}

}  // namespace anchorstream
