#include "anchorstream/intervals.hpp"

#include <algorithm>
#include <cmath>

#include "anchorstream/estimators.hpp"
#include "anchorstream/rng.hpp"
#include "anchorstream/variance.hpp"

namespace anchorstream {

namespace {

// Wichura's AS 241 rational approximation of the normal quantile.
double ppnd16(double p) {
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              ((((((1.42151175831644588870e-15 * r + 1.84631831751005468180e-6) * r +
                   7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r +
                 1.36929880922735805310e-1) * r + 5.99832206555887937690e-1) * r +
               1.0);
    }
    return (q < 0.0) ? -val : val;
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal quantile needs p in (0,1)");
    return ppnd16(p);
}

double z_for_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("interval level must lie in (0,1)");
    if (level == 0.90) return 1.644854;
    if (level == 0.95) return 1.959964;
    if (level == 0.99) return 2.575829;
    return normal_quantile(0.5 * (1.0 + level));
}

double percentile(std::span<const double> sorted_values, double q) {
    if (sorted_values.empty()) throw ValidationError("percentile of empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("percentile rank must lie in [0,1]");
    const std::size_t m = sorted_values.size();
    const double h = q * static_cast<double>(m - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= m) return sorted_values[m - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

Interval wald(double point, double se, double level, std::optional<TruncationBounds> bounds) {
    if (se < 0.0) throw ValidationError("standard error must be non-negative");
    const double z = z_for_level(level);
    Interval iv;
    iv.level = level;
    iv.method = "wald";
    iv.lower = point - z * se;
    iv.upper = point + z * se;
    if (bounds) {
        if (iv.lower < bounds->lo) {
            iv.lower = bounds->lo;
            iv.truncated_low = true;
        }
        if (iv.upper > bounds->hi) {
            iv.upper = bounds->hi;
            iv.truncated_high = true;
        }
    }
    return iv;
}

const char* to_string(FpcAdjustment a) {
    switch (a) {
        case FpcAdjustment::none: return "unadjusted";
        case FpcAdjustment::fpc1: return "fpc1";
        case FpcAdjustment::fpc2: return "fpc2";
    }
    return "?";
}

namespace {

// Shared tail of both credible constructions: sorted raw draws are
// shift-and-scaled, truncated into bounds, then read at the two percentile
// ranks. Truncation flags reflect whether the untruncated percentile fell
// outside the bounds.
CredibleResult finish_credible(std::vector<double>&& sorted_raw, double point,
                               double var_adjusted, double var_unadjusted,
                               bool adjust, TruncationBounds bounds, double level,
                               std::uint64_t seed, std::string method) {
    CredibleResult res;
    double a = 1.0;
    if (adjust) {
        if (var_unadjusted <= 0.0) {
            a = 1.0;
            res.diagnostics.push_back("var_unadjusted_zero_scale_one");
        } else {
            a = std::sqrt(var_adjusted / var_unadjusted);
            if (a >= 1.0) {
                a = 1.0;
                res.diagnostics.push_back("credible_scale_capped");
            }
        }
    }
    const double b = point * (1.0 - a);

    for (double& v : sorted_raw) v = a * v + b;  // monotone, stays sorted

    const double q_lo = 0.5 * (1.0 - level);
    const double q_hi = 0.5 * (1.0 + level);
    const double raw_lo = percentile(sorted_raw, q_lo);
    const double raw_hi = percentile(sorted_raw, q_hi);

    for (double& v : sorted_raw) v = std::clamp(v, bounds.lo, bounds.hi);

    Interval iv;
    iv.level = level;
    iv.method = std::move(method);
    iv.lower = percentile(sorted_raw, q_lo);
    iv.upper = percentile(sorted_raw, q_hi);
    iv.truncated_low = raw_lo < bounds.lo;
    iv.truncated_high = raw_hi > bounds.hi;

    res.interval = iv;
    res.draws.draws = std::move(sorted_raw);
    res.draws.scale_a = a;
    res.draws.shift_b = b;
    res.draws.seed = seed;
    return res;
}

}  // namespace

CredibleResult credible_5cell(const CellCounts5& c, std::size_t m,
                              FpcAdjustment adjustment, double level,
                              std::uint64_t seed) {
    if (m == 0) throw ValidationError("credible interval needs at least one draw");
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("interval level must lie in (0,1)");

    RngStream stream(seed);
    const std::array<double, 5> alphas = {
        static_cast<double>(c.n15) + 0.5, static_cast<double>(c.n2) + 0.5,
        static_cast<double>(c.n4) + 0.5,  static_cast<double>(c.n6) + 0.5,
        static_cast<double>(c.n37) + 0.5};
    const double n_tot = static_cast<double>(c.n_tot);

    std::vector<double> draws(m);
    std::array<double, 5> p;
    for (std::size_t i = 0; i < m; ++i) {
        stream.dirichlet(alphas, p);
        // p = (p15, p2, p4, p6, p37)
        draws[i] = n_tot * (p[1] + p[2] + p[3] * ((p[0] + p[3] + p[4]) / (p[0] + p[3])));
    }
    std::sort(draws.begin(), draws.end());

    const double point = estimate_5cell(c).n_hat;
    double var_adj = 0.0;
    const double var_unadj = var5_unadjusted(c).var_n;
    if (adjustment == FpcAdjustment::fpc1) var_adj = var5_fpc1(c).var_n;
    if (adjustment == FpcAdjustment::fpc2) var_adj = var5_fpc2(c).var_n;

    const TruncationBounds bounds{static_cast<double>(c.known_cases()),
                                  static_cast<double>(c.n_tot - c.n15)};
    return finish_credible(std::move(draws), point, var_adj, var_unadj,
                           adjustment != FpcAdjustment::none, bounds, level, seed,
                           std::string("credible/") + to_string(adjustment));
}

CredibleResult credible_rs(const RsSummary& rs, std::size_t m, double level,
                           std::uint64_t seed, bool fpc_adjusted) {
    if (m == 0) throw ValidationError("credible interval needs at least one draw");
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("interval level must lie in (0,1)");

    RngStream stream(seed);
    const double a_post = static_cast<double>(rs.n_rs_pos) + 0.5;
    const double b_post = static_cast<double>(rs.n_rs - rs.n_rs_pos) + 0.5;
    const double n_tot = static_cast<double>(rs.n_tot);

    std::vector<double> draws(m);
    for (std::size_t i = 0; i < m; ++i) {
        draws[i] = n_tot * stream.beta(a_post, b_post);
    }
    std::sort(draws.begin(), draws.end());

    const double point = estimate_rs(rs).n_hat;
    const double var_unadj = var_rs(rs, false).var_n;
    const double var_adj = fpc_adjusted && rs.n_rs >= 2 ? var_rs(rs, true).var_n : var_unadj;

    const TruncationBounds bounds{static_cast<double>(rs.n_rs_pos),
                                  static_cast<double>(rs.n_tot - (rs.n_rs - rs.n_rs_pos))};
    CredibleResult res = finish_credible(std::move(draws), point, var_adj, var_unadj,
                                         fpc_adjusted, bounds, level, seed,
                                         fpc_adjusted ? "credible/cochran" : "credible/unadjusted");
    res.diagnostics.push_back("rs_credible_reconstructed");
    return res;
}

Interval logit_chapman(const CellCounts5& c, double level) {
    const double point = estimate_chapman(c).n_hat;
    const double var = var_chapman(c).var_n;
    Interval iv;
    iv.level = level;
    iv.method = "logit";
    if (c.n4 == 0 || c.n6 == 0) {  // variance is exactly zero
        iv.lower = iv.upper = point;
        return iv;
    }
    const double captured = static_cast<double>(c.known_cases());
    const double f0 = point - captured;  // = n4*n6/(n2+1) > 0 here
    const double sigma = std::sqrt(std::log1p(var / (f0 * f0)));
    const double scale = std::exp(z_for_level(level) * sigma);
    iv.lower = captured + f0 / scale;
    iv.upper = captured + f0 * scale;
    return iv;
}

}  // namespace anchorstream
