#include "anchorstream/variance.hpp"

#include <array>
#include <cmath>

namespace anchorstream {

const char* to_string(VarianceVariant v) {
    switch (v) {
        case VarianceVariant::unadjusted: return "unadjusted";
        case VarianceVariant::fpc1: return "fpc1";
        case VarianceVariant::fpc2: return "fpc2";
        case VarianceVariant::rs_unadjusted: return "rs_unadjusted";
        case VarianceVariant::rs_cochran: return "rs_cochran";
        case VarianceVariant::chapman: return "chapman";
        case VarianceVariant::four_cell: return "four_cell";
    }
    return "?";
}

double VarianceResult::se() const { return std::sqrt(var_n); }

SmoothedProbs cell_proportions(const CellCounts5& c) {
    SmoothedProbs p;
    p.smoothed = (c.n15 == 0 || c.n2 == 0 || c.n4 == 0 || c.n6 == 0 || c.n37 == 0);
    if (p.smoothed) {
        const double denom = static_cast<double>(c.n_tot) + 2.5;
        p.p15 = (static_cast<double>(c.n15) + 0.5) / denom;
        p.p2 = (static_cast<double>(c.n2) + 0.5) / denom;
        p.p4 = (static_cast<double>(c.n4) + 0.5) / denom;
        p.p6 = (static_cast<double>(c.n6) + 0.5) / denom;
        p.p37 = (static_cast<double>(c.n37) + 0.5) / denom;
    } else {
        const double denom = static_cast<double>(c.n_tot);
        p.p15 = static_cast<double>(c.n15) / denom;
        p.p2 = static_cast<double>(c.n2) / denom;
        p.p4 = static_cast<double>(c.n4) / denom;
        p.p6 = static_cast<double>(c.n6) / denom;
        p.p37 = static_cast<double>(c.n37) / denom;
    }
    return p;
}

VarianceResult var5_unadjusted(const CellCounts5& c) {
    VarianceResult out;
    out.variant = VarianceVariant::unadjusted;

    const SmoothedProbs p = cell_proportions(c);
    if (p.smoothed) out.fallbacks_applied.push_back("jeffreys_cell_smoothing");

    const double s = p.p15 + p.p6;
    const std::array<double, 5> d = {
        -p.p6 * p.p37 / (s * s),
        1.0,
        1.0,
        1.0 + p.p37 * p.p15 / (s * s),
        p.p6 / s,
    };
    const std::array<double, 5> probs = {p.p15, p.p2, p.p4, p.p6, p.p37};

    // d' (diag(p) - p p') d / N_tot  ==  (sum d^2 p - (sum d p)^2) / N_tot
    double sum_d2p = 0.0, sum_dp = 0.0;
    for (int i = 0; i < 5; ++i) {
        sum_d2p += d[i] * d[i] * probs[i];
        sum_dp += d[i] * probs[i];
    }
    const double n_tot = static_cast<double>(c.n_tot);
    out.var_pi = (sum_d2p - sum_dp * sum_dp) / n_tot;
    out.var_n = n_tot * n_tot * *out.var_pi;
    return out;
}

namespace {

// Shared FPC machinery. Fallback B (n6 = n15 = 0, or n6+n15 = 1) reroutes
// to the unadjusted variance before any FPC arithmetic runs, so the
// n_rs*-1 denominator never hits zero.
struct FpcParts {
    bool replaced_by_unadjusted = false;
    bool p_star_smoothed = false;
    double w = 0.0;
    double one_minus_w = 0.0;
    double p_star = 0.0;
    double var_p_star_fpc = 0.0;
};

FpcParts fpc_parts(const CellCounts5& c) {
    FpcParts f;
    const Count n_rs_star = c.anchor_outside_stream1();
    if (n_rs_star <= 1) {
        f.replaced_by_unadjusted = true;
        return f;
    }

    f.w = static_cast<double>(c.n2 + c.n4) / static_cast<double>(c.n_tot);
    f.one_minus_w = static_cast<double>(c.n_tot - c.n2 - c.n4) / static_cast<double>(c.n_tot);

    if (c.n6 == 0) {
        f.p_star_smoothed = true;
        f.p_star = (static_cast<double>(c.n6) + 0.5) / static_cast<double>(c.n15 + c.n6 + 1);
    } else {
        f.p_star = static_cast<double>(c.n6) / static_cast<double>(n_rs_star);
    }

    const Count n_tot_star = c.unrecorded_population();
    // integer products before the single real division keep this bit-stable
    const double fpc = static_cast<double>(n_rs_star * (n_tot_star - n_rs_star)) /
                       static_cast<double>(n_tot_star * (n_rs_star - 1));
    f.var_p_star_fpc = fpc * f.p_star * (1.0 - f.p_star) / static_cast<double>(n_rs_star);
    return f;
}

}  // namespace

VarianceResult var5_fpc1(const CellCounts5& c) {
    const FpcParts f = fpc_parts(c);
    if (f.replaced_by_unadjusted) {
        VarianceResult out = var5_unadjusted(c);
        out.variant = VarianceVariant::fpc1;
        out.fallbacks_applied.push_back("fpc_replaced_by_unadjusted");
        return out;
    }
    VarianceResult out;
    out.variant = VarianceVariant::fpc1;
    if (f.p_star_smoothed) out.fallbacks_applied.push_back("p_star_smoothed");
    out.var_pi = f.one_minus_w * f.one_minus_w * f.var_p_star_fpc;
    const double n_tot = static_cast<double>(c.n_tot);
    out.var_n = n_tot * n_tot * *out.var_pi;
    return out;
}

VarianceResult var5_fpc2(const CellCounts5& c) {
    const FpcParts f = fpc_parts(c);
    if (f.replaced_by_unadjusted) {
        VarianceResult out = var5_unadjusted(c);
        out.variant = VarianceVariant::fpc2;
        out.fallbacks_applied.push_back("fpc_replaced_by_unadjusted");
        return out;
    }
    VarianceResult out;
    out.variant = VarianceVariant::fpc2;
    if (f.p_star_smoothed) out.fallbacks_applied.push_back("p_star_smoothed");

    const double n_tot = static_cast<double>(c.n_tot);
    const double one_minus_p = 1.0 - f.p_star;  // smoothed p* used in both summands
    const double weight_term = one_minus_p * one_minus_p * f.w * f.one_minus_w / n_tot;
    const double fpc1_pi = f.one_minus_w * f.one_minus_w * f.var_p_star_fpc;
    out.var_pi = weight_term + fpc1_pi;
    out.var_n = n_tot * n_tot * *out.var_pi;
    return out;
}

VarianceResult var_rs(const RsSummary& rs, bool fpc_adjusted) {
    if (fpc_adjusted && rs.n_rs < 2) {
        throw ValidationError("FPC-adjusted anchor variance needs n_rs >= 2");
    }
    VarianceResult out;
    out.variant = fpc_adjusted ? VarianceVariant::rs_cochran : VarianceVariant::rs_unadjusted;

    const double pi = static_cast<double>(rs.n_rs_pos) / static_cast<double>(rs.n_rs);
    double var_pi = pi * (1.0 - pi) / static_cast<double>(rs.n_rs);
    if (fpc_adjusted) {
        const double fpc = static_cast<double>(rs.n_rs * (rs.n_tot - rs.n_rs)) /
                           static_cast<double>(rs.n_tot * (rs.n_rs - 1));
        var_pi *= fpc;
    }
    out.var_pi = var_pi;
    const double n_tot = static_cast<double>(rs.n_tot);
    out.var_n = n_tot * n_tot * var_pi;
    return out;
}

VarianceResult var_chapman(const CellCounts5& c) {
    VarianceResult out;
    out.variant = VarianceVariant::chapman;
    // products can exceed 64 bits for large cells; widen before dividing
    const __int128 num = static_cast<__int128>(c.n2 + c.n4 + 1) * (c.n2 + c.n6 + 1) * c.n4 * c.n6;
    const __int128 den = static_cast<__int128>(c.n2 + 1) * (c.n2 + 1) * (c.n2 + 2);
    out.var_n = static_cast<double>(num) / static_cast<double>(den);
    out.var_pi = out.var_n / (static_cast<double>(c.n_tot) * static_cast<double>(c.n_tot));
    return out;
}

VarianceResult var_4cell(const CellCounts4& c) {
    VarianceResult out;
    out.variant = VarianceVariant::four_cell;
    out.var_n = static_cast<double>(c.n6) * (1.0 - c.psi) / (c.psi * c.psi);
    return out;
}

VarianceResult var_stratified(const std::map<std::string, CellCounts5>& tables,
                              VarianceVariant variant) {
    if (tables.empty()) throw ValidationError("stratified variance requires at least one stratum");
    VarianceResult out;
    out.variant = variant;
    for (const auto& [name, counts] : tables) {
        VarianceResult part;
        switch (variant) {
            case VarianceVariant::unadjusted: part = var5_unadjusted(counts); break;
            case VarianceVariant::fpc1: part = var5_fpc1(counts); break;
            case VarianceVariant::fpc2: part = var5_fpc2(counts); break;
            case VarianceVariant::chapman: part = var_chapman(counts); break;
            default:
                throw ValidationError("variant not defined for stratified 5-cell tables");
        }
        out.var_n += part.var_n;
        for (const std::string& fb : part.fallbacks_applied) {
            out.fallbacks_applied.push_back(name + ":" + fb);
        }
    }
    return out;
}

}  // namespace anchorstream
