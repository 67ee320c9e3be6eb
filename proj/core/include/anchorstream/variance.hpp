#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anchorstream/cells.hpp"

namespace anchorstream {

enum class VarianceVariant {
    unadjusted,
    fpc1,
    fpc2,
    rs_unadjusted,
    rs_cochran,
    chapman,
    four_cell,
};

const char* to_string(VarianceVariant v);

// Fallback rule identifiers recorded in fallbacks_applied / diagnostics:
//   jeffreys_cell_smoothing    a zero cell engaged (n_k+0.5)/(N_tot+2.5)
//   p_star_smoothed            n6 = 0, p* replaced by (n6+0.5)/(n15+n6+1)
//   fpc_replaced_by_unadjusted n6 = n15 = 0 or n6+n15 = 1, FPC value
//                              replaced by the unadjusted variance
struct VarianceResult {
    double var_n = 0.0;
    std::optional<double> var_pi;
    VarianceVariant variant = VarianceVariant::unadjusted;
    std::vector<std::string> fallbacks_applied;

    double se() const;
};

// Cell proportions; Jeffreys-smoothed to (n_k+0.5)/(N_tot+2.5) for all five
// cells whenever any cell count is zero.
struct SmoothedProbs {
    double p15 = 0, p2 = 0, p4 = 0, p6 = 0, p37 = 0;
    bool smoothed = false;
};
SmoothedProbs cell_proportions(const CellCounts5& counts);

// Multinomial delta-method variance of the 5-cell estimator.
VarianceResult var5_unadjusted(const CellCounts5& counts);

// Finite-population-corrected variance treating the mixing weight w as
// fixed: (1-w)^2 times the hypergeometric-style variance of p*.
VarianceResult var5_fpc1(const CellCounts5& counts);

// FPC variance with an extra term for the variability of w itself.
VarianceResult var5_fpc2(const CellCounts5& counts);

// Anchor-sample proportion variance, optionally with the
// n(N-n)/(N(n-1)) finite population correction.
VarianceResult var_rs(const RsSummary& rs, bool fpc_adjusted);

// Chapman estimator variance (n2+n4+1)(n2+n6+1)n4 n6 / ((n2+1)^2 (n2+2)).
VarianceResult var_chapman(const CellCounts5& counts);

// 4-cell delta-method variance n6(1-psi)/psi^2.
VarianceResult var_4cell(const CellCounts4& counts);

// Sum of per-stratum variances under one variant; fallback flags unioned.
VarianceResult var_stratified(const std::map<std::string, CellCounts5>& tables,
                              VarianceVariant variant);

}  // namespace anchorstream
