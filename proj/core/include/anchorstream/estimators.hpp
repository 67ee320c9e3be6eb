#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anchorstream/cells.hpp"

namespace anchorstream {

struct WeightDecomposition {
    double w = 0.0;       // (n2+n4)/N_tot, the recorded-in-Stream-1 share
    double p_star = 0.0;  // n6/(n15+n6), positives among the unrecorded anchor members
};

struct PointEstimate {
    double n_hat = 0.0;
    std::optional<double> pi_hat;  // absent when no cohort size applies
    std::optional<WeightDecomposition> decomposition;
    std::vector<std::string> diagnostics;
};

// Full-data MLE of the case count:
//   N_hat = n2 + n4 + n6 * (n15+n6+n37)/(n15+n6)
// When n6 = 0 the third term is taken as its limit 0 (p_star reported as 0,
// flagged "n6_zero_point_limit").
PointEstimate estimate_5cell(const CellCounts5& counts);

// Anchor-sample-only estimator N_tot * n_rs_pos/n_rs.
PointEstimate estimate_rs(const RsSummary& rs);

// Chapman bias-reduced two-stream estimator; uses only n2, n4, n6.
PointEstimate estimate_chapman(const CellCounts5& counts);

// 4-cell estimator with design-known anchor sampling probability:
// n2 + n4 + n6/psi.
PointEstimate estimate_4cell(const CellCounts4& counts);

// 7-cell MLE n2 + n4 + n6*(n5+n6+n7)/(n5+n6), with the same n6 = 0 limit.
PointEstimate estimate_7cell(const CellCounts7& counts);

// Per-stratum 5-cell estimates summed across mutually exclusive strata.
PointEstimate stratified_estimate(const std::map<std::string, CellCounts5>& tables);

// The three algebraically equivalent evaluation routes for the prevalence
// MLE; exposed separately so their agreement is testable.
double prevalence_direct(const CellCounts5& counts);          // ratio form
double prevalence_weighted(const CellCounts5& counts);        // w + (1-w)p*
double prevalence_recorded_scale(const CellCounts5& counts);  // p*(1-phi_r) + phi_r

}  // namespace anchorstream
