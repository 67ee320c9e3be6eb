#include "anchorstream/estimators.hpp"

namespace anchorstream {

namespace {

// Third term of the 5-cell MLE, with the n6 = 0 limit defined as 0
// (covers n15 = 0 as well, taking the 0/0 limit).
double third_term(Count n15, Count n6, Count n37) {
    if (n6 == 0) return 0.0;
    return static_cast<double>(n6) * static_cast<double>(n15 + n6 + n37) /
           static_cast<double>(n15 + n6);
}

double p_star_of(Count n15, Count n6) {
    if (n6 == 0) return 0.0;
    return static_cast<double>(n6) / static_cast<double>(n15 + n6);
}

}  // namespace

PointEstimate estimate_5cell(const CellCounts5& c) {
    PointEstimate est;
    const double known = static_cast<double>(c.n2 + c.n4);
    est.n_hat = known + third_term(c.n15, c.n6, c.n37);
    est.pi_hat = est.n_hat / static_cast<double>(c.n_tot);
    est.decomposition = WeightDecomposition{
        known / static_cast<double>(c.n_tot), p_star_of(c.n15, c.n6)};
    if (c.n6 == 0) est.diagnostics.push_back("n6_zero_point_limit");
    return est;
}

PointEstimate estimate_rs(const RsSummary& rs) {
    PointEstimate est;
    est.pi_hat = static_cast<double>(rs.n_rs_pos) / static_cast<double>(rs.n_rs);
    est.n_hat = static_cast<double>(rs.n_tot) * *est.pi_hat;
    return est;
}

PointEstimate estimate_chapman(const CellCounts5& c) {
    // (n2+n4+1)(n2+n6+1)/(n2+1) - 1, products kept in integers.
    PointEstimate est;
    const Count num = (c.n2 + c.n4 + 1) * (c.n2 + c.n6 + 1);
    est.n_hat = static_cast<double>(num) / static_cast<double>(c.n2 + 1) - 1.0;
    est.pi_hat = est.n_hat / static_cast<double>(c.n_tot);
    return est;
}

PointEstimate estimate_4cell(const CellCounts4& c) {
    PointEstimate est;
    est.n_hat = static_cast<double>(c.n2 + c.n4) + static_cast<double>(c.n6) / c.psi;
    return est;
}

PointEstimate estimate_7cell(const CellCounts7& c) {
    if (c.n6 > 0 && c.n5 + c.n6 == 0) {
        throw ValidationError("n5 + n6 must be positive when n6 > 0");
    }
    PointEstimate est;
    est.n_hat = static_cast<double>(c.n2 + c.n4) + third_term(c.n5, c.n6, c.n7);
    if (c.n6 == 0) est.diagnostics.push_back("n6_zero_point_limit");
    return est;
}

PointEstimate stratified_estimate(const std::map<std::string, CellCounts5>& tables) {
    if (tables.empty()) throw ValidationError("stratified estimate requires at least one stratum");
    PointEstimate est;
    Count total_pop = 0;
    for (const auto& [name, counts] : tables) {
        PointEstimate part = estimate_5cell(counts);
        est.n_hat += part.n_hat;
        total_pop += counts.n_tot;
        for (const std::string& d : part.diagnostics) {
            est.diagnostics.push_back(name + ":" + d);
        }
    }
    est.pi_hat = est.n_hat / static_cast<double>(total_pop);
    return est;
}

double prevalence_direct(const CellCounts5& c) {
    return (static_cast<double>(c.n2 + c.n4) + third_term(c.n15, c.n6, c.n37)) /
           static_cast<double>(c.n_tot);
}

double prevalence_weighted(const CellCounts5& c) {
    const double w = static_cast<double>(c.n2 + c.n4) / static_cast<double>(c.n_tot);
    return w + (1.0 - w) * p_star_of(c.n15, c.n6);
}

double prevalence_recorded_scale(const CellCounts5& c) {
    const double phi_r = static_cast<double>(c.n2 + c.n4) / static_cast<double>(c.n_tot);
    const double pi_rbar1 = p_star_of(c.n15, c.n6);
    constexpr double pi_r1 = 1.0;  // recorded Stream-1 members are cases by construction
    return pi_rbar1 * (1.0 - phi_r) + pi_r1 * phi_r;
}

}  // namespace anchorstream
