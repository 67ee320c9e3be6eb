#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "anchorstream/cells.hpp"
#include "anchorstream/rng.hpp"

namespace anchorstream {

// Generative specification for one Monte Carlo setting. Exactly n_true of
// the n_tot individuals are cases in every replication; symptomatic status
// drives a non-representative Stream-1 selection, and the anchor stream is
// a fixed-size SRSWOR. Nothing about the Stream-1 mechanism is used by the
// estimators; it exists only to generate data.
struct SimScenario {
    std::int64_t n_tot = 0;
    std::int64_t n_true = 0;
    std::int64_t anchor_size = 0;
    double p_symp_case = 0.6;
    double p_symp_noncase = 0.1;
    double p_s1_symp = 0.5;
    double p_s1_asymp = 0.2;
    std::int64_t replications = 10000;
    std::size_t credible_draws = 10000;
    std::uint64_t master_seed = 1;
    double level = 0.95;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

// One simulated 5-cell table. Consumes the stream in a fixed order, so a
// given (master_seed, replication) stream always yields the same table.
CellCounts5 generate_replication(const SimScenario& scenario, RngStream& stream);

struct IntervalStats {
    double coverage = 0.0;
    double avg_width = 0.0;
};

struct EstimatorStats {
    double mean = 0.0;
    double sd = 0.0;  // NaN when replications < 2
    std::vector<std::pair<std::string, double>> avg_se;
    std::vector<std::pair<std::string, IntervalStats>> intervals;
};

struct SimSummary {
    std::int64_t replications = 0;
    std::int64_t n_true = 0;
    EstimatorStats n5;
    EstimatorStats rs;
    EstimatorStats chapman;
    std::vector<std::pair<std::string, std::int64_t>> fallback_counts;
};

// Run every replication (parallelized by replication index) and aggregate
// the table rows: mean, empirical SD, average SE per variance variant,
// and closed-interval coverage of n_true plus average width per interval
// method. Identical scenarios produce identical summaries regardless of
// thread count or execution order.
SimSummary run_scenario(const SimScenario& scenario);

struct ConditionalCheckResult {
    double max_pmf_discrepancy = 0.0;
    double max_variance_gap = 0.0;
    std::int64_t conditioning_classes = 0;
    // joint pmf of (n15, n2, n4, n6); n37 is implied
    std::map<std::array<Count, 4>, double> joint;
};

// Exhaustively enumerate anchor subsets and Stream-1 recording patterns at
// toy scale, then verify that conditional on (n15+n6, n15+n6+n37) the count
// n6 is exactly hypergeometric and that the FPC variance estimator is
// conditionally unbiased for var(p*).
ConditionalCheckResult exact_conditional_check(const SimScenario& scenario);

}  // namespace anchorstream
