#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anchorstream/cells.hpp"

namespace anchorstream {

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    std::string method;
    bool truncated_low = false;
    bool truncated_high = false;

    double width() const { return upper - lower; }
    // Closed-interval containment; endpoint equality counts.
    bool contains(double x) const { return lower <= x && x <= upper; }
};

struct TruncationBounds {
    double lo = 0.0;
    double hi = 0.0;
};

// Standard normal quantile. Levels 0.90/0.95/0.99 map to the fixed
// constants 1.644854 / 1.959964 / 2.575829; anything else goes through a
// rational approximation accurate to well under 1e-8.
double normal_quantile(double p);
double z_for_level(double level);

// Order-statistic quantile with linear interpolation between closest
// ranks; values must be sorted ascending.
double percentile(std::span<const double> sorted_values, double q);

// point +/- z*se, clipped into bounds when supplied.
Interval wald(double point, double se, double level,
              std::optional<TruncationBounds> bounds = std::nullopt);

enum class FpcAdjustment { none, fpc1, fpc2 };
const char* to_string(FpcAdjustment a);

// Posterior draws behind a credible interval, kept sorted ascending after
// the shift-and-scale transform and truncation.
struct CredibleDraws {
    std::vector<double> draws;
    double scale_a = 1.0;  // min(sqrt(var_fpc/var_unadj), 1)
    double shift_b = 0.0;  // point*(1-a)
    std::uint64_t seed = 0;
};

struct CredibleResult {
    Interval interval;
    CredibleDraws draws;
    std::vector<std::string> diagnostics;
};

// Adapted Bayesian credible interval for the 5-cell estimator: m draws of
// the cell probabilities from Dirichlet(n_k + 1/2), the estimator transform
// applied per draw, optional FPC shift-and-scale, then truncation into
// [n_c, N_tot - n15] and empirical percentiles.
CredibleResult credible_5cell(const CellCounts5& counts, std::size_t m,
                              FpcAdjustment adjustment, double level,
                              std::uint64_t seed);

// Jeffreys Beta(n+ + 1/2, n- + 1/2) credible interval for the anchor-only
// estimator, with the analogous shift-and-scale when fpc_adjusted, truncated
// into [n_rs_pos, N_tot - (n_rs - n_rs_pos)].
CredibleResult credible_rs(const RsSummary& rs, std::size_t m, double level,
                           std::uint64_t seed, bool fpc_adjusted);

// Transformed-logit confidence interval accompanying the Chapman estimator:
// the uncaught count N_hat - r is scaled by C = exp(z*sqrt(log(1 + V/f0^2))).
// Degenerate variance (n4 = 0 or n6 = 0) collapses to [point, point].
Interval logit_chapman(const CellCounts5& counts, double level);

}  // namespace anchorstream
