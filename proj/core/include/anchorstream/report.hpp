#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anchorstream/cells.hpp"
#include "anchorstream/intervals.hpp"
#include "anchorstream/simulation.hpp"

namespace anchorstream {

// Default RNG seed when neither a flag nor the environment supplies one.
inline constexpr std::uint64_t kDefaultSeed = 4;

struct EstimateReport {
    std::string method;
    double point_n = 0.0;
    std::optional<double> point_pi;
    std::vector<std::pair<std::string, double>> se_by_variant;
    std::vector<std::pair<std::string, Interval>> interval_by_variant;
    double level = 0.95;
    std::vector<std::string> diagnostics;
};

enum class OutputFormat { json, csv, markdown };
OutputFormat parse_format(const std::string& name);

struct ParsedCounts {
    CellCounts5 counts;
    std::vector<std::string> warnings;
};

// Flat key-value counts document (JSON object with keys n15, n2, n4, n6,
// n37, n_tot). Missing keys and sum mismatches are reported by name.
ParsedCounts parse_counts(std::istream& in);
ParsedCounts parse_counts_file(const std::string& path);

// Delimited records file with header id, stream1_positive, in_anchor,
// anchor_result[, stratum]; booleans accept 0/1/true/false, anchor_result
// may be empty only when in_anchor is false.
std::vector<CaptureRecord> parse_records(std::istream& in);
std::vector<CaptureRecord> parse_records_file(const std::string& path);

struct AnalysisOptions {
    std::vector<std::string> methods = {"n5", "rs", "chapman"};
    std::vector<FpcAdjustment> adjustments = {FpcAdjustment::none, FpcAdjustment::fpc1,
                                              FpcAdjustment::fpc2};
    double level = 0.95;
    std::size_t draws = 10000;
    std::uint64_t seed = kDefaultSeed;
};

// Full analysis of one 5-cell table: per requested method the point
// estimate, every SE variant, Wald intervals, and seeded credible
// intervals (one derived substream per adjustment).
std::vector<EstimateReport> analyze_counts(const CellCounts5& counts,
                                           const AnalysisOptions& options);

// Stratified analysis: per-stratum 5-cell estimates and variances summed
// across strata, Wald intervals from the pooled SEs.
std::vector<EstimateReport> analyze_stratified(const std::map<std::string, CellCounts5>& tables,
                                               const AnalysisOptions& options);

std::string render_reports(const std::vector<EstimateReport>& reports, OutputFormat format);

std::string render_counts(const CellCounts5& counts);
std::string render_counts(const std::map<std::string, CellCounts5>& tables);

// Simulation summary in the study's "Mean (SD) [avg. SE]" / "CI coverage
// [avg. width]" row layout (markdown), or as long-form csv / nested json.
// Thread count never appears in the output.
std::string render_summary(const SimScenario& scenario, const SimSummary& summary,
                           OutputFormat format);

// Human-format rounding used in markdown output: 1 decimal, halves away
// from zero.
std::string round1(double v);

}  // namespace anchorstream
