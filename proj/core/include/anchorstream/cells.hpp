#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anchorstream/errors.hpp"

namespace anchorstream {

using Count = std::int64_t;

// Observed 5-cell table for a closed population of known size. Stream 1
// records only positives; the anchor stream (Stream 2) records both.
//
//   n15  in anchor, tested negative (whether or not Stream-1 sampled)
//   n2   recorded in Stream 1 and in anchor, positive
//   n4   recorded in Stream 1, not in anchor, positive
//   n6   in anchor, not recorded in Stream 1, positive
//   n37  everyone else (unsampled, or Stream-1 sampled but unrecorded)
struct CellCounts5 {
    Count n15 = 0;
    Count n2 = 0;
    Count n4 = 0;
    Count n6 = 0;
    Count n37 = 0;
    Count n_tot = 0;

    CellCounts5() = default;
    CellCounts5(Count n15_, Count n2_, Count n4_, Count n6_, Count n37_, Count n_tot_)
        : n15(n15_), n2(n2_), n4(n4_), n6(n6_), n37(n37_), n_tot(n_tot_) {
        validate();
    }

    void validate() const;

    // Individuals known to be cases; lower truncation bound for intervals.
    Count known_cases() const { return n2 + n4 + n6; }
    // Individuals known not to be cases.
    Count known_negatives() const { return n15; }
    // Anchor members outside Stream-1 records: the effective sample n_rs*.
    Count anchor_outside_stream1() const { return n15 + n6; }
    // Cohort members not recorded in Stream 1: the effective population N_tot*.
    Count unrecorded_population() const { return n15 + n6 + n37; }
    // Implied anchor sample size and its positive count.
    Count anchor_size() const { return n15 + n2 + n6; }
    Count anchor_positives() const { return n2 + n6; }

    bool operator==(const CellCounts5&) const = default;
};

// 4-cell table: neither stream records negatives, anchor sampling
// probability psi is known by design.
struct CellCounts4 {
    Count n2 = 0;
    Count n4 = 0;
    Count n6 = 0;
    double psi = 0.0;

    CellCounts4() = default;
    CellCounts4(Count n2_, Count n4_, Count n6_, double psi_)
        : n2(n2_), n4(n4_), n6(n6_), psi(psi_) {
        validate();
    }
    void validate() const;
};

// 7-cell table: both streams record negatives.
struct CellCounts7 {
    Count n1 = 0, n2 = 0, n3 = 0, n4 = 0, n5 = 0, n6 = 0, n7 = 0;

    CellCounts7() = default;
    CellCounts7(Count n1_, Count n2_, Count n3_, Count n4_, Count n5_, Count n6_, Count n7_)
        : n1(n1_), n2(n2_), n3(n3_), n4(n4_), n5(n5_), n6(n6_), n7(n7_) {
        validate();
    }
    void validate() const;

    Count total() const { return n1 + n2 + n3 + n4 + n5 + n6 + n7; }

    // Fold the cells that become indistinguishable when Stream 1 stops
    // recording negatives: n15 = n1+n5, n37 = n3+n7.
    CellCounts5 consolidated() const {
        return CellCounts5(n1 + n5, n2, n4, n6, n3 + n7, total());
    }
};

// Anchor-stream-only summary: sample size, positives, cohort size.
struct RsSummary {
    Count n_rs = 0;
    Count n_rs_pos = 0;
    Count n_tot = 0;

    RsSummary() = default;
    RsSummary(Count n_rs_, Count n_rs_pos_, Count n_tot_)
        : n_rs(n_rs_), n_rs_pos(n_rs_pos_), n_tot(n_tot_) {
        validate();
    }
    void validate() const;
};

// Generative parameters of the population-level multinomial model.
//   psi      P(sampled in Stream 2)
//   phi      P(sampled in Stream 1)
//   pi_s1    P(diseased | sampled in Stream 1)
//   pi_sbar1 P(diseased | not sampled in Stream 1)
struct ModelParams {
    double psi = 0.0;
    double phi = 0.0;
    double pi_s1 = 0.0;
    double pi_sbar1 = 0.0;

    ModelParams() = default;
    ModelParams(double psi_, double phi_, double pi_s1_, double pi_sbar1_)
        : psi(psi_), phi(phi_), pi_s1(pi_s1_), pi_sbar1(pi_sbar1_) {
        validate();
    }
    void validate() const;

    double theta() const { return pi_s1 * phi; }
    double pi() const { return pi_s1 * phi + pi_sbar1 * (1.0 - phi); }

    // Recorded-scale reparameterization. A Stream-1-sampled non-case is
    // sampled but never recorded, so the recorded scale is the one the
    // observed cells live on.
    double phi_r() const { return pi_s1 * phi; }
    double psi_r() const { return psi; }
    double pi_rbar1() const {
        const double denom = 1.0 - pi_s1 * phi;
        if (denom <= 0.0) return 0.0;
        return pi_sbar1 * (1.0 - phi) / denom;
    }

    // Cell probabilities (p15, p2, p4, p6, p37) in the sampled-scale
    // parameterization...
    std::array<double, 5> cell_probs() const {
        const double th = theta();
        const double p = pi();
        return {psi * (1.0 - p), psi * th, (1.0 - psi) * th, psi * (p - th),
                (1.0 - psi) * (1.0 - th)};
    }
    // ...and in the recorded-scale parameterization; the two agree.
    std::array<double, 5> cell_probs_recorded() const {
        const double fr = phi_r();
        const double sr = psi_r();
        const double pr = pi_rbar1();
        return {(1.0 - fr) * (1.0 - pr) * sr, sr * fr, (1.0 - sr) * fr,
                (1.0 - fr) * pr * sr, (1.0 - fr) * (1.0 - sr)};
    }
};

// One individual's capture history. anchor_result is present exactly when
// the individual was drawn into the anchor sample.
struct CaptureRecord {
    std::string id;
    bool stream1_positive = false;
    bool in_anchor = false;
    std::optional<bool> anchor_result;
    std::optional<std::string> stratum;
};

// Tabulate record-level capture histories into the 5-cell table. Anchor
// adjudication wins on conflict: a Stream-1-positive record judged negative
// in the anchor lands in n15. Cohort members without records close the
// table through n37.
CellCounts5 tabulate(std::span<const CaptureRecord> records, Count population_size);

// Per-stratum tabulation; every record's stratum must appear in
// population_by_stratum, and strata are mutually exclusive.
std::map<std::string, CellCounts5> tabulate_stratified(
    std::span<const CaptureRecord> records,
    const std::map<std::string, Count>& population_by_stratum);

}  // namespace anchorstream
