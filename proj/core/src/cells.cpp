#include "anchorstream/cells.hpp"

#include <algorithm>
#include <unordered_set>

namespace anchorstream {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

bool is_prob(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void CellCounts5::validate() const {
    require(n15 >= 0 && n2 >= 0 && n4 >= 0 && n6 >= 0 && n37 >= 0,
            "cell counts must be non-negative");
    require(n_tot > 0, "n_tot must be positive");
    if (n15 + n2 + n4 + n6 + n37 != n_tot) {
        throw ValidationError(
            "cell counts do not sum to n_tot: n15=" + std::to_string(n15) +
            " n2=" + std::to_string(n2) + " n4=" + std::to_string(n4) +
            " n6=" + std::to_string(n6) + " n37=" + std::to_string(n37) +
            " sum=" + std::to_string(n15 + n2 + n4 + n6 + n37) +
            " n_tot=" + std::to_string(n_tot));
    }
}

void CellCounts4::validate() const {
    require(n2 >= 0 && n4 >= 0 && n6 >= 0, "cell counts must be non-negative");
    require(psi > 0.0 && psi < 1.0, "psi must lie strictly in (0,1)");
}

void CellCounts7::validate() const {
    require(n1 >= 0 && n2 >= 0 && n3 >= 0 && n4 >= 0 && n5 >= 0 && n6 >= 0 && n7 >= 0,
            "cell counts must be non-negative");
}

void RsSummary::validate() const {
    require(n_rs >= 1, "anchor sample size must be positive");
    require(n_rs_pos >= 0 && n_rs_pos <= n_rs, "0 <= n_rs_pos <= n_rs required");
    require(n_rs <= n_tot, "anchor sample cannot exceed the population");
}

void ModelParams::validate() const {
    require(is_prob(psi) && is_prob(phi) && is_prob(pi_s1) && is_prob(pi_sbar1),
            "model parameters must be probabilities in [0,1]");
}

CellCounts5 tabulate(std::span<const CaptureRecord> records, Count population_size) {
    std::unordered_set<std::string> seen;
    seen.reserve(records.size());

    Count n15 = 0, n2 = 0, n4 = 0, n6 = 0;
    for (const CaptureRecord& r : records) {
        if (!seen.insert(r.id).second) {
            throw ValidationError("duplicate record id: " + r.id);
        }
        if (r.in_anchor && !r.anchor_result.has_value()) {
            throw ValidationError("record " + r.id + " is in the anchor sample but has no anchor result");
        }
        if (!r.in_anchor && r.anchor_result.has_value()) {
            throw ValidationError("record " + r.id + " has an anchor result but is not in the anchor sample");
        }
        if (r.in_anchor) {
            if (*r.anchor_result) {
                (r.stream1_positive ? n2 : n6) += 1;
            } else {
                n15 += 1;  // anchor adjudication wins over Stream 1
            }
        } else if (r.stream1_positive) {
            n4 += 1;
        }
        // remaining records (no stream, no anchor) fall into n37 below
    }

    const Count observed = n15 + n2 + n4 + n6;
    if (population_size < observed) {
        throw ValidationError("population_size " + std::to_string(population_size) +
                              " is smaller than the " + std::to_string(observed) +
                              " observed individuals");
    }
    return CellCounts5(n15, n2, n4, n6, population_size - observed, population_size);
}

std::map<std::string, CellCounts5> tabulate_stratified(
    std::span<const CaptureRecord> records,
    const std::map<std::string, Count>& population_by_stratum) {
    if (population_by_stratum.empty()) {
        throw ValidationError("no strata given");
    }
    std::unordered_set<std::string> seen;
    std::map<std::string, std::vector<CaptureRecord>> groups;
    for (const CaptureRecord& r : records) {
        if (!seen.insert(r.id).second) {
            throw ValidationError("duplicate record id: " + r.id);
        }
        if (!r.stratum.has_value()) {
            throw ValidationError("record " + r.id + " has no stratum label");
        }
        if (!population_by_stratum.count(*r.stratum)) {
            throw ValidationError("record " + r.id + " has unknown stratum '" + *r.stratum + "'");
        }
        groups[*r.stratum].push_back(r);
    }
    std::map<std::string, CellCounts5> out;
    for (const auto& [name, pop] : population_by_stratum) {
        auto it = groups.find(name);
        std::span<const CaptureRecord> span =
            it == groups.end() ? std::span<const CaptureRecord>{} : std::span<const CaptureRecord>(it->second);
        out.emplace(name, tabulate(span, pop));
    }
    return out;
}

}  // namespace anchorstream
