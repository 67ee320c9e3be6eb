#include <algorithm>
#include <random>

#include <doctest.h>

#include "anchorstream/cells.hpp"

using namespace anchorstream;

namespace {

CaptureRecord rec(std::string id, bool s1, bool anchor, std::optional<bool> result,
                  std::optional<std::string> stratum = std::nullopt) {
    CaptureRecord r;
    r.id = std::move(id);
    r.stream1_positive = s1;
    r.in_anchor = anchor;
    r.anchor_result = result;
    r.stratum = std::move(stratum);
    return r;
}

std::vector<CaptureRecord> registry_records() {
    std::vector<CaptureRecord> records;
    int n = 0;
    auto add = [&](int k, bool s1, bool anchor, std::optional<bool> result) {
        for (int i = 0; i < k; ++i) {
            records.push_back(rec("p" + std::to_string(++n), s1, anchor, result));
        }
    };
    add(12, true, true, true);
    add(3, true, true, false);  // anchor adjudication overrides Stream 1
    add(52, true, false, std::nullopt);
    add(19, false, true, true);
    add(166, false, true, false);
    return records;
}

}  // namespace

TEST_CASE("cell table invariants are enforced") {
    CHECK_THROWS_AS(CellCounts5(1, 1, 1, 1, 1, 6), ValidationError);
    CHECK_THROWS_AS(CellCounts5(-1, 1, 1, 1, 1, 3), ValidationError);
    CHECK_THROWS_AS(CellCounts5(0, 0, 0, 0, 0, 0), ValidationError);
    const CellCounts5 c(169, 12, 52, 19, 777, 1029);
    CHECK(c.known_cases() == 83);
    CHECK(c.known_negatives() == 169);
    CHECK(c.anchor_outside_stream1() == 188);
    CHECK(c.unrecorded_population() == 965);
    CHECK(c.anchor_size() == 200);
    CHECK(c.anchor_positives() == 31);

    CHECK_THROWS_AS(CellCounts4(1, 1, 1, 0.0), ValidationError);
    CHECK_THROWS_AS(CellCounts4(1, 1, 1, 1.0), ValidationError);
    CHECK_THROWS_AS(RsSummary(0, 0, 10), ValidationError);
    CHECK_THROWS_AS(RsSummary(10, 11, 20), ValidationError);
    CHECK_THROWS_AS(RsSummary(30, 5, 20), ValidationError);
}

TEST_CASE("tabulate reconstructs the 1029-person registry table") {
    const auto records = registry_records();
    const CellCounts5 c = tabulate(records, 1029);
    CHECK(c == CellCounts5(169, 12, 52, 19, 777, 1029));
}

TEST_CASE("tabulate closes an empty record list through n37") {
    const CellCounts5 c = tabulate({}, 10);
    CHECK(c == CellCounts5(0, 0, 0, 0, 10, 10));
}

TEST_CASE("tabulate truth table over all flag combinations") {
    // one record per observable flag combination, expectations enumerated by
    // hand against the cell definitions
    std::vector<CaptureRecord> records = {
        rec("a", true, true, true),     // -> n2
        rec("b", true, true, false),    // -> n15 (anchor wins)
        rec("c", true, false, std::nullopt),   // -> n4
        rec("d", false, true, true),    // -> n6
        rec("e", false, true, false),   // -> n15
        rec("f", false, false, std::nullopt),  // -> n37
    };
    const CellCounts5 c = tabulate(records, 6);
    CHECK(c == CellCounts5(2, 1, 1, 1, 1, 6));
}

TEST_CASE("tabulate is permutation-invariant") {
    auto records = registry_records();
    std::mt19937 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(records.begin(), records.end(), rng);
        CHECK(tabulate(records, 1029) == CellCounts5(169, 12, 52, 19, 777, 1029));
    }
}

TEST_CASE("tabulate error paths") {
    std::vector<CaptureRecord> dup = {rec("x", true, false, std::nullopt),
                                      rec("x", false, false, std::nullopt)};
    CHECK_THROWS_AS(tabulate(dup, 10), ValidationError);

    std::vector<CaptureRecord> missing = {rec("y", false, true, std::nullopt)};
    CHECK_THROWS_AS(tabulate(missing, 10), ValidationError);

    std::vector<CaptureRecord> spurious = {rec("z", false, false, true)};
    CHECK_THROWS_AS(tabulate(spurious, 10), ValidationError);

    const auto records = registry_records();
    CHECK_THROWS_AS(tabulate(records, 200), ValidationError);
}

TEST_CASE("stratified tabulation groups records and closes per-stratum tables") {
    std::vector<CaptureRecord> records = {
        rec("a", true, true, true, "east"),
        rec("b", false, true, true, "east"),
        rec("c", true, false, std::nullopt, "west"),
    };
    const auto tables = tabulate_stratified(records, {{"east", 10}, {"west", 5}});
    CHECK(tables.at("east") == CellCounts5(0, 1, 0, 1, 8, 10));
    CHECK(tables.at("west") == CellCounts5(0, 0, 1, 0, 4, 5));

    std::vector<CaptureRecord> unknown = {rec("q", true, false, std::nullopt, "north")};
    CHECK_THROWS_AS(tabulate_stratified(unknown, {{"east", 10}}), ValidationError);
    std::vector<CaptureRecord> unlabeled = {rec("q", true, false, std::nullopt)};
    CHECK_THROWS_AS(tabulate_stratified(unlabeled, {{"east", 10}}), ValidationError);
    CHECK_THROWS_AS(tabulate_stratified({}, {}), ValidationError);
}

TEST_CASE("model cell probabilities are a distribution in both parameterizations") {
    const double grid[] = {0.0, 0.17, 0.5, 0.83, 1.0};
    for (double psi : grid) {
        for (double phi : grid) {
            for (double pi_s1 : grid) {
                for (double pi_sbar1 : grid) {
                    const ModelParams mp(psi, phi, pi_s1, pi_sbar1);
                    const auto sampled = mp.cell_probs();
                    const auto recorded = mp.cell_probs_recorded();
                    double sum = 0.0;
                    for (int i = 0; i < 5; ++i) {
                        CHECK(sampled[i] >= -1e-15);
                        CHECK(sampled[i] <= 1.0 + 1e-15);
                        CHECK(sampled[i] == doctest::Approx(recorded[i]).epsilon(1e-12));
                        sum += sampled[i];
                    }
                    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
                    CHECK(mp.theta() <= mp.pi() + 1e-15);
                    CHECK(mp.pi() <= 1.0 + 1e-15);
                    CHECK(mp.pi_rbar1() >= 0.0);
                    CHECK(mp.pi_rbar1() <= 1.0 + 1e-12);
                }
            }
        }
    }
    CHECK_THROWS_AS(ModelParams(1.2, 0.5, 0.5, 0.5), ValidationError);
}
