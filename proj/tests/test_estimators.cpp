#include <doctest.h>

#include "anchorstream/estimators.hpp"
#include "oracles.hpp"

using namespace anchorstream;

namespace {
const CellCounts5 kRegistry(169, 12, 52, 19, 777, 1029);
}

TEST_CASE("5-cell estimate on the registry table") {
    const PointEstimate est = estimate_5cell(kRegistry);
    CHECK(est.n_hat == doctest::Approx(30367.0 / 188.0).epsilon(1e-14));  // 161.5266
    CHECK(*est.pi_hat == doctest::Approx(est.n_hat / 1029.0).epsilon(1e-14));
    REQUIRE(est.decomposition.has_value());
    CHECK(est.decomposition->w == doctest::Approx(64.0 / 1029.0).epsilon(1e-14));
    CHECK(est.decomposition->p_star == doctest::Approx(19.0 / 188.0).epsilon(1e-14));
    CHECK(est.diagnostics.empty());
}

TEST_CASE("5-cell estimate: n6 = 0 third-term limit") {
    const PointEstimate est = estimate_5cell(CellCounts5(0, 5, 3, 0, 2, 10));
    CHECK(est.n_hat == 8.0);
    CHECK(est.decomposition->p_star == 0.0);
    CHECK(est.diagnostics == std::vector<std::string>{"n6_zero_point_limit"});
}

TEST_CASE("5-cell estimate: small hand-evaluated table") {
    const PointEstimate est = estimate_5cell(CellCounts5(8, 1, 1, 2, 8, 20));
    CHECK(est.n_hat == doctest::Approx(5.6).epsilon(1e-14));  // 2 + 2*18/10
}

TEST_CASE("anchor-sample estimator") {
    CHECK(estimate_rs(RsSummary(200, 31, 1029)).n_hat == doctest::Approx(159.495).epsilon(1e-14));
    CHECK(estimate_rs(RsSummary(50, 0, 100)).n_hat == 0.0);
    CHECK(estimate_rs(RsSummary(10, 10, 40)).n_hat == 40.0);
}

TEST_CASE("Chapman estimator") {
    CHECK(estimate_chapman(kRegistry).n_hat == doctest::Approx(159.0).epsilon(1e-14));
    // n4 = n6 = 0 collapses algebraically to n2
    CHECK(estimate_chapman(CellCounts5(3, 7, 0, 0, 10, 20)).n_hat == 7.0);
    // (n2, n4, n6) = (3, 7, 5): (11*9)/4 - 1
    CHECK(estimate_chapman(CellCounts5(0, 3, 7, 5, 5, 20)).n_hat ==
          doctest::Approx(23.75).epsilon(1e-14));
}

TEST_CASE("Chapman is invariant to n15 and n37") {
    testutil::TableGen gen(11);
    for (int i = 0; i < 200; ++i) {
        const CellCounts5 a = gen.next(0, 50);
        const CellCounts5 b(a.n15 + 7, a.n2, a.n4, a.n6, a.n37 + 3, a.n_tot + 10);
        CHECK(estimate_chapman(a).n_hat == estimate_chapman(b).n_hat);
    }
}

TEST_CASE("4-cell estimator") {
    const double psi = 200.0 / 1029.0;
    CHECK(estimate_4cell(CellCounts4(12, 52, 19, psi)).n_hat ==
          doctest::Approx(64.0 + 19.0 / psi).epsilon(1e-14));
    CHECK(estimate_4cell(CellCounts4(12, 52, 19, psi)).n_hat ==
          doctest::Approx(161.755).epsilon(1e-4));
    CHECK(estimate_4cell(CellCounts4(4, 9, 0, 0.3)).n_hat == 13.0);
    CHECK(estimate_4cell(CellCounts4(0, 0, 10, 0.5)).n_hat == 20.0);
}

TEST_CASE("7-cell estimator") {
    const CellCounts7 folded(0, 12, 0, 52, 169, 19, 777);
    CHECK(estimate_7cell(folded).n_hat == doctest::Approx(30367.0 / 188.0).epsilon(1e-14));
    CHECK(estimate_7cell(CellCounts7(1, 2, 3, 4, 5, 0, 6)).n_hat == 6.0);  // n6 = 0
    CHECK(estimate_7cell(CellCounts7(0, 1, 0, 1, 4, 1, 5)).n_hat ==
          doctest::Approx(4.0).epsilon(1e-14));  // 2 + 10/5
}

TEST_CASE("7-cell estimate equals the 5-cell estimate of its consolidation") {
    // the identity holds when Stream 1 records no negatives (n1 = n3 = 0),
    // which is exactly the situation the 5-cell table describes; folding
    // nonzero n1/n3 discards information and moves the estimate
    std::mt19937 rng(21);
    std::uniform_int_distribution<Count> cell(0, 60);
    for (int i = 0; i < 500; ++i) {
        const CellCounts7 c7(0, cell(rng), 0, cell(rng), cell(rng) + 1, cell(rng), cell(rng));
        if (c7.total() == 0) continue;
        CHECK(estimate_7cell(c7).n_hat == estimate_5cell(c7.consolidated()).n_hat);
    }
    const CellCounts7 informative(9, 4, 6, 3, 20, 5, 53);
    CHECK(estimate_7cell(informative).n_hat !=
          estimate_5cell(informative.consolidated()).n_hat);
}

TEST_CASE("stratified estimate sums per-stratum estimates") {
    const std::map<std::string, CellCounts5> single = {{"all", kRegistry}};
    CHECK(stratified_estimate(single).n_hat == doctest::Approx(30367.0 / 188.0).epsilon(1e-14));

    const CellCounts5 small(8, 1, 1, 2, 8, 20);
    const std::map<std::string, CellCounts5> twin = {{"a", small}, {"b", small}};
    CHECK(stratified_estimate(twin).n_hat == doctest::Approx(11.2).epsilon(1e-14));

    // arbitrary two-way split of the registry table; the stratified total is
    // the sum of the parts and differs from the pooled estimate
    const CellCounts5 part_a(100, 6, 26, 10, 400, 542);
    const CellCounts5 part_b(69, 6, 26, 9, 377, 487);
    const std::map<std::string, CellCounts5> split = {{"a", part_a}, {"b", part_b}};
    const double expect = estimate_5cell(part_a).n_hat + estimate_5cell(part_b).n_hat;
    CHECK(stratified_estimate(split).n_hat == doctest::Approx(expect).epsilon(1e-14));
    CHECK(stratified_estimate(split).n_hat != doctest::Approx(30367.0 / 188.0).epsilon(1e-6));

    CHECK_THROWS_AS(stratified_estimate({}), ValidationError);
}

TEST_CASE("5-cell estimate is bracketed by the known-case and unrecorded bounds") {
    testutil::TableGen gen(5);
    for (int i = 0; i < 2000; ++i) {
        const CellCounts5 c = gen.next_with_zeros();
        const double n_hat = estimate_5cell(c).n_hat;
        const double n_c = static_cast<double>(c.known_cases());
        CHECK(n_hat >= n_c);
        CHECK(n_hat <= n_c + static_cast<double>(c.n37) + 1e-9);
        CHECK(n_hat <= static_cast<double>(c.n_tot - c.n15) + 1e-9);
    }
}

TEST_CASE("the three prevalence evaluation routes agree to 4 ulps") {
    testutil::TableGen gen(17);
    for (int i = 0; i < 2000; ++i) {
        const CellCounts5 c = gen.next_with_zeros();
        const double direct = prevalence_direct(c);
        const double weighted = prevalence_weighted(c);
        const double recorded = prevalence_recorded_scale(c);
        CHECK(testutil::ulp_distance(direct, weighted) <= 4.0);
        CHECK(testutil::ulp_distance(direct, recorded) <= 4.0);
        CHECK(testutil::ulp_distance(weighted, recorded) <= 4.0);
        CHECK(direct == doctest::Approx(estimate_5cell(c).n_hat / static_cast<double>(c.n_tot))
                            .epsilon(1e-15));
    }
}

TEST_CASE("point estimators scale exactly with power-of-two cell multiples") {
    testutil::TableGen gen(31);
    for (int i = 0; i < 300; ++i) {
        const CellCounts5 c = gen.next(0, 200);
        const RsSummary rs(c.anchor_size() > 0 ? c.anchor_size() : 1, c.anchor_positives(),
                           c.n_tot);
        for (Count k : {2, 4, 16}) {
            const CellCounts5 ck(k * c.n15, k * c.n2, k * c.n4, k * c.n6, k * c.n37, k * c.n_tot);
            CHECK(estimate_5cell(ck).n_hat == static_cast<double>(k) * estimate_5cell(c).n_hat);
            const RsSummary rsk(k * rs.n_rs, k * rs.n_rs_pos, k * rs.n_tot);
            CHECK(estimate_rs(rsk).n_hat == static_cast<double>(k) * estimate_rs(rs).n_hat);
        }
        for (Count k : {3, 5, 7}) {  // odd multiples agree to rounding only
            const CellCounts5 ck(k * c.n15, k * c.n2, k * c.n4, k * c.n6, k * c.n37, k * c.n_tot);
            CHECK(testutil::ulp_distance(estimate_5cell(ck).n_hat,
                                         static_cast<double>(k) * estimate_5cell(c).n_hat) <= 4.0);
        }
    }
}
