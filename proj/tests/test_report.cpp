#include <cmath>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "anchorstream/report.hpp"
#include "anchorstream/variance.hpp"

using namespace anchorstream;

namespace {

const char* data_path(const char* name) {
    static std::string dir = ANCHORSTREAM_TEST_DATA_DIR;
    static std::string full;
    full = dir + "/" + name;
    return full.c_str();
}

const Interval& lookup_iv(const EstimateReport& r, const std::string& key) {
    for (const auto& [k, v] : r.interval_by_variant) {
        if (k == key) return v;
    }
    throw std::runtime_error("missing interval " + key);
}

double lookup_se(const EstimateReport& r, const std::string& key) {
    for (const auto& [k, v] : r.se_by_variant) {
        if (k == key) return v;
    }
    throw std::runtime_error("missing se " + key);
}

}  // namespace

TEST_CASE("counts document round-trips") {
    const ParsedCounts parsed = parse_counts_file(data_path("recurrence_counts.json"));
    CHECK(parsed.counts == CellCounts5(169, 12, 52, 19, 777, 1029));
    CHECK(parsed.warnings.empty());

    const std::string rendered = render_counts(parsed.counts);
    std::istringstream in(rendered);
    const ParsedCounts reparsed = parse_counts(in);
    CHECK(reparsed.counts == parsed.counts);
    CHECK(render_counts(reparsed.counts) == rendered);
}

TEST_CASE("counts parsing errors name the problem") {
    std::istringstream missing(R"({"n15": 1, "n2": 2, "n4": 3, "n6": 4, "n_tot": 10})");
    CHECK_THROWS_WITH_AS(parse_counts(missing), doctest::Contains("n37"), ValidationError);

    CHECK_THROWS_WITH_AS(parse_counts_file(data_path("bad_sum_counts.json")),
                         doctest::Contains("n_tot=1029"), ValidationError);

    std::istringstream not_json("{nope");
    CHECK_THROWS_AS(parse_counts(not_json), ValidationError);

    std::istringstream non_integer(R"({"n15": 1.5, "n2": 2, "n4": 3, "n6": 4, "n37": 0, "n_tot": 10})");
    CHECK_THROWS_AS(parse_counts(non_integer), ValidationError);
}

TEST_CASE("zero n6 parses with a fallback warning") {
    const ParsedCounts parsed = parse_counts_file(data_path("zero_n6_counts.json"));
    CHECK(parsed.counts.n6 == 0);
    REQUIRE(parsed.warnings.size() == 1);
    CHECK(parsed.warnings[0] == "n6_zero_fpc_fallbacks_possible");
}

TEST_CASE("records parsing accepts the documented boolean spellings") {
    std::istringstream in(
        "id,stream1_positive,in_anchor,anchor_result\n"
        "a,1,true,0\n"
        "b,false,0,\n"
        "c,TRUE,1,True\n");
    const auto records = parse_records(in);
    REQUIRE(records.size() == 3);
    CHECK(records[0].stream1_positive);
    CHECK(records[0].in_anchor);
    CHECK(records[0].anchor_result == false);
    CHECK_FALSE(records[1].stream1_positive);
    CHECK_FALSE(records[1].anchor_result.has_value());
    CHECK(records[2].anchor_result == true);
}

TEST_CASE("records parsing error paths carry line numbers") {
    std::istringstream dup(
        "id,stream1_positive,in_anchor,anchor_result\n"
        "a,1,0,\n"
        "a,0,0,\n");
    CHECK_THROWS_WITH_AS(parse_records(dup), doctest::Contains("duplicate"), ValidationError);

    std::istringstream missing_result(
        "id,stream1_positive,in_anchor,anchor_result\n"
        "a,1,1,\n");
    CHECK_THROWS_WITH_AS(parse_records(missing_result), doctest::Contains("line 2"),
                         ValidationError);

    std::istringstream bad_bool(
        "id,stream1_positive,in_anchor,anchor_result\n"
        "a,1,0,\n"
        "b,maybe,0,\n");
    CHECK_THROWS_WITH_AS(parse_records(bad_bool), doctest::Contains("line 3"), ValidationError);

    std::istringstream short_row(
        "id,stream1_positive,in_anchor,anchor_result\n"
        "a,1,0\n");
    CHECK_THROWS_WITH_AS(parse_records(short_row), doctest::Contains("line 2"), ValidationError);

    std::istringstream bad_header("id,stream1_positive,anchor_result\n");
    CHECK_THROWS_AS(parse_records(bad_header), ValidationError);

    std::istringstream spurious_result(
        "id,stream1_positive,in_anchor,anchor_result\n"
        "a,1,0,1\n");
    CHECK_THROWS_WITH_AS(parse_records(spurious_result), doctest::Contains("line 2"),
                         ValidationError);
}

TEST_CASE("record fixture reproduces the registry table end to end") {
    const auto records = parse_records_file(data_path("recurrence_records.csv"));
    CHECK(records.size() == 252);
    const CellCounts5 c = tabulate(records, 1029);
    CHECK(c == CellCounts5(169, 12, 52, 19, 777, 1029));
}

TEST_CASE("full analysis of the registry table") {
    const ParsedCounts parsed = parse_counts_file(data_path("recurrence_counts.json"));
    AnalysisOptions opt;
    opt.draws = 100000;
    opt.seed = kDefaultSeed;
    const auto reports = analyze_counts(parsed.counts, opt);
    REQUIRE(reports.size() == 3);

    const EstimateReport& n5 = reports[0];
    CHECK(n5.method == "n5");
    CHECK(n5.point_n == doctest::Approx(161.5266).epsilon(1e-6));
    CHECK(lookup_se(n5, "unadjusted") == doctest::Approx(22.3273).epsilon(1e-5));
    CHECK(lookup_se(n5, "fpc1") == doctest::Approx(19.0860).epsilon(1e-5));
    CHECK(lookup_se(n5, "fpc2") == doctest::Approx(20.3169).epsilon(1e-5));
    CHECK(lookup_iv(n5, "wald/fpc1").lower == doctest::Approx(124.1187).epsilon(1e-6));
    CHECK(lookup_iv(n5, "wald/fpc1").upper == doctest::Approx(198.9345).epsilon(1e-6));
    // true posterior percentiles; +/-1 covers the m = 1e5 sampling noise
    CHECK(lookup_iv(n5, "credible/unadjusted").lower == doctest::Approx(123.9).epsilon(1.0 / 124));
    CHECK(lookup_iv(n5, "credible/unadjusted").upper == doctest::Approx(211.5).epsilon(1.0 / 211));
    CHECK(lookup_iv(n5, "credible/fpc1").lower == doctest::Approx(129.4).epsilon(1.0 / 129));
    CHECK(lookup_iv(n5, "credible/fpc1").upper == doctest::Approx(204.2).epsilon(1.0 / 204));

    const EstimateReport& rs = reports[1];
    CHECK(rs.point_n == doctest::Approx(159.495).epsilon(1e-8));
    CHECK(lookup_se(rs, "cochran") == doctest::Approx(23.6948).epsilon(1e-5));
    CHECK(lookup_iv(rs, "credible/cochran").lower == doctest::Approx(117.8).epsilon(1.5 / 118));
    CHECK(lookup_iv(rs, "credible/cochran").upper == doctest::Approx(210.4).epsilon(1.5 / 210));

    const EstimateReport& chap = reports[2];
    CHECK(chap.point_n == 159.0);
    CHECK(lookup_se(chap, "chapman") == doctest::Approx(29.4715).epsilon(1e-5));
    CHECK(lookup_iv(chap, "logit").lower == doctest::Approx(119.494).epsilon(1e-4));
    CHECK(std::find(chap.diagnostics.begin(), chap.diagnostics.end(),
                    "chapman_logit_reconstructed") != chap.diagnostics.end());
}

TEST_CASE("machine renderings are bit-identical across runs") {
    const ParsedCounts parsed = parse_counts_file(data_path("recurrence_counts.json"));
    AnalysisOptions opt;
    opt.draws = 5000;
    const std::string a = render_reports(analyze_counts(parsed.counts, opt), OutputFormat::json);
    const std::string b = render_reports(analyze_counts(parsed.counts, opt), OutputFormat::json);
    CHECK(a == b);
    const std::string c = render_reports(analyze_counts(parsed.counts, opt), OutputFormat::csv);
    const std::string d = render_reports(analyze_counts(parsed.counts, opt), OutputFormat::csv);
    CHECK(c == d);
}

TEST_CASE("single-stratum analysis collapses to the unstratified one") {
    const ParsedCounts parsed = parse_counts_file(data_path("recurrence_counts.json"));
    AnalysisOptions opt;
    opt.draws = 2000;
    const auto whole = analyze_counts(parsed.counts, opt);
    const auto strat = analyze_stratified({{"all", parsed.counts}}, opt);
    REQUIRE(strat.size() == 1);
    CHECK(strat[0].point_n == whole[0].point_n);
    CHECK(lookup_se(strat[0], "fpc1") == lookup_se(whole[0], "fpc1"));
    CHECK(lookup_iv(strat[0], "wald/fpc1").lower == lookup_iv(whole[0], "wald/fpc1").lower);
}

TEST_CASE("two-stratum analysis sums estimates and variances") {
    const auto records = parse_records_file(data_path("strata_records.csv"));
    const auto tables = tabulate_stratified(records, {{"east", 20}, {"west", 10}});
    CHECK(tables.at("east") == CellCounts5(8, 1, 1, 2, 8, 20));
    CHECK(tables.at("west") == CellCounts5(2, 1, 1, 1, 5, 10));

    AnalysisOptions opt;
    opt.draws = 500;
    const auto reports = analyze_stratified(tables, opt);
    REQUIRE(reports.size() == 1);
    // hand-evaluated: east 5.6, west 2 + 8/3
    CHECK(reports[0].point_n == doctest::Approx(5.6 + 2.0 + 8.0 / 3.0).epsilon(1e-12));
    const double var_sum = var5_fpc1(tables.at("east")).var_n + var5_fpc1(tables.at("west")).var_n;
    CHECK(lookup_se(reports[0], "fpc1") == doctest::Approx(std::sqrt(var_sum)).epsilon(1e-12));
    CHECK(lookup_se(reports[0], "fpc1") == doctest::Approx(std::sqrt(2.56 + 4.444444444444445)).epsilon(1e-9));
}

TEST_CASE("markdown rounding is half away from zero at one decimal") {
    CHECK(round1(0.05) == "0.1");
    CHECK(round1(-0.05) == "-0.1");
    CHECK(round1(2.25) == "2.3");
    CHECK(round1(2.24) == "2.2");
    CHECK(round1(161.52659) == "161.5");
    CHECK(round1(std::nan("")) == "NA");
}

TEST_CASE("render formats carry the expected structure") {
    const ParsedCounts parsed = parse_counts_file(data_path("recurrence_counts.json"));
    AnalysisOptions opt;
    opt.draws = 1000;
    const auto reports = analyze_counts(parsed.counts, opt);

    const std::string md = render_reports(reports, OutputFormat::markdown);
    CHECK(md.find("| n5 | point | | 161.5 |") != std::string::npos);
    CHECK(md.find("| rs | se | cochran | 23.7 |") != std::string::npos);

    const std::string csv = render_reports(reports, OutputFormat::csv);
    CHECK(csv.find("method,quantity,variant,value") == 0);
    CHECK(csv.find("chapman,point_n,,159") != std::string::npos);

    const std::string js = render_reports(reports, OutputFormat::json);
    CHECK(js.find("\"method\": \"n5\"") != std::string::npos);
    CHECK(js.find("\"wald/fpc1\"") != std::string::npos);

    CHECK_THROWS_AS(parse_format("yaml"), ValidationError);
    CHECK(parse_format("md") == OutputFormat::markdown);
}
