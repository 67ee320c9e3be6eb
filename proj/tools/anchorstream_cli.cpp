// Command-line front end: estimate disease-case counts from 5-cell tables
// or record-level capture histories, tabulate records, run Monte Carlo
// scenarios, and list scenario presets.
//
// Exit codes: 0 success, 2 input/validation failure, 3 internal numeric
// degeneracy.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anchorstream/anchorstream.hpp"

namespace {

using namespace anchorstream;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("ANCHORSTREAM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ValidationError(std::string("ANCHORSTREAM_SEED is not an integer: ") + env);
        }
    }
    return kDefaultSeed;
}

// --population accepts either a single integer or stratum=size pairs
// ("A=500,B=529").
void parse_population(const std::string& spec, std::optional<Count>& total,
                      std::map<std::string, Count>& by_stratum) {
    if (spec.find('=') == std::string::npos) {
        total = static_cast<Count>(std::stoll(spec));
        return;
    }
    std::size_t pos = 0;
    while (pos < spec.size()) {
        const std::size_t comma = spec.find(',', pos);
        const std::string item = spec.substr(pos, comma == std::string::npos ? std::string::npos
                                                                             : comma - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ValidationError("bad --population entry: " + item);
        }
        by_stratum[item.substr(0, eq)] = static_cast<Count>(std::stoll(item.substr(eq + 1)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
}

std::vector<FpcAdjustment> parse_adjustments(const std::vector<std::string>& names) {
    std::vector<FpcAdjustment> out;
    for (const std::string& n : names) {
        if (n == "none" || n == "unadjusted") {
            out.push_back(FpcAdjustment::none);
        } else if (n == "fpc1") {
            out.push_back(FpcAdjustment::fpc1);
        } else if (n == "fpc2") {
            out.push_back(FpcAdjustment::fpc2);
        } else {
            throw ValidationError("unknown adjustment: " + n);
        }
    }
    return out;
}

void check_reports_finite(const std::vector<EstimateReport>& reports) {
    for (const EstimateReport& r : reports) {
        bool bad = !std::isfinite(r.point_n);
        for (const auto& [name, se] : r.se_by_variant) bad = bad || !std::isfinite(se);
        for (const auto& [name, iv] : r.interval_by_variant) {
            bad = bad || !std::isfinite(iv.lower) || !std::isfinite(iv.upper);
        }
        if (bad) throw DegeneracyError("non-finite value in method " + r.method);
    }
}

int run(int argc, char** argv) {
    CLI::App app{"anchor-stream capture-recapture estimation"};
    app.require_subcommand(1);

    // --- estimate ---
    auto* est = app.add_subcommand("estimate", "estimate case counts from counts or records");
    std::string est_input, est_mode = "counts", est_format = "markdown";
    std::string population_spec, stratify_by;
    std::vector<std::string> adjustment_names = {"none", "fpc1", "fpc2"};
    std::vector<std::string> methods = {"n5", "rs", "chapman"};
    double level = 0.95;
    std::size_t draws = 10000;
    std::optional<std::uint64_t> seed_flag;
    est->add_option("--input", est_input, "counts document or records file")->required();
    est->add_option("--mode", est_mode, "counts|records")
        ->check(CLI::IsMember({"counts", "records"}));
    est->add_option("--format", est_format, "json|csv|markdown");
    est->add_option("--level", level, "interval level in (0,1)");
    est->add_option("--draws", draws, "posterior draws per credible interval");
    est->add_option("--seed", seed_flag, "master RNG seed");
    est->add_option("--adjustment", adjustment_names, "credible adjustments: none|fpc1|fpc2");
    est->add_option("--method", methods, "methods: n5|rs|chapman");
    est->add_option("--population", population_spec,
                    "records mode: cohort size, or stratum=size pairs");
    est->add_option("--stratify-by", stratify_by,
                    "records mode: stratify on this records column (only 'stratum')");

    // --- tabulate ---
    auto* tab = app.add_subcommand("tabulate", "tabulate records into a counts document");
    std::string tab_input, tab_population, tab_stratify;
    tab->add_option("--input", tab_input, "records file")->required();
    tab->add_option("--population", tab_population, "cohort size, or stratum=size pairs")
        ->required();
    tab->add_option("--stratify-by", tab_stratify, "stratify on this records column");

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "run a Monte Carlo scenario");
    std::string preset, sim_format = "markdown";
    std::optional<std::int64_t> reps_flag;
    std::optional<std::size_t> sim_draws_flag;
    std::optional<std::uint64_t> sim_seed_flag;
    SimScenario custom;
    custom.n_tot = 0;
    int threads = 0;
    sim->add_option("--preset", preset, "named scenario preset (see `presets`)");
    sim->add_option("--n-tot", custom.n_tot, "custom scenario: population size");
    sim->add_option("--n-true", custom.n_true, "custom scenario: true case count");
    sim->add_option("--anchor-size", custom.anchor_size, "custom scenario: anchor sample size");
    sim->add_option("--p-symp-case", custom.p_symp_case, "P(symptomatic | case)");
    sim->add_option("--p-symp-noncase", custom.p_symp_noncase, "P(symptomatic | non-case)");
    sim->add_option("--p-s1-symp", custom.p_s1_symp, "P(Stream-1 sampled | symptomatic)");
    sim->add_option("--p-s1-asymp", custom.p_s1_asymp, "P(Stream-1 sampled | asymptomatic)");
    sim->add_option("--replications", reps_flag, "replication count");
    sim->add_option("--draws", sim_draws_flag, "posterior draws per replication");
    sim->add_option("--seed", sim_seed_flag, "master RNG seed");
    sim->add_option("--level", custom.level, "interval level in (0,1)");
    sim->add_option("--threads", threads, "worker threads (0 = hardware)");
    sim->add_option("--format", sim_format, "json|csv|markdown");

    // --- presets ---
    auto* pre = app.add_subcommand("presets", "list scenario preset names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (est->parsed()) {
        AnalysisOptions opt;
        opt.level = level;
        opt.draws = draws;
        opt.seed = seed_flag ? *seed_flag : default_seed();
        opt.adjustments = parse_adjustments(adjustment_names);
        opt.methods = methods;
        const OutputFormat format = parse_format(est_format);

        std::vector<EstimateReport> reports;
        if (est_mode == "counts") {
            ParsedCounts parsed = parse_counts_file(est_input);
            for (const std::string& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
            reports = analyze_counts(parsed.counts, opt);
        } else {
            std::vector<CaptureRecord> records = parse_records_file(est_input);
            std::optional<Count> total;
            std::map<std::string, Count> by_stratum;
            if (population_spec.empty()) {
                throw ValidationError("records mode requires --population");
            }
            parse_population(population_spec, total, by_stratum);
            if (!stratify_by.empty()) {
                if (stratify_by != "stratum") {
                    throw ValidationError("--stratify-by must name the 'stratum' column");
                }
                if (by_stratum.empty()) {
                    throw ValidationError("stratified analysis needs stratum=size --population pairs");
                }
                reports = analyze_stratified(tabulate_stratified(records, by_stratum), opt);
            } else {
                if (!total) throw ValidationError("unstratified records need a single --population size");
                reports = analyze_counts(tabulate(records, *total), opt);
            }
        }
        check_reports_finite(reports);
        std::cout << render_reports(reports, format);
        return 0;
    }

    if (tab->parsed()) {
        std::vector<CaptureRecord> records = parse_records_file(tab_input);
        std::optional<Count> total;
        std::map<std::string, Count> by_stratum;
        parse_population(tab_population, total, by_stratum);
        if (!tab_stratify.empty()) {
            if (tab_stratify != "stratum") {
                throw ValidationError("--stratify-by must name the 'stratum' column");
            }
            if (by_stratum.empty()) {
                throw ValidationError("stratified tabulation needs stratum=size --population pairs");
            }
            std::cout << render_counts(tabulate_stratified(records, by_stratum));
        } else {
            if (!total) throw ValidationError("unstratified tabulation needs a single --population size");
            std::cout << render_counts(tabulate(records, *total));
        }
        return 0;
    }

    if (sim->parsed()) {
        SimScenario scenario;
        if (!preset.empty()) {
            scenario = preset_scenario(preset);
        } else {
            if (custom.n_tot <= 0) {
                throw ValidationError("simulate needs --preset or a custom scenario (--n-tot ...)");
            }
            scenario = custom;
        }
        if (reps_flag) scenario.replications = *reps_flag;
        if (sim_draws_flag) scenario.credible_draws = *sim_draws_flag;
        scenario.master_seed = sim_seed_flag ? *sim_seed_flag : default_seed();
        scenario.level = custom.level;
        scenario.threads = threads;
        const SimSummary summary = run_scenario(scenario);
        std::cout << render_summary(scenario, summary, parse_format(sim_format));
        return 0;
    }

    if (pre->parsed()) {
        for (const std::string& name : preset_names()) std::cout << name << "\n";
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const anchorstream::DegeneracyError& e) {
        std::cerr << "internal degeneracy: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
