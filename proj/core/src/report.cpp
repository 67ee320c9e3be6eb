#include "anchorstream/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "anchorstream/estimators.hpp"
#include "anchorstream/variance.hpp"

namespace anchorstream {

namespace {

using json = nlohmann::ordered_json;

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt3(double v) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

json interval_json(const Interval& iv) {
    json j = json::array({iv.lower, iv.upper});
    return j;
}

Count require_count(const json& doc, const char* key) {
    if (!doc.contains(key)) {
        throw ValidationError(std::string("counts document is missing key '") + key + "'");
    }
    const json& v = doc.at(key);
    if (!v.is_number_integer()) {
        throw ValidationError(std::string("counts key '") + key + "' must be an integer");
    }
    return v.get<Count>();
}

std::string lower_copy(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool parse_bool_field(const std::string& raw, std::size_t line, const std::string& field) {
    const std::string v = lower_copy(raw);
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ValidationError("line " + std::to_string(line) + ": bad boolean '" + raw +
                          "' in field " + field);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (std::string& f : out) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = (b == std::string::npos) ? std::string{} : f.substr(b, e - b + 1);
    }
    return out;
}

}  // namespace

std::string round1(double v) {
    if (std::isnan(v)) return "NA";
    const double r = std::round(v * 10.0) / 10.0;  // std::round: halves away from zero
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", r);
    return buf;
}

OutputFormat parse_format(const std::string& name) {
    if (name == "json") return OutputFormat::json;
    if (name == "csv") return OutputFormat::csv;
    if (name == "markdown" || name == "md") return OutputFormat::markdown;
    throw ValidationError("unknown output format: " + name);
}

ParsedCounts parse_counts(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("counts document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("counts document must be a JSON object");

    ParsedCounts out{CellCounts5(require_count(doc, "n15"), require_count(doc, "n2"),
                                 require_count(doc, "n4"), require_count(doc, "n6"),
                                 require_count(doc, "n37"), require_count(doc, "n_tot")),
                     {}};
    if (out.counts.n6 == 0) out.warnings.push_back("n6_zero_fpc_fallbacks_possible");
    return out;
}

ParsedCounts parse_counts_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open counts file: " + path);
    return parse_counts(in);
}

std::vector<CaptureRecord> parse_records(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("records file is empty");
    const std::vector<std::string> header = split_csv_line(line);

    const std::vector<std::string> expected = {"id", "stream1_positive", "in_anchor",
                                               "anchor_result"};
    if (header.size() < expected.size() || header.size() > expected.size() + 1) {
        throw ValidationError("records header must be id,stream1_positive,in_anchor,anchor_result[,stratum]");
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (lower_copy(header[i]) != expected[i]) {
            throw ValidationError("records header column " + std::to_string(i + 1) +
                                  " must be '" + expected[i] + "', got '" + header[i] + "'");
        }
    }
    const bool has_stratum = header.size() == 5;
    if (has_stratum && lower_copy(header[4]) != "stratum") {
        throw ValidationError("fifth records column must be 'stratum', got '" + header[4] + "'");
    }

    std::vector<CaptureRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        CaptureRecord r;
        r.id = fields[0];
        if (r.id.empty()) {
            throw ValidationError("line " + std::to_string(line_no) + ": empty id");
        }
        r.stream1_positive = parse_bool_field(fields[1], line_no, "stream1_positive");
        r.in_anchor = parse_bool_field(fields[2], line_no, "in_anchor");
        if (fields[3].empty()) {
            if (r.in_anchor) {
                throw ValidationError("line " + std::to_string(line_no) +
                                      ": anchor_result required when in_anchor is true");
            }
        } else {
            if (!r.in_anchor) {
                throw ValidationError("line " + std::to_string(line_no) +
                                      ": anchor_result given for a record outside the anchor sample");
            }
            r.anchor_result = parse_bool_field(fields[3], line_no, "anchor_result");
        }
        if (has_stratum && !fields[4].empty()) r.stratum = fields[4];
        records.push_back(std::move(r));
    }

    // duplicate ids surface here with line-independent messages
    std::vector<std::string> ids;
    ids.reserve(records.size());
    for (const CaptureRecord& r : records) ids.push_back(r.id);
    std::sort(ids.begin(), ids.end());
    const auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end()) throw ValidationError("duplicate record id: " + *dup);

    return records;
}

std::vector<CaptureRecord> parse_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open records file: " + path);
    return parse_records(in);
}

namespace {

EstimateReport report_n5(const CellCounts5& c, const AnalysisOptions& opt) {
    EstimateReport rep;
    rep.method = "n5";
    rep.level = opt.level;

    const PointEstimate est = estimate_5cell(c);
    rep.point_n = est.n_hat;
    rep.point_pi = est.pi_hat;
    rep.diagnostics = est.diagnostics;

    const std::array<VarianceResult, 3> vars = {var5_unadjusted(c), var5_fpc1(c), var5_fpc2(c)};
    for (const VarianceResult& v : vars) {
        rep.se_by_variant.emplace_back(to_string(v.variant), v.se());
        for (const std::string& fb : v.fallbacks_applied) {
            const std::string tag = std::string(to_string(v.variant)) + ":" + fb;
            if (std::find(rep.diagnostics.begin(), rep.diagnostics.end(), tag) ==
                rep.diagnostics.end()) {
                rep.diagnostics.push_back(tag);
            }
        }
        rep.interval_by_variant.emplace_back(std::string("wald/") + to_string(v.variant),
                                             wald(est.n_hat, v.se(), opt.level));
    }
    for (FpcAdjustment adj : opt.adjustments) {
        const std::uint64_t sub_seed =
            derive_seed(opt.seed, 1 + static_cast<std::uint64_t>(adj));
        CredibleResult cr = credible_5cell(c, opt.draws, adj, opt.level, sub_seed);
        rep.interval_by_variant.emplace_back(std::string("credible/") + to_string(adj),
                                             cr.interval);
        for (const std::string& d : cr.diagnostics) rep.diagnostics.push_back(d);
    }
    return rep;
}

EstimateReport report_rs(const CellCounts5& c, const AnalysisOptions& opt) {
    EstimateReport rep;
    rep.method = "rs";
    rep.level = opt.level;

    const RsSummary rs(c.anchor_size(), c.anchor_positives(), c.n_tot);
    const PointEstimate est = estimate_rs(rs);
    rep.point_n = est.n_hat;
    rep.point_pi = est.pi_hat;

    const VarianceResult v_un = var_rs(rs, false);
    const VarianceResult v_ad = var_rs(rs, true);
    rep.se_by_variant.emplace_back("unadjusted", v_un.se());
    rep.se_by_variant.emplace_back("cochran", v_ad.se());
    rep.interval_by_variant.emplace_back("wald/unadjusted", wald(est.n_hat, v_un.se(), opt.level));
    rep.interval_by_variant.emplace_back("wald/cochran", wald(est.n_hat, v_ad.se(), opt.level));

    CredibleResult cr = credible_rs(rs, opt.draws, opt.level, derive_seed(opt.seed, 4), true);
    rep.interval_by_variant.emplace_back("credible/cochran", cr.interval);
    for (const std::string& d : cr.diagnostics) rep.diagnostics.push_back(d);
    return rep;
}

EstimateReport report_chapman(const CellCounts5& c, const AnalysisOptions& opt) {
    EstimateReport rep;
    rep.method = "chapman";
    rep.level = opt.level;

    const PointEstimate est = estimate_chapman(c);
    rep.point_n = est.n_hat;
    rep.point_pi = est.pi_hat;
    rep.se_by_variant.emplace_back("chapman", var_chapman(c).se());
    rep.interval_by_variant.emplace_back("logit", logit_chapman(c, opt.level));
    rep.diagnostics.push_back("chapman_logit_reconstructed");
    if (c.n4 == 0 || c.n6 == 0) rep.diagnostics.push_back("degenerate_variance_interval");
    return rep;
}

}  // namespace

std::vector<EstimateReport> analyze_counts(const CellCounts5& counts,
                                           const AnalysisOptions& opt) {
    std::vector<EstimateReport> reports;
    for (const std::string& m : opt.methods) {
        if (m == "n5") {
            reports.push_back(report_n5(counts, opt));
        } else if (m == "rs") {
            reports.push_back(report_rs(counts, opt));
        } else if (m == "chapman") {
            reports.push_back(report_chapman(counts, opt));
        } else {
            throw ValidationError("unknown method: " + m);
        }
    }
    return reports;
}

std::vector<EstimateReport> analyze_stratified(const std::map<std::string, CellCounts5>& tables,
                                               const AnalysisOptions& opt) {
    EstimateReport rep;
    rep.method = "n5_stratified";
    rep.level = opt.level;

    const PointEstimate est = stratified_estimate(tables);
    rep.point_n = est.n_hat;
    rep.point_pi = est.pi_hat;
    rep.diagnostics = est.diagnostics;

    for (VarianceVariant variant :
         {VarianceVariant::unadjusted, VarianceVariant::fpc1, VarianceVariant::fpc2}) {
        const VarianceResult v = var_stratified(tables, variant);
        rep.se_by_variant.emplace_back(to_string(variant), v.se());
        rep.interval_by_variant.emplace_back(std::string("wald/") + to_string(variant),
                                             wald(est.n_hat, v.se(), opt.level));
        for (const std::string& fb : v.fallbacks_applied) {
            rep.diagnostics.push_back(std::string(to_string(variant)) + ":" + fb);
        }
    }
    rep.diagnostics.push_back("stratified_wald_only");
    return {rep};
}

std::string render_reports(const std::vector<EstimateReport>& reports, OutputFormat format) {
    switch (format) {
        case OutputFormat::json: {
            json root = json::array();
            for (const EstimateReport& r : reports) {
                json j;
                j["method"] = r.method;
                j["point_n"] = r.point_n;
                if (r.point_pi) j["point_pi"] = *r.point_pi;
                json se = json::object();
                for (const auto& [name, value] : r.se_by_variant) se[name] = value;
                j["se"] = se;
                json ivs = json::object();
                for (const auto& [name, iv] : r.interval_by_variant) ivs[name] = interval_json(iv);
                j["intervals"] = ivs;
                j["level"] = r.level;
                j["diagnostics"] = r.diagnostics;
                root.push_back(j);
            }
            return root.dump(2) + "\n";
        }
        case OutputFormat::csv: {
            std::ostringstream out;
            out << "method,quantity,variant,value\n";
            for (const EstimateReport& r : reports) {
                out << r.method << ",point_n,," << fmt_full(r.point_n) << "\n";
                if (r.point_pi) out << r.method << ",point_pi,," << fmt_full(*r.point_pi) << "\n";
                for (const auto& [name, value] : r.se_by_variant) {
                    out << r.method << ",se," << name << "," << fmt_full(value) << "\n";
                }
                for (const auto& [name, iv] : r.interval_by_variant) {
                    out << r.method << ",interval_lower," << name << "," << fmt_full(iv.lower) << "\n";
                    out << r.method << ",interval_upper," << name << "," << fmt_full(iv.upper) << "\n";
                }
            }
            return out.str();
        }
        case OutputFormat::markdown: {
            std::ostringstream out;
            out << "| method | quantity | variant | value |\n";
            out << "|---|---|---|---|\n";
            for (const EstimateReport& r : reports) {
                out << "| " << r.method << " | point | | " << round1(r.point_n) << " |\n";
                for (const auto& [name, value] : r.se_by_variant) {
                    out << "| " << r.method << " | se | " << name << " | " << round1(value)
                        << " |\n";
                }
                for (const auto& [name, iv] : r.interval_by_variant) {
                    out << "| " << r.method << " | interval | " << name << " | [" << round1(iv.lower)
                        << ", " << round1(iv.upper) << "] |\n";
                }
                if (!r.diagnostics.empty()) {
                    out << "| " << r.method << " | diagnostics | | ";
                    for (std::size_t i = 0; i < r.diagnostics.size(); ++i) {
                        if (i) out << "; ";
                        out << r.diagnostics[i];
                    }
                    out << " |\n";
                }
            }
            return out.str();
        }
    }
    throw ValidationError("unknown output format");
}

namespace {

json counts_json(const CellCounts5& c) {
    json j;
    j["n15"] = c.n15;
    j["n2"] = c.n2;
    j["n4"] = c.n4;
    j["n6"] = c.n6;
    j["n37"] = c.n37;
    j["n_tot"] = c.n_tot;
    return j;
}

}  // namespace

std::string render_counts(const CellCounts5& counts) { return counts_json(counts).dump(2) + "\n"; }

std::string render_counts(const std::map<std::string, CellCounts5>& tables) {
    json j;
    for (const auto& [name, counts] : tables) j[name] = counts_json(counts);
    return j.dump(2) + "\n";
}

std::string render_summary(const SimScenario& sc, const SimSummary& s, OutputFormat format) {
    const auto estimators = {std::pair{"n5", &s.n5}, std::pair{"rs", &s.rs},
                             std::pair{"chapman", &s.chapman}};
    switch (format) {
        case OutputFormat::json: {
            json j;
            json cfg;
            cfg["n_tot"] = sc.n_tot;
            cfg["n_true"] = sc.n_true;
            cfg["anchor_size"] = sc.anchor_size;
            cfg["p_symp_case"] = sc.p_symp_case;
            cfg["p_symp_noncase"] = sc.p_symp_noncase;
            cfg["p_s1_symp"] = sc.p_s1_symp;
            cfg["p_s1_asymp"] = sc.p_s1_asymp;
            cfg["replications"] = sc.replications;
            cfg["credible_draws"] = sc.credible_draws;
            cfg["seed"] = sc.master_seed;
            cfg["level"] = sc.level;
            j["scenario"] = cfg;
            for (const auto& [name, est] : estimators) {
                json e;
                e["mean"] = est->mean;
                if (std::isnan(est->sd)) {
                    e["sd"] = nullptr;
                } else {
                    e["sd"] = est->sd;
                }
                json se = json::object();
                for (const auto& [v, val] : est->avg_se) se[v] = val;
                e["avg_se"] = se;
                json ivs = json::object();
                for (const auto& [v, st] : est->intervals) {
                    json one;
                    one["coverage"] = st.coverage;
                    one["avg_width"] = st.avg_width;
                    ivs[v] = one;
                }
                e["intervals"] = ivs;
                j[name] = e;
            }
            json fb = json::object();
            for (const auto& [name, count] : s.fallback_counts) fb[name] = count;
            j["fallbacks"] = fb;
            return j.dump(2) + "\n";
        }
        case OutputFormat::csv: {
            std::ostringstream out;
            out << "estimator,metric,variant,value\n";
            for (const auto& [name, est] : estimators) {
                out << name << ",mean,," << fmt_full(est->mean) << "\n";
                out << name << ",sd,," << (std::isnan(est->sd) ? "NA" : fmt_full(est->sd)) << "\n";
                for (const auto& [v, val] : est->avg_se) {
                    out << name << ",avg_se," << v << "," << fmt_full(val) << "\n";
                }
                for (const auto& [v, st] : est->intervals) {
                    out << name << ",coverage," << v << "," << fmt_full(st.coverage) << "\n";
                    out << name << ",avg_width," << v << "," << fmt_full(st.avg_width) << "\n";
                }
            }
            for (const auto& [name, count] : s.fallback_counts) {
                out << "fallback,count," << name << "," << count << "\n";
            }
            return out.str();
        }
        case OutputFormat::markdown: {
            std::ostringstream out;
            out << "| estimator | Mean (SD) [avg. SE] | CI coverage [avg. width] |\n";
            out << "|---|---|---|\n";
            for (const auto& [name, est] : estimators) {
                out << "| " << name << " | " << round1(est->mean) << " (" << round1(est->sd)
                    << ")";
                for (const auto& [v, val] : est->avg_se) out << " [" << round1(val) << "]";
                out << " | ";
                bool first = true;
                for (const auto& [v, st] : est->intervals) {
                    if (!first) out << "; ";
                    first = false;
                    out << v << " " << fmt3(st.coverage) << " [" << round1(st.avg_width) << "]";
                }
                out << " |\n";
            }
            out << "\nreplications: " << s.replications << "\n";
            bool any = false;
            for (const auto& [name, count] : s.fallback_counts) {
                if (count > 0) {
                    out << "fallbacks " << name << ": " << count << "\n";
                    any = true;
                }
            }
            if (!any) out << "fallbacks: none\n";
            return out.str();
        }
    }
    throw ValidationError("unknown output format");
}

}  // namespace anchorstream
