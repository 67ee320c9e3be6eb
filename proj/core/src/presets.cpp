#include "anchorstream/presets.hpp"

#include <cmath>
#include <map>

namespace anchorstream {

namespace {

std::string trim_number(double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

SimScenario base_scenario(std::int64_t n_tot, std::int64_t n_true, std::int64_t anchor) {
    SimScenario sc;
    sc.n_tot = n_tot;
    sc.n_true = n_true;
    sc.anchor_size = anchor;
    sc.replications = 10000;
    sc.credible_draws = 10000;
    sc.master_seed = 1;
    return sc;
}

const std::map<std::string, SimScenario>& table() {
    static const std::map<std::string, SimScenario> presets = [] {
        std::map<std::string, SimScenario> m;
        const double psis[] = {0.1, 0.25, 0.5};

        struct Family {
            const char* prefix;
            std::int64_t n_tot;
            std::initializer_list<std::int64_t> cases;
        };
        const Family families[] = {
            {"t5", 10000, {500, 1000, 2500, 5000}},
            {"t6", 1000, {50, 100, 250, 500}},
            {"b1", 250, {13, 25, 63, 125}},
            {"b2", 500, {25, 50, 125, 250}},
        };
        for (const Family& f : families) {
            for (std::int64_t n_true : f.cases) {
                for (double psi : psis) {
                    const auto anchor = static_cast<std::int64_t>(
                        std::llround(static_cast<double>(f.n_tot) * psi));
                    const std::string name = std::string(f.prefix) + "/N" +
                                             std::to_string(n_true) + "/psi" + trim_number(psi);
                    m.emplace(name, base_scenario(f.n_tot, n_true, anchor));
                }
            }
        }

        const double p_symps[] = {0.25, 0.5, 0.75, 0.9};
        const double p_s1s[] = {0.5, 0.75, 0.9};
        for (double p_symp : p_symps) {
            for (double p_s1 : p_s1s) {
                SimScenario sc = base_scenario(1029, 156, 200);
                sc.p_symp_case = p_symp;
                sc.p_s1_symp = p_s1;
                const std::string name =
                    "b3/psymp" + trim_number(p_symp) + "/p1symp" + trim_number(p_s1);
                m.emplace(name, sc);
            }
        }
        return m;
    }();
    return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    names.reserve(table().size());
    for (const auto& [name, sc] : table()) names.push_back(name);
    return names;
}

bool is_preset(const std::string& name) { return table().count(name) != 0; }

SimScenario preset_scenario(const std::string& name) {
    auto it = table().find(name);
    if (it == table().end()) throw ValidationError("unknown preset: " + name);
    return it->second;
}

}  // namespace anchorstream
