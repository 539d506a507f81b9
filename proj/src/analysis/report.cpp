#include "sdgame/analysis/report.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sdgame/equilibrium.hpp"
#include "sdgame/format.hpp"

namespace sdgame::analysis {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string alpha_label(double alpha) {
    const double pct = alpha * 100.0;
    const bool whole = std::fabs(pct - std::round(pct)) < 1e-9;
    return format_fixed(pct, whole ? 0 : 1) + "%";
}

std::optional<NodeRole> role_of(const std::string& position) {
    if (position == "all" || position == "--") return std::nullopt;
    return node_role_from_string(position);
}

using GroupFilter = std::function<bool(const Treatment&)>;

std::vector<GroupLevel> levels(const DecisionPanel& panel, Part part, RoundWindow window,
                               std::optional<NodeRole> role, const GroupFilter& keep) {
    auto all = aggregate_group_distancing(panel, part, window, role);
    std::erase_if(all, [&](const GroupLevel& g) { return !keep(g.treatment); });
    return all;
}

std::vector<double> values(const std::vector<GroupLevel>& v) {
    std::vector<double> out;
    for (const auto& g : v) out.push_back(g.value);
    return out;
}

class TableBuilder {
public:
    TableBuilder(const DecisionPanel& panel, const TableOptions& options) : panel_(panel), options_(options) {
        for (const auto& g : panel.groups) alphas_.insert(g.treatment.alpha);
    }

    std::vector<ReportRow> build() {
        const auto fine = [](const Treatment& t) { return t.intervention == Intervention::Fine; };
        const auto nudge = [](const Treatment& t) { return t.intervention == Intervention::Nudge; };

        treatment_rows(1, "Baseline", "Fine vs nudge", Alternative::TwoSided, [&](auto pos, auto alpha) {
            return unmatched(Part::Baseline, pos, both(fine, alpha), Part::Baseline, pos, both(nudge, alpha));
        });
        treatment_rows(2, "Intervention vs Baseline (fine)", "Fine: Intervention vs Baseline", Alternative::Greater,
                       [&](auto pos, auto alpha) { return matched_parts(pos, both(fine, alpha)); });
        treatment_rows(3, "Intervention vs Baseline (nudge)", "Nudge: Intervention vs Baseline", Alternative::Greater,
                       [&](auto pos, auto alpha) { return matched_parts(pos, both(nudge, alpha)); });
        treatment_rows(4, "Intervention", "Fine vs nudge", Alternative::Greater, [&](auto pos, auto alpha) {
            return unmatched(Part::Intervention, pos, both(fine, alpha), Part::Intervention, pos, both(nudge, alpha));
        });
        position_rows(5, "Baseline: position effect", Part::Baseline);
        position_rows(6, "Intervention: position effect", Part::Intervention);
        contagion_rows(7, "Baseline: contagion effect", Part::Baseline);
        contagion_rows(8, "Intervention: contagion effect", Part::Intervention);
        theory_rows(9, "Baseline: complete network vs theory", "complete", {"all"});
        theory_rows(10, "Baseline: star network vs theory", "star", {"superspreader", "peripheral"});
        return std::move(rows_);
    }

private:
    struct Samples {
        std::vector<double> first, second;
        bool paired = false;
    };

    static GroupFilter both(GroupFilter f, std::optional<double> alpha) {
        return [f, alpha](const Treatment& t) { return f(t) && (!alpha || t.alpha == *alpha); };
    }

    Samples unmatched(Part p1, const std::string& pos1, const GroupFilter& f1, Part p2, const std::string& pos2,
                      const GroupFilter& f2) const {
        return {values(levels(panel_, p1, options_.window, role_of(pos1), f1)),
                values(levels(panel_, p2, options_.window, role_of(pos2), f2)), false};
    }

    // Pairs group levels with the same group id.
    Samples matched(const std::vector<GroupLevel>& a, const std::vector<GroupLevel>& b) const {
        std::map<std::string, double> right;
        for (const auto& g : b) right[g.group] = g.value;
        Samples s;
        s.paired = true;
        for (const auto& g : a) {
            auto it = right.find(g.group);
            if (it == right.end()) continue;
            s.first.push_back(g.value);
            s.second.push_back(it->second);
        }
        return s;
    }

    Samples matched_parts(const std::string& pos, const GroupFilter& f) const {
        return matched(levels(panel_, Part::Intervention, options_.window, role_of(pos), f),
                       levels(panel_, Part::Baseline, options_.window, role_of(pos), f));
    }

    void add(int part_no, const std::string& title, const std::string& hypothesis, const std::string& contagion,
             const std::string& position, Alternative alt, Samples s) {
        ReportRow row;
        row.part_no = part_no;
        row.part_title = title;
        row.hypothesis = hypothesis;
        row.contagion = contagion;
        row.position = position;
        row.alternative = alt;
        row.test = s.paired ? (options_.parametric ? "PT" : "WSR") : (options_.parametric ? "UT" : "MW");
        row.n = s.first.size();
        row.n2 = s.second.size();
        if (s.first.empty() || s.second.empty()) {
            row.note = "no observations";
            rows_.push_back(std::move(row));
            return;
        }
        row.delta_mean = mean_of(s.first) - mean_of(s.second);
        row.delta_median = median_of(s.first) - median_of(s.second);
        try {
            if (options_.parametric)
                row.result = t_test(s.first, s.second, s.paired, alt);
            else if (s.paired)
                row.result = wilcoxon_signed_rank(s.first, s.second, alt);
            else
                row.result = mann_whitney_u(s.first, s.second, alt);
        } catch (const std::exception& e) {
            row.note = e.what();
        }
        rows_.push_back(std::move(row));
    }

    template <class Make>
    void treatment_rows(int part_no, const std::string& title, const std::string& hypothesis, Alternative alt,
                        Make make) {
        for (const char* pos : {"all", "close-knit", "superspreader", "peripheral"})
            add(part_no, title, hypothesis, "all", pos, alt, make(std::string(pos), std::optional<double>{}));
        for (double a : alphas_)
            add(part_no, title, hypothesis, alpha_label(a), "all", alt, make(std::string("all"), std::optional<double>{a}));
    }

    void position_rows(int part_no, const std::string& title, Part part) {
        const auto star = [](const Treatment& t) { return t.network == "star"; };
        const auto complete = [](const Treatment& t) { return t.network == "complete"; };
        std::vector<std::optional<double>> contagions = {std::nullopt};
        for (double a : alphas_) contagions.push_back(a);
        for (const auto& a : contagions) {
            const auto label = a ? alpha_label(*a) : "all";
            add(part_no, title, "Superspreader vs close-knit", label, "--", Alternative::Greater,
                unmatched(part, "superspreader", both(star, a), part, "close-knit", both(complete, a)));
        }
        for (const auto& a : contagions) {
            const auto label = a ? alpha_label(*a) : "all";
            add(part_no, title, "Close-knit vs peripheral", label, "--", Alternative::Greater,
                unmatched(part, "close-knit", both(complete, a), part, "peripheral", both(star, a)));
        }
        for (const auto& a : contagions) {
            const auto label = a ? alpha_label(*a) : "all";
            add(part_no, title, "Superspreader vs peripheral", label, "--", Alternative::Greater,
                matched(levels(panel_, part, options_.window, NodeRole::Superspreader, both(star, a)),
                        levels(panel_, part, options_.window, NodeRole::Peripheral, both(star, a))));
        }
    }

    void contagion_rows(int part_no, const std::string& title, Part part) {
        if (alphas_.size() < 2) return;
        const double low = *alphas_.begin(), high = *alphas_.rbegin();
        const auto hyp = alpha_label(high) + " vs " + alpha_label(low) + " rate of contagion";
        const auto at = [](double a) { return [a](const Treatment& t) { return t.alpha == a; }; };
        for (const char* pos : {"all", "close-knit", "superspreader", "peripheral"})
            add(part_no, title, hyp, "all", pos, Alternative::Greater, unmatched(part, pos, at(high), part, pos, at(low)));
    }

    // Predicted distancing share for a role under equilibrium or efficiency,
    // averaged over every predicted profile.
    std::optional<double> predicted(const std::string& network, std::size_t n, double alpha, const std::string& position,
                                    bool efficient) {
        const auto key = network + "/" + std::to_string(n) + "/" + format_double(alpha);
        auto it = solved_.find(key);
        if (it == solved_.end()) {
            const auto net = network_by_name(network, n);
            GameParams params;
            params.alpha = alpha;
            it = solved_.emplace(key, solve(net, params)).first;
        }
        const auto& rep = it->second;
        const auto& profiles = efficient ? rep.efficient : rep.equilibria;
        if (profiles.empty()) return std::nullopt;
        const auto role = role_of(position);
        double total = 0.0;
        for (const auto& p : profiles) {
            double yes = 0.0, count = 0.0;
            for (NodeId v = 0; v < p.size(); ++v) {
                if (role && node_role(rep.network, v) != *role) continue;
                count += 1.0;
                yes += p[v] ? 1.0 : 0.0;
            }
            total += count > 0 ? yes / count : 0.0;
        }
        return total / static_cast<double>(profiles.size());
    }

    void theory_rows(int part_no, const std::string& title, const std::string& network,
                     const std::vector<std::string>& positions) {
        for (bool efficient : {false, true}) {
            const std::string hyp = efficient ? "Actual vs efficient" : "Actual vs equilibrium";
            for (double a : alphas_) {
                const auto keep = [&](const Treatment& t) { return t.network == network && t.alpha == a; };
                std::size_t n = 0;
                for (const auto& g : panel_.groups)
                    if (keep(g.treatment)) n = g.subjects.size();
                if (n == 0) continue;
                for (const auto& pos : positions) {
                    Samples s;
                    s.first = values(levels(panel_, Part::Baseline, options_.window, role_of(pos), keep));
                    const auto level = predicted(network, n, a, pos, efficient);
                    if (!level) continue;
                    s.second.assign(s.first.size(), *level);
                    add(part_no, title, hyp, alpha_label(a), pos, Alternative::TwoSided, std::move(s));
                }
            }
        }
    }

    const DecisionPanel& panel_;
    TableOptions options_;
    std::set<double> alphas_;
    std::map<std::string, EquilibriumReport> solved_;
    std::vector<ReportRow> rows_;
};

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.resize(width, ' ');
    return s;
}

std::string fmt2(double x) {
    auto s = format_fixed(x, 2);
    return s == "-0.00" ? "0.00" : s;
}

std::string fmt_p(double p) {
    if (p < 0.0001) return "<.0001";
    return format_fixed(p, 4);
}

}  // namespace

std::string ReportRow::significance() const {
    if (!result) return "";
    if (result->p_value < 0.01) return "***";
    if (result->p_value < 0.05) return "**";
    if (result->p_value < 0.1) return "*";
    return "";
}

nlohmann::json ReportRow::to_json() const {
    nlohmann::json j = {{"part", part_no},
                        {"part_title", part_title},
                        {"hypothesis", hypothesis},
                        {"contagion", contagion},
                        {"position", position},
                        {"alternative", to_string(alternative)},
                        {"test", test},
                        {"n", n},
                        {"n2", n2},
                        {"delta_mean", delta_mean},
                        {"delta_median", delta_median},
                        {"significance", significance()}};
    if (result) {
        j["p_value"] = result->p_value;
        j["statistic"] = result->to_json().at("statistic");
        j["exact"] = result->exact;
    } else {
        j["p_value"] = nullptr;
        j["note"] = note;
    }
    return j;
}

std::vector<ReportRow> hypothesis_table(const DecisionPanel& panel, const TableOptions& options) {
    panel.validate();
    return TableBuilder(panel, options).build();
}

std::string render_table(const std::vector<ReportRow>& rows, const std::string& caption) {
    std::ostringstream os;
    os << caption << '\n';
    os << pad("Null hypothesis", 32) << pad("Contagion", 10) << pad("Position", 15) << pad("Alt", 10) << pad("Test", 5)
       << pad("n", 5) << pad("dMean", 8) << pad("dMedian", 9) << pad("p-val", 9) << "Sig\n";
    int part = -1;
    for (const auto& r : rows) {
        if (r.part_no != part) {
            part = r.part_no;
            os << "Part " << part << ". " << r.part_title << '\n';
        }
        os << pad(r.hypothesis, 32) << pad(r.contagion, 10) << pad(r.position, 15)
           << pad(r.alternative == Alternative::TwoSided ? "2-sided" : "1-sided", 10) << pad(r.test, 5)
           << pad(std::to_string(r.n), 5);
        if (r.n == 0 || r.n2 == 0) {
            os << r.note << '\n';
            continue;
        }
        os << pad(fmt2(r.delta_mean), 8) << pad(fmt2(r.delta_median), 9);
        if (r.result)
            os << pad(fmt_p(r.result->p_value), 9) << r.significance() << '\n';
        else
            os << "n/a (" << r.note << ")\n";
    }
    return os.str();
}

std::vector<BreakRow> break_table(const DecisionPanel& panel, const BreakOptions& options) {
    panel.validate();
    std::vector<std::pair<std::string, std::function<bool(const Treatment&)>>> subsets;
    subsets.emplace_back("all", [](const Treatment&) { return true; });
    std::set<std::string> networks;
    for (const auto& g : panel.groups) networks.insert(g.treatment.network);
    for (auto iv : {Intervention::Fine, Intervention::Nudge}) {
        subsets.emplace_back(to_string(iv), [iv](const Treatment& t) { return t.intervention == iv; });
        for (const auto& net : networks)
            subsets.emplace_back(net + "/" + to_string(iv),
                                 [iv, net](const Treatment& t) { return t.intervention == iv && t.network == net; });
    }
    std::vector<BreakRow> out;
    for (const auto& [label, keep] : subsets) {
        std::vector<std::size_t> idx;
        for (std::size_t g = 0; g < panel.groups.size(); ++g)
            if (keep(panel.groups[g].treatment)) idx.push_back(g);
        if (idx.empty()) continue;
        out.push_back({label, idx.size(), sup_wald_break(round_series(panel, idx), options)});
    }
    return out;
}

AnalysisReport analyze_panel(const DecisionPanel& panel, const AnalyzeOptions& options) {
    AnalysisReport r;
    r.groups = panel.groups.size();
    r.main = hypothesis_table(panel, {options.window, false});
    r.all_rounds = hypothesis_table(panel, {{1, panel.rounds_per_part}, false});
    r.parametric = hypothesis_table(panel, {options.window, true});
    r.breaks = break_table(panel, options.breaks);
    r.convergence = convergence_report(panel, options.k, options.a);
    return r;
}

nlohmann::json AnalysisReport::to_json() const {
    auto rows_json = [](const std::vector<ReportRow>& rows) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& r : rows) a.push_back(r.to_json());
        return a;
    };
    nlohmann::json breaks_json = nlohmann::json::array();
    for (const auto& b : breaks) {
        auto j = b.result.to_json();
        j["subset"] = b.subset;
        j["groups"] = b.groups;
        breaks_json.push_back(std::move(j));
    }
    return {{"groups", groups},
            {"hypothesis_tests", rows_json(main)},
            {"robustness_all_rounds", rows_json(all_rounds)},
            {"robustness_parametric", rows_json(parametric)},
            {"structural_breaks", breaks_json},
            {"convergence", convergence.to_json()}};
}

std::string AnalysisReport::to_text() const {
    std::ostringstream os;
    os << "Groups: " << groups << "\n\n";
    os << "Structural break (sup-Wald, intercept and slope)\n";
    os << pad("subset", 20) << pad("groups", 8) << pad("break", 7) << pad("Wald", 12) << "p-val\n";
    for (const auto& b : breaks) {
        const auto w = std::isfinite(b.result.statistic) ? format_fixed(b.result.statistic, 2) : std::string("inf");
        os << pad(b.subset, 20) << pad(std::to_string(b.groups), 8)
           << pad(b.result.break_round ? std::to_string(b.result.break_round) : "-", 7) << pad(w, 12)
           << format_fixed(b.result.p_value, 4) << '\n';
    }
    os << '\n' << render_table(main, "Group-level tests, last rounds of each part");
    os << '\n' << render_table(all_rounds, "Robustness: all rounds of each part");
    os << '\n' << render_table(parametric, "Robustness: parametric tests");
    os << '\n' << convergence.to_table();
    return os.str();
}

}  // namespace sdgame::analysis
