#include "sdgame/analysis/convergence.hpp"

#include <algorithm>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sdgame/format.hpp"

namespace sdgame::analysis {

std::string to_string(Pattern p) {
    switch (p) {
        case Pattern::Constant: return "constant";
        case Pattern::Complement: return "complement";
        case Pattern::Alternating: return "alternating";
    }
    return "constant";
}

Pattern pattern_from_string(const std::string& s) {
    if (s == "constant") return Pattern::Constant;
    if (s == "complement") return Pattern::Complement;
    if (s == "alternating") return Pattern::Alternating;
    throw std::invalid_argument("unknown pattern '" + s + "'");
}

nlohmann::json ConvergenceResult::to_json() const {
    nlohmann::json j = {{"converged", converged}, {"round", round}};
    if (pattern) {
        j["pattern"] = to_string(*pattern);
        j["action"] = action ? "Yes" : "No";
        if (*pattern == Pattern::Alternating) j["phase"] = phase ? "Yes" : "No";
    } else {
        j["pattern"] = nullptr;
    }
    return j;
}

namespace {

struct Strategy {
    Pattern pattern;
    bool action;
    int phase;
};

std::vector<bool> prescribed(const Strategy& s, std::span<const NodeRole> roles) {
    std::vector<bool> out(roles.size());
    int peripheral_seen = 0;
    for (std::size_t t = 0; t < roles.size(); ++t) {
        const bool hub = roles[t] == NodeRole::Superspreader;
        switch (s.pattern) {
            case Pattern::Constant: out[t] = s.action; break;
            case Pattern::Complement: out[t] = hub ? s.action : !s.action; break;
            case Pattern::Alternating:
                out[t] = hub ? s.action : ((s.phase + peripheral_seen++) % 2 == 1);
                break;
        }
    }
    return out;
}

// Earliest qualifying round (1-based) or 0.
int convergence_round(const std::vector<bool>& conform, int k, int a) {
    const int T = static_cast<int>(conform.size());
    // tail[n] = longest run of deviations within rounds n+1..T.
    std::vector<int> tail(static_cast<std::size_t>(T) + 1, 0);
    int run = 0, longest = 0;
    for (int t = T; t >= 1; --t) {
        tail[static_cast<std::size_t>(t)] = longest;
        run = conform[static_cast<std::size_t>(t - 1)] ? 0 : run + 1;
        longest = std::max(longest, run);
    }
    int streak = 0;
    for (int n = 1; n <= T; ++n) {
        streak = conform[static_cast<std::size_t>(n - 1)] ? streak + 1 : 0;
        if (n >= k && streak >= k && tail[static_cast<std::size_t>(n)] <= a) return n;
    }
    return 0;
}

}  // namespace

ConvergenceResult detect_convergence(std::span<const bool> decisions, std::span<const NodeRole> roles, int k, int a,
                                     const std::vector<Pattern>& patterns) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (a < 0) throw std::invalid_argument("a must be non-negative");
    if (decisions.size() != roles.size()) throw std::invalid_argument("one role per decision required");
    const bool star = !roles.empty() && std::all_of(roles.begin(), roles.end(), [](NodeRole r) {
        return r == NodeRole::Superspreader || r == NodeRole::Peripheral;
    });

    std::vector<Strategy> candidates;
    for (auto p : kAllPatterns) {
        if (std::find(patterns.begin(), patterns.end(), p) == patterns.end()) continue;
        if (p != Pattern::Constant && !star) continue;
        for (bool action : {true, false}) {
            if (p == Pattern::Alternating) {
                for (int phase : {1, 0}) candidates.push_back({p, action, phase});
            } else {
                candidates.push_back({p, action, 0});
            }
        }
    }

    ConvergenceResult best;
    for (const auto& s : candidates) {
        const auto want = prescribed(s, roles);
        std::vector<bool> conform(decisions.size());
        for (std::size_t t = 0; t < decisions.size(); ++t) conform[t] = decisions[t] == want[t];
        const int n = convergence_round(conform, k, a);
        if (n == 0) continue;
        // Candidates are visited in priority order, so only a strictly
        // earlier round replaces the incumbent.
        if (!best.converged || n < best.round) {
            best = {true, n, s.pattern, s.action, s.phase};
        }
    }
    return best;
}

std::vector<double> convergence_share_by_round(const std::vector<ConvergenceResult>& results, int rounds) {
    std::vector<double> share(static_cast<std::size_t>(std::max(rounds, 0)), 0.0);
    if (results.empty()) return share;
    for (int t = 1; t <= rounds; ++t) {
        const auto c = std::count_if(results.begin(), results.end(),
                                     [t](const ConvergenceResult& r) { return r.converged && r.round <= t; });
        share[static_cast<std::size_t>(t - 1)] = static_cast<double>(c) / static_cast<double>(results.size());
    }
    return share;
}

namespace {

ConvergenceRow make_row(const DecisionPanel& panel, const ConvergenceReport& report, Part part,
                        const std::string& network, const std::string& intervention) {
    ConvergenceRow row{part, network, intervention, 0, std::nullopt, 0.0, {}};
    std::vector<ConvergenceResult> pool;
    for (std::size_t g = 0; g < panel.groups.size(); ++g) {
        const auto& t = panel.groups[g].treatment;
        if (network != "all" && t.network != network) continue;
        if (intervention != "all" && to_string(t.intervention) != intervention) continue;
        for (const auto& subject : report.subjects[g]) pool.push_back(subject[part == Part::Baseline ? 0 : 1]);
    }
    row.n = pool.size();
    row.share_by_round = convergence_share_by_round(pool, panel.rounds_per_part);
    for (std::size_t t = 0; t < row.share_by_round.size(); ++t) {
        if (row.share_by_round[t] > 0.8) {
            row.round_over_80 = static_cast<int>(t) + 1;
            break;
        }
    }
    if (!row.share_by_round.empty()) {
        const auto idx = std::min<std::size_t>(10, row.share_by_round.size() - 1);
        row.percent_by_11 = 100.0 * row.share_by_round[idx];
    }
    return row;
}

}  // namespace

ConvergenceReport convergence_report(const DecisionPanel& panel, int k, int a) {
    panel.validate();
    ConvergenceReport report;
    report.k = k;
    report.a = a;
    const auto rpp = static_cast<std::size_t>(panel.rounds_per_part);
    for (const auto& g : panel.groups) {
        std::vector<std::array<ConvergenceResult, 2>> per_subject;
        for (const auto& s : g.subjects) {
            std::array<ConvergenceResult, 2> both;
            for (std::size_t p = 0; p < 2; ++p) {
                const auto first = p * rpp;
                // vector<bool> is not contiguous; copy the part out.
                auto dec = std::make_unique<bool[]>(rpp);
                for (std::size_t t = 0; t < rpp; ++t) dec[t] = s.decisions[first + t];
                both[p] = detect_convergence(std::span<const bool>(dec.get(), rpp),
                                             std::span<const NodeRole>(s.roles).subspan(first, rpp), k, a);
            }
            per_subject.push_back(both);
        }
        report.subjects.push_back(std::move(per_subject));
    }

    // Row layout of the convergence summary table.
    for (const auto& [net, iv] : std::vector<std::pair<std::string, std::string>>{
             {"all", "all"}, {"complete", "all"}, {"star", "all"}})
        report.rows.push_back(make_row(panel, report, Part::Baseline, net, iv));
    for (const auto& [net, iv] : std::vector<std::pair<std::string, std::string>>{{"all", "all"},
                                                                                 {"complete", "all"},
                                                                                 {"star", "all"},
                                                                                 {"all", "fine"},
                                                                                 {"all", "nudge"},
                                                                                 {"complete", "fine"},
                                                                                 {"complete", "nudge"},
                                                                                 {"star", "fine"},
                                                                                 {"star", "nudge"}})
        report.rows.push_back(make_row(panel, report, Part::Intervention, net, iv));
    return report;
}

nlohmann::json ConvergenceReport::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows) {
        rows_json.push_back({{"part", to_string(r.part)},
                             {"network", r.network},
                             {"intervention", r.intervention},
                             {"n", r.n},
                             {"round_over_80", r.round_over_80 ? nlohmann::json(*r.round_over_80) : nlohmann::json(nullptr)},
                             {"percent_by_round_11", r.percent_by_11},
                             {"share_by_round", r.share_by_round}});
    }
    return {{"k", k}, {"a", a}, {"rows", rows_json}};
}

std::string ConvergenceReport::to_table() const {
    std::ostringstream os;
    os << "Convergence (k=" << k << ", a=" << a << ")\n";
    os << "network   intervention  n     >80% by round  % by round 11\n";
    std::optional<Part> current;
    for (const auto& r : rows) {
        if (r.n == 0) continue;
        if (current != r.part) {
            os << (r.part == Part::Baseline ? "Baseline\n" : "Intervention\n");
            current = r.part;
        }
        std::string line = r.network;
        line.resize(10, ' ');
        std::string iv = r.intervention;
        iv.resize(14, ' ');
        std::string n = std::to_string(r.n);
        n.resize(6, ' ');
        std::string over = r.round_over_80 ? std::to_string(*r.round_over_80) : "-";
        over.resize(15, ' ');
        os << line << iv << n << over << format_fixed(r.percent_by_11, 2) << '\n';
    }
    return os.str();
}

}  // namespace sdgame::analysis
