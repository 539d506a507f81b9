#include "sdgame/analysis/panel.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

namespace sdgame::analysis {

NodeRole node_role_from_string(const std::string& s) {
    if (s == "close-knit") return NodeRole::CloseKnit;
    if (s == "superspreader") return NodeRole::Superspreader;
    if (s == "peripheral") return NodeRole::Peripheral;
    if (s == "other") return NodeRole::Other;
    throw std::invalid_argument("unknown role '" + s + "'");
}

void DecisionPanel::validate() const {
    if (rounds_per_part < 1) throw std::invalid_argument("rounds per part must be positive");
    const auto expected = static_cast<std::size_t>(2 * rounds_per_part);
    for (const auto& g : groups) {
        if (g.subjects.empty()) throw std::invalid_argument("group " + g.id + " has no subjects");
        for (const auto& s : g.subjects) {
            if (s.decisions.size() != expected || s.roles.size() != expected)
                throw std::invalid_argument("group " + g.id + ", participant " + std::to_string(s.participant) +
                                            ": expected " + std::to_string(expected) + " rounds, found " +
                                            std::to_string(s.decisions.size()));
        }
    }
}

void DecisionPanel::add_log(const SessionLog& log) {
    const auto config = log.config();
    const auto rounds = log.rounds();
    if (groups.empty()) rounds_per_part = config.protocol.rounds_per_part;
    if (config.protocol.rounds_per_part != rounds_per_part)
        throw std::invalid_argument("session " + config.session_id + " uses a different part length");

    Group g;
    g.id = config.session_id;
    g.treatment = {config.network.kind(), config.params.alpha, config.intervention};
    const auto n = config.network.node_count();
    g.subjects.resize(n);
    for (std::size_t k = 0; k < n; ++k) g.subjects[k].participant = k;
    for (const auto& o : rounds) {
        for (std::size_t k = 0; k < n; ++k) {
            g.subjects[k].decisions.push_back(distances(o.decisions[k]));
            g.subjects[k].roles.push_back(node_role(config.network, o.positions[k]));
        }
    }
    groups.push_back(std::move(g));
    validate();
}

DecisionPanel DecisionPanel::from_logs(const std::vector<SessionLog>& logs) {
    DecisionPanel panel;
    for (const auto& log : logs) panel.add_log(log);
    return panel;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

DecisionPanel DecisionPanel::from_csv(std::string_view text) {
    static const std::vector<std::string> header = {"session", "network", "alpha", "intervention", "participant",
                                                    "round", "part", "position", "role", "decision",
                                                    "timeout", "infected", "points"};
    struct Cell {
        bool distanced;
        NodeRole role;
    };
    // group -> participant -> round -> cell
    std::map<std::string, std::pair<Treatment, std::map<std::size_t, std::map<int, Cell>>>> rows;
    std::vector<std::string> order;
    int max_round = 0;

    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells == header) continue;
        auto bad = [&](const std::string& what) {
            return std::invalid_argument("decision CSV line " + std::to_string(line_no) + ": " + what);
        };
        if (cells.size() != header.size()) throw bad("expected 13 columns");
        try {
            Treatment t{cells[1], std::stod(cells[2]), intervention_from_string(cells[3])};
            const auto participant = static_cast<std::size_t>(std::stoul(cells[4]));
            const int round = std::stoi(cells[5]);
            if (round < 1) throw bad("round must be positive");
            if (cells[9] != "0" && cells[9] != "1") throw bad("decision must be 0 or 1");
            auto [it, inserted] = rows.try_emplace(cells[0]);
            if (inserted) {
                it->second.first = t;
                order.push_back(cells[0]);
            } else if (!(it->second.first == t)) {
                throw bad("treatment changes within session " + cells[0]);
            }
            auto& cell_map = it->second.second[participant];
            if (!cell_map.emplace(round, Cell{cells[9] == "1", node_role_from_string(cells[8])}).second)
                throw bad("duplicate row for participant " + cells[4] + " round " + cells[5]);
            max_round = std::max(max_round, round);
        } catch (const std::invalid_argument& e) {
            if (std::string_view(e.what()).starts_with("decision CSV")) throw;
            throw bad(e.what());
        } catch (const std::out_of_range& e) {
            throw bad(e.what());
        }
    }

    DecisionPanel panel;
    if (max_round % 2 != 0) throw std::invalid_argument("decision CSV: odd number of rounds");
    panel.rounds_per_part = std::max(1, max_round / 2);
    for (const auto& id : order) {
        const auto& [treatment, subjects] = rows.at(id);
        Group g{id, treatment, {}};
        for (const auto& [participant, cells] : subjects) {
            Subject s;
            s.participant = participant;
            int expect = 1;
            for (const auto& [round, cell] : cells) {
                if (round != expect++)
                    throw std::invalid_argument("decision CSV: session " + id + " participant " +
                                                std::to_string(participant) + " is missing round " +
                                                std::to_string(expect - 1));
                s.decisions.push_back(cell.distanced);
                s.roles.push_back(cell.role);
            }
            g.subjects.push_back(std::move(s));
        }
        panel.groups.push_back(std::move(g));
    }
    panel.validate();
    return panel;
}

std::vector<GroupLevel> aggregate_group_distancing(const DecisionPanel& panel, Part part, RoundWindow window,
                                                   std::optional<NodeRole> role) {
    if (window.first < 1 || window.last > panel.rounds_per_part || window.first > window.last)
        throw std::invalid_argument("round window must be a non-empty range within 1.." +
                                    std::to_string(panel.rounds_per_part));
    std::vector<GroupLevel> out;
    for (const auto& g : panel.groups) {
        std::size_t yes = 0, count = 0;
        for (const auto& s : g.subjects) {
            for (int t = window.first; t <= window.last; ++t) {
                const auto idx = static_cast<std::size_t>(DecisionPanel::absolute_round(part, t, panel.rounds_per_part) - 1);
                if (role && s.roles.at(idx) != *role) continue;
                ++count;
                yes += s.decisions.at(idx) ? 1 : 0;
            }
        }
        if (count == 0) continue;
        out.push_back({g.id, g.treatment, static_cast<double>(yes) / static_cast<double>(count), count});
    }
    return out;
}

std::vector<double> round_series(const DecisionPanel& panel, const std::vector<std::size_t>& group_indices) {
    const auto rounds = static_cast<std::size_t>(2 * panel.rounds_per_part);
    std::vector<double> yes(rounds, 0.0);
    std::size_t subjects = 0;
    for (auto gi : group_indices) {
        for (const auto& s : panel.groups.at(gi).subjects) {
            ++subjects;
            for (std::size_t t = 0; t < rounds; ++t) yes[t] += s.decisions.at(t) ? 1.0 : 0.0;
        }
    }
    if (subjects == 0) throw std::invalid_argument("no subjects selected for the round series");
    for (auto& v : yes) v /= static_cast<double>(subjects);
    return yes;
}

}  // namespace sdgame::analysis
