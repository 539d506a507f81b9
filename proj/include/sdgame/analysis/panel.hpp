#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdgame/network.hpp"
#include "sdgame/round.hpp"
#include "sdgame/session_log.hpp"

namespace sdgame::analysis {

struct Treatment {
    std::string network;  // "complete", "star" or "custom"
    double alpha = 0.0;
    Intervention intervention = Intervention::Fine;

    bool operator==(const Treatment&) const = default;
};

struct Subject {
    std::size_t participant = 0;
    std::vector<bool> decisions;   // distanced, per round (timeouts count as No)
    std::vector<NodeRole> roles;   // role occupied, per round
};

struct Group {
    std::string id;
    Treatment treatment;
    std::vector<Subject> subjects;
};

// Per-subject decision matrix of a set of groups. Every subject carries
// 2 * rounds_per_part entries.
struct DecisionPanel {
    int rounds_per_part = 20;
    std::vector<Group> groups;

    void validate() const;  // throws std::invalid_argument

    // 1-based round of the session for round t (1-based) of `part`.
    static int absolute_round(Part part, int t, int rounds_per_part) {
        return (part == Part::Baseline ? 0 : rounds_per_part) + t;
    }

    void add_log(const SessionLog& log);
    static DecisionPanel from_logs(const std::vector<SessionLog>& logs);
    // Parses the decision CSV written by decision_csv(); rows may come
    // from several sessions concatenated (repeated header lines are skipped).
    static DecisionPanel from_csv(std::string_view text);
};

NodeRole node_role_from_string(const std::string& s);

struct RoundWindow {
    int first = 11;  // 1-based within the part
    int last = 20;
};

struct GroupLevel {
    std::string group;
    Treatment treatment;
    double value = 0.0;       // mean distancing
    std::size_t observations = 0;
};

// Mean distancing over subjects x rounds in the window of one part. With a
// role, only subject-rounds in that role count; groups with no such
// observation are omitted. Throws std::invalid_argument on an empty or
// out-of-range window.
std::vector<GroupLevel> aggregate_group_distancing(const DecisionPanel& panel, Part part, RoundWindow window,
                                                   std::optional<NodeRole> role = std::nullopt);

// Mean distancing per absolute round over every subject of the given groups.
std::vector<double> round_series(const DecisionPanel& panel, const std::vector<std::size_t>& group_indices);

}  // namespace sdgame::analysis
