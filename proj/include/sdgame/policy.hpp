#pragma once

#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sdgame/game.hpp"
#include "sdgame/network.hpp"
#include "sdgame/rng.hpp"
#include "sdgame/round.hpp"

namespace sdgame {

enum class PolicyKind { AlwaysDistance, NeverDistance, StaticEquilibrium, LogitResponse };

// Which equilibrium a StaticEquilibrium agent coordinates on when several
// exist: lexicographically smallest or largest profile.
enum class EquilibriumSelection { LexSmallest, LexLargest };

struct AgentPolicy {
    PolicyKind kind = PolicyKind::NeverDistance;
    EquilibriumSelection selection = EquilibriumSelection::LexSmallest;
    // LogitResponse
    double precision = 0.0;  // lambda >= 0
    double risk = 1.0;       // r in (0, 1.5]; u(x) = (x + shift)^r
    double altruism = 0.0;   // w in [0, 1]
    double belief = 0.0;     // q in [0, 1]: believed distancing rate of others

    static AgentPolicy always() { return {PolicyKind::AlwaysDistance}; }
    static AgentPolicy never() { return {PolicyKind::NeverDistance}; }
    static AgentPolicy equilibrium(EquilibriumSelection s = EquilibriumSelection::LexSmallest) {
        AgentPolicy p{PolicyKind::StaticEquilibrium};
        p.selection = s;
        return p;
    }
    static AgentPolicy logit(double precision, double risk, double altruism, double belief);

    void validate() const;
    bool operator==(const AgentPolicy&) const = default;
};

std::string to_string(PolicyKind k);
PolicyKind policy_kind_from_string(const std::string& s);
nlohmann::json policy_to_json(const AgentPolicy& p);
AgentPolicy policy_from_json(const nlohmann::json& j);

struct HistoryEntry {
    int round = 0;
    NodeId position = 0;
    Decision decision = Decision::No;
    bool infected = false;
    double points = 0.0;

    bool operator==(const HistoryEntry&) const = default;
};

// What an agent may see: its own position and history, never the others'
// decisions.
struct Observation {
    const Network* network = nullptr;
    NodeId position = 0;
    GameParams params;  // parameters in force this round (fine included)
    Part part = Part::Baseline;
    int round = 0;
    std::span<const HistoryEntry> history;
};

// Logit utilities of distancing (d) and not distancing (n) under the
// policy's preference parameters, averaged over the belief about others.
struct LogitUtilities {
    double distance = 0.0;
    double stay = 0.0;
};
LogitUtilities logit_utilities(const AgentPolicy& policy, const Network& net, NodeId position,
                               const GameParams& params);

// Probability of choosing Yes.
double distance_probability(const AgentPolicy& policy, const Observation& obs);

// The equilibrium a StaticEquilibrium agent coordinates on. When no pure
// equilibrium exists every agent plays its best response to nobody
// distancing.
DistancingProfile selected_equilibrium(const Network& net, const GameParams& params, EquilibriumSelection sel);

// Yes or No; consumes exactly one uniform draw for LogitResponse and none
// otherwise. Throws std::invalid_argument on an unknown kind.
Decision policy_decide(const AgentPolicy& policy, const Observation& obs, Rng& rng);

// A policy with its own random stream and a memo of the expensive
// per-(position, parameters) quantities.
class Agent {
public:
    Agent(AgentPolicy policy, std::uint64_t stream_seed) : policy_(policy), rng_(stream_seed) {}

    Decision decide(const Observation& obs);
    const AgentPolicy& policy() const { return policy_; }

private:
    AgentPolicy policy_;
    Rng rng_;
    std::map<std::tuple<NodeId, double, double>, double> memo_;
};

}  // namespace sdgame
