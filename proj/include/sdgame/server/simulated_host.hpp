#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdgame/policy.hpp"
#include "sdgame/server/machine.hpp"

namespace sdgame::server {

// A client that speaks the wire protocol from a script: it joins at a
// given time and answers every round_start after `think_ms`, choosing with
// its own policy from what the messages tell it. Rounds in `silent_rounds`
// go unanswered.
struct ScriptedClient {
    std::string name;
    AgentPolicy policy = AgentPolicy::equilibrium();
    std::int64_t join_at_ms = 0;
    std::int64_t think_ms = 1'000;
    std::set<int> silent_rounds;
    // Drop the connection after this round's result and rejoin with the
    // seat token `reconnect_after_ms` later; 0 disables.
    int disconnect_after_round = 0;
    std::int64_t reconnect_after_ms = 2'000;
};

struct HostRun {
    SessionState final_state;
    std::string log_jsonl;
    std::vector<std::vector<nlohmann::json>> received;  // per scripted client
    std::int64_t end_ms = 0;
};

// Drives one session on a simulated clock; events at equal times are
// processed in scheduling order, so a run is a function of its arguments.
HostRun run_simulated_session(const ServerOptions& options, const std::string& session_id, std::uint64_t seed,
                              const std::vector<ScriptedClient>& clients, std::uint64_t client_seed);

}  // namespace sdgame::server
