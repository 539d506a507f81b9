#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdgame/policy.hpp"
#include "sdgame/session.hpp"
#include "sdgame/session_log.hpp"

namespace sdgame::server {

using ClientId = std::uint64_t;

// Settings shared by every session a server runs.
struct ServerOptions {
    SessionConfig session;                          // treatment template
    AgentPolicy bot_policy = AgentPolicy::equilibrium();
    bool bot_fill = true;                           // fill empty seats after the lobby wait
    std::int64_t lobby_wait_ms = 60'000;
    std::uint64_t seed = 1;                         // base seed; each session derives its own

    void validate() const;  // throws std::invalid_argument
};

nlohmann::json options_to_json(const ServerOptions& o);
// Accepts {"session": {...}, "bot_policy": {...}, ...}; a bare session
// config is accepted as well. Throws std::invalid_argument.
ServerOptions options_from_json(const nlohmann::json& j);

// Seed and id of the i-th session (0-based) a server opens.
std::uint64_t session_seed(std::uint64_t base_seed, std::size_t index);
std::string session_id(const std::string& prefix, std::size_t index);

enum class Phase { Lobby, Instructions, RoundDecision, RoundResolve, RoundReview, InterventionBriefing, Finished };
std::string to_string(Phase p);

struct Seat {
    bool bot = false;
    bool replaced = false;  // disqualified human now played by a NeverDistance bot
    std::string name;
    std::string token;      // lets a human reclaim the seat after a reconnect
    std::optional<ClientId> client;
    AgentPolicy policy;     // bots and replacements
};

struct SessionState {
    ServerOptions options;
    SessionConfig config;
    std::uint64_t seed = 0;
    Phase phase = Phase::Lobby;
    GroupSession core{SessionConfig{}, 0};
    std::vector<Seat> seats;
    std::vector<std::optional<Agent>> agents;        // per seat, for automated seats
    std::vector<std::optional<Decision>> pending;     // decisions of the open round
    std::uint64_t timer = 0;                          // id of the armed timer, 0 if none
    std::uint64_t next_timer = 1;
    std::int64_t deadline_ms = 0;
    std::vector<Payment> payments;

    std::size_t group_size() const { return config.network.node_count(); }
    bool accepting_joins() const { return phase == Phase::Lobby && seats.size() < group_size(); }
    std::optional<std::size_t> seat_of(ClientId c) const;
    std::optional<std::size_t> seat_with_token(const std::string& token) const;
};

struct ClientMessageEvent {
    ClientId client = 0;
    std::string text;
};
struct ClientDisconnectEvent {
    ClientId client = 0;
};
struct TimerEvent {
    std::uint64_t timer = 0;
};

struct Event {
    std::int64_t now_ms = 0;
    std::variant<ClientMessageEvent, ClientDisconnectEvent, TimerEvent> body;
};

struct Outbound {
    ClientId client = 0;
    nlohmann::json message;
};

struct TimerRequest {
    std::uint64_t id = 0;
    std::int64_t due_ms = 0;
};

struct Transition {
    SessionState state;
    std::vector<nlohmann::json> records;  // append to the log before sending
    std::vector<Outbound> messages;
    std::optional<TimerRequest> timer;    // replaces any armed timer
};

// New session in the lobby; the log starts with `header_record(state)`.
SessionState make_session(const ServerOptions& options, const std::string& session_id, std::uint64_t seed);
nlohmann::json header_record(const SessionState& s);

// The whole protocol as a pure transition. Malformed client messages get
// an error reply and leave the state unchanged. Timer events whose id is not
// the armed timer are ignored.
Transition advance(SessionState state, const Event& event);

}  // namespace sdgame::server
