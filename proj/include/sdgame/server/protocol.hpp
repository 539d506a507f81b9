#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdgame/game.hpp"
#include "sdgame/network.hpp"
#include "sdgame/policy.hpp"
#include "sdgame/round.hpp"
#include "sdgame/session_log.hpp"

// Wire protocol: one JSON object per websocket text frame, discriminated by
// its "type" field. See docs/protocol.md.
namespace sdgame::server {

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Client -> server.
struct JoinMsg {
    std::string name;
    std::optional<std::string> participant_id;  // set to reclaim a seat
    bool operator==(const JoinMsg&) const = default;
};

struct SubmitDecisionMsg {
    int round = 0;
    Decision decision = Decision::No;  // Yes or No only
    bool operator==(const SubmitDecisionMsg&) const = default;
};

using ClientMessage = std::variant<JoinMsg, SubmitDecisionMsg>;

// Throws ProtocolError on anything that is not a well-formed client message.
ClientMessage parse_client_message(std::string_view text);
std::string encode(const ClientMessage& m);

// Server -> client. Each builder returns the JSON object sent as one frame.
namespace msg {
nlohmann::json lobby_update(std::size_t waiting, std::size_t needed);
nlohmann::json group_formed(const std::string& session_id, const std::string& participant_id, std::size_t seat,
                            std::size_t group_size);
nlohmann::json round_start(int round, Part part, const Network& net, NodeId position, const GameParams& params,
                           std::int64_t deadline_ms, bool already_decided);
nlohmann::json decision_ack(int round, Decision d);
nlohmann::json decision_rejected(int round, const std::string& reason);
nlohmann::json round_result(int round, Part part, Decision own, bool infected, double points,
                            const std::vector<HistoryEntry>& history, std::int64_t review_deadline_ms);
nlohmann::json intervention_start(Intervention kind, double fine, std::int64_t deadline_ms);
nlohmann::json disqualified(int round);
nlohmann::json session_end(const Payment& payment);
nlohmann::json error(const std::string& message);
}  // namespace msg

// Server message types; every outbound frame carries one of these.
inline const std::vector<std::string> kServerMessageTypes = {
    "lobby_update", "group_formed",  "round_start", "decision_ack", "round_result",
    "intervention_start", "disqualified", "session_end", "error"};

}  // namespace sdgame::server
