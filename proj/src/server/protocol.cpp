#include "sdgame/server/protocol.hpp"

#include "sdgame/format.hpp"

namespace sdgame::server {

ClientMessage parse_client_message(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        throw ProtocolError("message is not valid JSON");
    }
    if (!j.is_object()) throw ProtocolError("message must be a JSON object");
    const auto type_it = j.find("type");
    if (type_it == j.end() || !type_it->is_string()) throw ProtocolError("message has no string \"type\"");
    const auto type = type_it->get<std::string>();

    if (type == "join") {
        JoinMsg m;
        if (auto it = j.find("name"); it != j.end()) {
            if (!it->is_string()) throw ProtocolError("join: name must be a string");
            m.name = it->get<std::string>();
            if (m.name.size() > 64) throw ProtocolError("join: name longer than 64 characters");
        }
        if (auto it = j.find("participant_id"); it != j.end()) {
            if (!it->is_string()) throw ProtocolError("join: participant_id must be a string");
            m.participant_id = it->get<std::string>();
        }
        return m;
    }
    if (type == "submit_decision") {
        SubmitDecisionMsg m;
        const auto r = j.find("round");
        if (r == j.end() || !r->is_number_integer()) throw ProtocolError("submit_decision: integer round required");
        m.round = r->get<int>();
        const auto d = j.find("decision");
        if (d == j.end() || !d->is_string()) throw ProtocolError("submit_decision: decision required");
        const auto s = d->get<std::string>();
        if (s == "Yes")
            m.decision = Decision::Yes;
        else if (s == "No")
            m.decision = Decision::No;
        else
            throw ProtocolError("submit_decision: decision must be \"Yes\" or \"No\"");
        return m;
    }
    throw ProtocolError("unknown message type \"" + type + "\"");
}

std::string encode(const ClientMessage& m) {
    if (const auto* join = std::get_if<JoinMsg>(&m)) {
        nlohmann::json j{{"type", "join"}, {"name", join->name}};
        if (join->participant_id) j["participant_id"] = *join->participant_id;
        return j.dump();
    }
    const auto& s = std::get<SubmitDecisionMsg>(m);
    return nlohmann::json{{"type", "submit_decision"}, {"round", s.round}, {"decision", to_string(s.decision)}}.dump();
}

namespace msg {

nlohmann::json lobby_update(std::size_t waiting, std::size_t needed) {
    return {{"type", "lobby_update"}, {"waiting", waiting}, {"needed", needed}};
}

nlohmann::json group_formed(const std::string& session_id, const std::string& participant_id, std::size_t seat,
                            std::size_t group_size) {
    return {{"type", "group_formed"},
            {"session_id", session_id},
            {"participant_id", participant_id},
            {"seat", seat},
            {"group_size", group_size}};
}

nlohmann::json round_start(int round, Part part, const Network& net, NodeId position, const GameParams& params,
                           std::int64_t deadline_ms, bool already_decided) {
    return {{"type", "round_start"},
            {"round", round},
            {"part", to_string(part)},
            {"network", network_to_json(net)},
            {"position", position},
            {"label", net.label(position)},
            {"role", to_string(node_role(net, position))},
            {"params", params_to_json(params)},
            {"deadline_ms", deadline_ms},
            {"decided", already_decided}};
}

nlohmann::json decision_ack(int round, Decision d) {
    return {{"type", "decision_ack"}, {"ok", true}, {"round", round}, {"decision", to_string(d)}};
}

nlohmann::json decision_rejected(int round, const std::string& reason) {
    return {{"type", "decision_ack"}, {"ok", false}, {"round", round}, {"error", reason}};
}

nlohmann::json round_result(int round, Part part, Decision own, bool infected, double points,
                            const std::vector<HistoryEntry>& history, std::int64_t review_deadline_ms) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& h : history) {
        rows.push_back({{"round", h.round},
                        {"position", h.position},
                        {"decision", to_string(h.decision)},
                        {"infected", h.infected},
                        {"points", h.points}});
    }
    return {{"type", "round_result"}, {"round", round},     {"part", to_string(part)},
            {"decision", to_string(own)}, {"infected", infected}, {"points", points},
            {"history", rows},          {"deadline_ms", review_deadline_ms}};
}

nlohmann::json intervention_start(Intervention kind, double fine, std::int64_t deadline_ms) {
    nlohmann::json j{{"type", "intervention_start"}, {"kind", to_string(kind)}, {"deadline_ms", deadline_ms}};
    if (kind == Intervention::Fine) j["fine"] = fine;
    return j;
}

nlohmann::json disqualified(int round) { return {{"type", "disqualified"}, {"round", round}}; }

nlohmann::json session_end(const Payment& payment) {
    return {{"type", "session_end"},
            {"disqualified", payment.disqualified},
            {"drawn_rounds", {{"baseline", payment.drawn_rounds[0]}, {"intervention", payment.drawn_rounds[1]}}},
            {"drawn_points", {{"baseline", payment.drawn_points[0]}, {"intervention", payment.drawn_points[1]}}},
            {"bonus_cents", {{"baseline", payment.bonus_cents[0]}, {"intervention", payment.bonus_cents[1]}}},
            {"fee_cents", payment.fee_cents},
            {"total_cents", payment.total_cents},
            {"total", format_cents(payment.total_cents)}};
}

nlohmann::json error(const std::string& message) { return {{"type", "error"}, {"message", message}}; }

}  // namespace msg

}  // namespace sdgame::server
