#include "sdgame/server/simulated_host.hpp"

#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>

#include "sdgame/server/protocol.hpp"

namespace sdgame::server {

namespace {

struct Pending {
    std::int64_t at = 0;
    std::uint64_t seq = 0;
    enum class Kind { Join, Rejoin, Submit, Disconnect, Timer } kind = Kind::Timer;
    std::size_t client = 0;
    int round = 0;
    std::uint64_t timer = 0;

    bool operator>(const Pending& o) const { return at != o.at ? at > o.at : seq > o.seq; }
};

struct ClientState {
    const ScriptedClient* script = nullptr;
    std::unique_ptr<Agent> agent;
    std::string token;
    std::optional<Network> network;
    std::vector<HistoryEntry> history;
    bool connected = false;
};

}  // namespace

HostRun run_simulated_session(const ServerOptions& options, const std::string& session_id, std::uint64_t seed,
                              const std::vector<ScriptedClient>& clients, std::uint64_t client_seed) {
    HostRun run;
    run.final_state = make_session(options, session_id, seed);
    SessionLog log;
    log.append(header_record(run.final_state));
    run.received.resize(clients.size());

    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
    std::uint64_t seq = 0;
    auto schedule = [&](Pending p) {
        p.seq = seq++;
        queue.push(p);
    };

    std::vector<ClientState> cs(clients.size());
    for (std::size_t i = 0; i < clients.size(); ++i) {
        cs[i].script = &clients[i];
        cs[i].agent = std::make_unique<Agent>(clients[i].policy, mix_seed(client_seed, i));
        schedule({clients[i].join_at_ms, 0, Pending::Kind::Join, i});
    }
    // Client ids start at 1; a rejoin keeps the id.
    auto id_of = [](std::size_t i) -> ClientId { return i + 1; };

    auto deliver = [&](std::int64_t now, const Outbound& out) {
        const auto i = static_cast<std::size_t>(out.client - 1);
        auto& c = cs.at(i);
        if (!c.connected) return;
        run.received[i].push_back(out.message);
        const auto type = out.message.at("type").get<std::string>();
        if (type == "group_formed") {
            c.token = out.message.at("participant_id").get<std::string>();
        } else if (type == "round_start") {
            const int round = out.message.at("round").get<int>();
            if (!c.network) c.network = network_from_json(out.message.at("network"));
            if (!out.message.at("decided").get<bool>() && !c.script->silent_rounds.count(round))
                schedule({now + c.script->think_ms, 0, Pending::Kind::Submit, i, round});
        } else if (type == "round_result") {
            c.history.clear();
            for (const auto& h : out.message.at("history")) {
                c.history.push_back({h.at("round").get<int>(), h.at("position").get<NodeId>(),
                                     decision_from_string(h.at("decision").get<std::string>()),
                                     h.at("infected").get<bool>(), h.at("points").get<double>()});
            }
            if (c.script->disconnect_after_round == out.message.at("round").get<int>())
                schedule({now, 0, Pending::Kind::Disconnect, i});
        }
    };

    // The round_start each client is answering; kept to build observations.
    std::map<std::size_t, nlohmann::json> last_start;

    auto apply = [&](std::int64_t now, Event ev) {
        auto t = advance(std::move(run.final_state), ev);
        run.final_state = std::move(t.state);
        for (auto& r : t.records) log.append(std::move(r));
        if (t.timer) schedule({t.timer->due_ms, 0, Pending::Kind::Timer, 0, 0, t.timer->id});
        for (const auto& m : t.messages) {
            if (m.message.at("type") == "round_start") last_start[static_cast<std::size_t>(m.client - 1)] = m.message;
            deliver(now, m);
        }
    };

    while (!queue.empty() && run.final_state.phase != Phase::Finished) {
        const auto p = queue.top();
        queue.pop();
        run.end_ms = p.at;
        switch (p.kind) {
            case Pending::Kind::Join: {
                cs[p.client].connected = true;
                apply(p.at, {p.at, ClientMessageEvent{id_of(p.client), encode(JoinMsg{clients[p.client].name, {}})}});
                break;
            }
            case Pending::Kind::Rejoin: {
                cs[p.client].connected = true;
                apply(p.at, {p.at, ClientMessageEvent{id_of(p.client),
                                                      encode(JoinMsg{clients[p.client].name, cs[p.client].token})}});
                break;
            }
            case Pending::Kind::Disconnect: {
                cs[p.client].connected = false;
                apply(p.at, {p.at, ClientDisconnectEvent{id_of(p.client)}});
                schedule({p.at + clients[p.client].reconnect_after_ms, 0, Pending::Kind::Rejoin, p.client});
                break;
            }
            case Pending::Kind::Submit: {
                auto& c = cs[p.client];
                if (!c.connected) break;
                const auto& start = last_start.at(p.client);
                Observation obs;
                obs.network = &*c.network;
                obs.position = start.at("position").get<NodeId>();
                obs.params = params_from_json(start.at("params"));
                obs.part = part_from_string(start.at("part").get<std::string>());
                obs.round = p.round;
                obs.history = c.history;
                Decision d = c.agent->decide(obs);
                apply(p.at, {p.at, ClientMessageEvent{id_of(p.client), encode(SubmitDecisionMsg{p.round, d})}});
                break;
            }
            case Pending::Kind::Timer: apply(p.at, {p.at, TimerEvent{p.timer}}); break;
        }
    }
    run.log_jsonl = log.to_jsonl();
    return run;
}

}  // namespace sdgame::server
