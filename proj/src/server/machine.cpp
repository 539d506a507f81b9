#include "sdgame/server/machine.hpp"

#include <cstdio>
#include <set>

#include "sdgame/server/protocol.hpp"

namespace sdgame::server {

void ServerOptions::validate() const {
    session.validate();
    bot_policy.validate();
    if (lobby_wait_ms < 0) throw std::invalid_argument("lobby wait must be non-negative");
}

nlohmann::json options_to_json(const ServerOptions& o) {
    return {{"session", config_to_json(o.session)},
            {"bot_policy", policy_to_json(o.bot_policy)},
            {"bot_fill", o.bot_fill},
            {"lobby_wait_ms", o.lobby_wait_ms},
            {"seed", o.seed}};
}

ServerOptions options_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("server options must be a JSON object");
    ServerOptions o;
    try {
        o.session = config_from_json(j.contains("session") ? j.at("session") : j);
        if (j.contains("bot_policy")) o.bot_policy = policy_from_json(j.at("bot_policy"));
        o.bot_fill = j.value("bot_fill", o.bot_fill);
        o.lobby_wait_ms = j.value("lobby_wait_ms", o.lobby_wait_ms);
        o.seed = j.value("seed", o.seed);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("invalid server options: ") + e.what());
    }
    o.validate();
    return o;
}

std::uint64_t session_seed(std::uint64_t base_seed, std::size_t index) { return mix_seed(base_seed, 0x5E55 + index); }

std::string session_id(const std::string& prefix, std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", index + 1);
    return prefix + "-" + buf;
}

std::string to_string(Phase p) {
    switch (p) {
        case Phase::Lobby: return "lobby";
        case Phase::Instructions: return "instructions";
        case Phase::RoundDecision: return "round_decision";
        case Phase::RoundResolve: return "round_resolve";
        case Phase::RoundReview: return "round_review";
        case Phase::InterventionBriefing: return "intervention_briefing";
        case Phase::Finished: return "finished";
    }
    return "lobby";
}

std::optional<std::size_t> SessionState::seat_of(ClientId c) const {
    for (std::size_t k = 0; k < seats.size(); ++k)
        if (seats[k].client == c) return k;
    return std::nullopt;
}

std::optional<std::size_t> SessionState::seat_with_token(const std::string& token) const {
    for (std::size_t k = 0; k < seats.size(); ++k)
        if (!seats[k].bot && seats[k].token == token) return k;
    return std::nullopt;
}

SessionState make_session(const ServerOptions& options, const std::string& id, std::uint64_t seed) {
    options.validate();
    SessionState s;
    s.options = options;
    s.config = options.session;
    s.config.session_id = id;
    s.seed = seed;
    s.core = GroupSession(s.config, seed);
    s.agents.resize(s.group_size());
    s.pending.resize(s.group_size());
    return s;
}

nlohmann::json header_record(const SessionState& s) { return SessionLog(s.config, s.seed).header(); }

namespace {

std::string seat_token(std::uint64_t seed, std::size_t seat) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(mix_seed(seed, 0x5EA7 + seat)));
    return buf;
}

// Mutable working copy of one transition.
class Step {
public:
    Step(SessionState state, std::int64_t now) : t_{std::move(state), {}, {}, std::nullopt}, now_(now) {}

    Transition finish() && { return std::move(t_); }
    SessionState& s() { return t_.state; }

    void log(nlohmann::json record) { t_.records.push_back(std::move(record)); }
    void send(ClientId c, nlohmann::json m) { t_.messages.push_back({c, std::move(m)}); }
    void send_seat(std::size_t k, nlohmann::json m) {
        if (auto c = s().seats[k].client) send(*c, std::move(m));
    }
    void arm(std::int64_t delay_ms) {
        auto& st = s();
        st.timer = st.next_timer++;
        st.deadline_ms = now_ + delay_ms;
        t_.timer = TimerRequest{st.timer, st.deadline_ms};
    }
    void disarm() {
        s().timer = 0;
        s().deadline_ms = 0;
    }

    void on_message(ClientId client, const std::string& text) {
        ClientMessage m;
        try {
            m = parse_client_message(text);
        } catch (const ProtocolError& e) {
            send(client, msg::error(e.what()));
            return;
        }
        if (auto* join = std::get_if<JoinMsg>(&m))
            on_join(client, *join);
        else
            on_submit(client, std::get<SubmitDecisionMsg>(m));
    }

    void on_disconnect(ClientId client) {
        if (auto k = s().seat_of(client)) s().seats[*k].client.reset();
    }

    void on_timer(std::uint64_t id) {
        if (id == 0 || id != s().timer) return;
        disarm();
        switch (s().phase) {
            case Phase::Lobby: fill_with_bots(); break;
            case Phase::Instructions: start_round(); break;
            case Phase::RoundDecision: resolve(); break;
            case Phase::RoundReview: after_review(); break;
            case Phase::InterventionBriefing: start_round(); break;
            case Phase::RoundResolve:
            case Phase::Finished: break;
        }
    }

private:
    void on_join(ClientId client, const JoinMsg& join) {
        auto& st = s();
        if (st.seat_of(client)) {
            send(client, msg::error("already joined"));
            return;
        }
        if (join.participant_id) {
            auto k = st.seat_with_token(*join.participant_id);
            if (!k) {
                send(client, msg::error("unknown participant id"));
                return;
            }
            st.seats[*k].client = client;
            resync(*k);
            return;
        }
        if (!st.accepting_joins()) {
            send(client, msg::error("session is not accepting participants"));
            return;
        }
        const auto k = st.seats.size();
        Seat seat;
        seat.name = join.name.empty() ? "participant-" + std::to_string(k) : join.name;
        seat.token = seat_token(st.seed, k);
        seat.client = client;
        st.seats.push_back(seat);
        log(records::join({k, false, seat.name, {}}));
        if (k == 0 && st.options.bot_fill) arm(st.options.lobby_wait_ms);
        if (st.seats.size() == st.group_size()) {
            form_group();
        } else {
            for (std::size_t j = 0; j < st.seats.size(); ++j)
                send_seat(j, msg::lobby_update(st.seats.size(), st.group_size()));
        }
    }

    // A reconnecting human gets the group and, mid-decision, the open round.
    void resync(std::size_t k) {
        auto& st = s();
        if (st.phase == Phase::Lobby) {
            send_seat(k, msg::lobby_update(st.seats.size(), st.group_size()));
            return;
        }
        send_seat(k, msg::group_formed(st.config.session_id, st.seats[k].token, k, st.group_size()));
        if (st.phase == Phase::RoundDecision) send_round_start(k);
        if (st.phase == Phase::Finished && k < st.payments.size()) send_seat(k, msg::session_end(st.payments[k]));
    }

    void on_submit(ClientId client, const SubmitDecisionMsg& m) {
        auto& st = s();
        const auto k = st.seat_of(client);
        if (!k) {
            send(client, msg::decision_rejected(m.round, "not seated in this session"));
            return;
        }
        if (st.phase != Phase::RoundDecision) {
            send(client, msg::decision_rejected(m.round, "no decision is open"));
            return;
        }
        if (m.round != st.core.round()) {
            send(client, msg::decision_rejected(m.round, "round " + std::to_string(st.core.round()) + " is open"));
            return;
        }
        if (st.seats[*k].replaced) {
            send(client, msg::decision_rejected(m.round, "disqualified"));
            return;
        }
        if (st.pending[*k]) {
            send(client, msg::decision_rejected(m.round, "decision already recorded"));
            return;
        }
        st.pending[*k] = m.decision;
        log(records::decision(m.round, *k, m.decision));
        send(client, msg::decision_ack(m.round, m.decision));
        if (all_decided()) resolve();
    }

    bool all_decided() const {
        const auto& st = t_.state;
        for (const auto& d : st.pending)
            if (!d) return false;
        return true;
    }

    void fill_with_bots() {
        auto& st = s();
        while (st.seats.size() < st.group_size()) {
            const auto k = st.seats.size();
            Seat seat;
            seat.bot = true;
            seat.name = "bot-" + std::to_string(k);
            seat.policy = st.options.bot_policy;
            st.seats.push_back(seat);
            log(records::join({k, true, seat.name, seat.policy}));
        }
        form_group();
    }

    void form_group() {
        auto& st = s();
        disarm();
        for (std::size_t k = 0; k < st.seats.size(); ++k)
            if (st.seats[k].bot) st.agents[k].emplace(st.seats[k].policy, mix_seed(st.seed, bot_stream(k)));
        log(records::group_formed(st.group_size()));
        for (std::size_t k = 0; k < st.seats.size(); ++k)
            send_seat(k, msg::group_formed(st.config.session_id, st.seats[k].token, k, st.group_size()));
        if (st.config.protocol.instructions_ms > 0) {
            st.phase = Phase::Instructions;
            arm(st.config.protocol.instructions_ms);
        } else {
            start_round();
        }
    }

    void send_round_start(std::size_t k) {
        const auto& st = t_.state;
        send_seat(k, msg::round_start(st.core.round(), st.core.part(), st.config.network, st.core.positions()[k],
                                      st.config.params_for(st.core.part()), st.deadline_ms, st.pending[k].has_value()));
    }

    void start_round() {
        auto& st = s();
        if (st.core.round() == 0) log(records::part_start(Part::Baseline));
        const auto& positions = st.core.begin_round();
        const int round = st.core.round();
        log(records::round_start(round, st.core.part(), positions));
        std::fill(st.pending.begin(), st.pending.end(), std::nullopt);
        for (std::size_t k = 0; k < st.seats.size(); ++k) {
            if (!st.agents[k]) continue;
            const auto d = st.agents[k]->decide(st.core.observation(k));
            st.pending[k] = d;
            log(records::decision(round, k, d));
        }
        st.phase = Phase::RoundDecision;
        arm(st.config.protocol.decision_ms);
        for (std::size_t k = 0; k < st.seats.size(); ++k)
            if (!st.agents[k]) send_round_start(k);
        if (all_decided()) resolve();
    }

    void resolve() {
        auto& st = s();
        st.phase = Phase::RoundResolve;
        disarm();
        const int round = st.core.round();
        std::vector<Decision> decisions(st.group_size());
        for (std::size_t k = 0; k < decisions.size(); ++k) {
            if (!st.pending[k]) {
                st.pending[k] = Decision::Timeout;
                log(records::decision(round, k, Decision::Timeout));
            }
            decisions[k] = *st.pending[k];
        }
        const auto res = st.core.resolve_round(decisions);
        log(records::round_outcome(res.outcome));
        for (auto k : res.newly_disqualified) {
            log(records::disqualified(round, k));
            st.seats[k].replaced = true;
            st.seats[k].policy = AgentPolicy::never();
            st.agents[k].emplace(AgentPolicy::never(), mix_seed(st.seed, bot_stream(k)));
        }
        st.phase = Phase::RoundReview;
        arm(st.config.protocol.review_ms);
        const std::set<std::size_t> newly(res.newly_disqualified.begin(), res.newly_disqualified.end());
        for (std::size_t k = 0; k < st.seats.size(); ++k) {
            if (st.seats[k].bot || (st.seats[k].replaced && !newly.count(k))) continue;
            send_seat(k, msg::round_result(round, res.outcome.part, decisions[k], res.outcome.infected[k],
                                           res.outcome.points[k], st.core.history(k), st.deadline_ms));
            if (newly.count(k)) send_seat(k, msg::disqualified(round));
        }
    }

    void after_review() {
        auto& st = s();
        const auto& protocol = st.config.protocol;
        if (st.core.finished()) {
            finish_session();
        } else if (st.core.round() == protocol.rounds_per_part) {
            st.phase = Phase::InterventionBriefing;
            log(records::intervention_start(st.config.intervention));
            log(records::part_start(Part::Intervention));
            arm(protocol.briefing_ms);
            for (std::size_t k = 0; k < st.seats.size(); ++k)
                if (!st.seats[k].bot && !st.seats[k].replaced)
                    send_seat(k, msg::intervention_start(st.config.intervention, st.config.fine, st.deadline_ms));
        } else {
            start_round();
        }
    }

    void finish_session() {
        auto& st = s();
        const auto& protocol = st.config.protocol;
        std::set<std::size_t> disq;
        for (std::size_t k = 0; k < st.group_size(); ++k)
            if (st.core.disqualified(k)) disq.insert(k);
        Rng payment_rng(mix_seed(st.seed, kPaymentStream));
        st.payments = compute_payment(st.core.outcomes(), disq, st.group_size(), protocol, payment_rng,
                                      protocol.points_per_dollar, protocol.fee_cents);
        for (const auto& p : st.payments) log(records::payment(p));
        log(records::session_end(protocol.total_rounds()));
        st.phase = Phase::Finished;
        for (std::size_t k = 0; k < st.seats.size(); ++k)
            if (!st.seats[k].bot) send_seat(k, msg::session_end(st.payments[k]));
    }

    Transition t_;
    std::int64_t now_;
};

}  // namespace

Transition advance(SessionState state, const Event& event) {
    Step step(std::move(state), event.now_ms);
    std::visit(
        [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, ClientMessageEvent>)
                step.on_message(body.client, body.text);
            else if constexpr (std::is_same_v<T, ClientDisconnectEvent>)
                step.on_disconnect(body.client);
            else
                step.on_timer(body.timer);
        },
        event.body);
    return std::move(step).finish();
}

}  // namespace sdgame::server
