#include <doctest.h>

#include <set>

#include "sdgame/server/protocol.hpp"
#include "sdgame/server/simulated_host.hpp"
#include "sdgame/session.hpp"

using namespace sdgame;
using namespace sdgame::server;
using nlohmann::json;

namespace {

ServerOptions star_options() {
    ServerOptions o;
    o.session.params.alpha = 0.65;
    o.session.intervention = Intervention::Fine;
    o.lobby_wait_ms = 5'000;
    return o;
}

std::vector<ScriptedClient> five_clients() {
    std::vector<ScriptedClient> cl(5);
    for (std::size_t i = 0; i < 5; ++i) {
        cl[i].name = "c" + std::to_string(i);
        cl[i].join_at_ms = static_cast<std::int64_t>(i) * 100;
        cl[i].think_ms = 400 + static_cast<std::int64_t>(i) * 900;
        cl[i].policy = i % 2 ? AgentPolicy::logit(0.1, 1, 0, 0.5) : AgentPolicy::equilibrium();
    }
    return cl;
}

std::vector<json> of_type(const std::vector<json>& msgs, const std::string& type) {
    std::vector<json> out;
    for (const auto& m : msgs)
        if (m.at("type") == type) out.push_back(m);
    return out;
}

// Synchronous driver for hand-written event sequences.
struct Driver {
    SessionState st;
    SessionLog log;
    std::vector<Outbound> out;
    std::optional<TimerRequest> timer;
    std::int64_t now = 0;

    explicit Driver(const ServerOptions& o, std::uint64_t seed = 11) : st(make_session(o, "d-1", seed)) {
        log.append(header_record(st));
    }
    void step(decltype(Event::body) body) {
        auto t = advance(std::move(st), Event{now, std::move(body)});
        st = std::move(t.state);
        for (auto& r : t.records) log.append(std::move(r));
        for (auto& m : t.messages) out.push_back(std::move(m));
        if (t.timer) timer = t.timer;
    }
    void say(ClientId c, const std::string& text) { step(ClientMessageEvent{c, text}); }
    void join(ClientId c) { say(c, encode(JoinMsg{"p" + std::to_string(c), {}})); }
    void submit(ClientId c, int round, Decision d) { say(c, encode(SubmitDecisionMsg{round, d})); }
    void fire() {
        REQUIRE(timer);
        now = timer->due_ms;
        const auto id = timer->id;
        timer.reset();
        step(TimerEvent{id});
    }
    std::vector<json> to(ClientId c) const {
        std::vector<json> v;
        for (const auto& o : out)
            if (o.client == c) v.push_back(o.message);
        return v;
    }
};

}  // namespace

TEST_SUITE("machine") {

TEST_CASE("scripted five-client trace is byte-identical across runs and replays") {
    const auto opts = star_options();
    const auto a = run_simulated_session(opts, "s-1", 77, five_clients(), 5);
    const auto b = run_simulated_session(opts, "s-1", 77, five_clients(), 5);
    const auto c = run_simulated_session(opts, "s-1", 77, five_clients(), 5);
    CHECK(a.final_state.phase == Phase::Finished);
    CHECK(a.log_jsonl == b.log_jsonl);
    CHECK(b.log_jsonl == c.log_jsonl);
    CHECK(a.received == b.received);

    const auto log = SessionLog::from_jsonl(a.log_jsonl);
    const auto r = replay(log);
    CHECK(r.finished);
    CHECK(r.payments == log.payments());
    CHECK(r.payments == a.final_state.payments);
    // The payment screen each client saw matches the replayed figures.
    for (std::size_t i = 0; i < 5; ++i) {
        const auto end = of_type(a.received[i], "session_end");
        REQUIRE(end.size() == 1);
        CHECK(end[0].at("total_cents") == r.payments[i].total_cents);
    }
    // A different seed changes the log.
    CHECK(run_simulated_session(opts, "s-1", 78, five_clients(), 5).log_jsonl != a.log_jsonl);
}

TEST_CASE("clients learn only their own decisions and outcomes") {
    const auto run = run_simulated_session(star_options(), "s-2", 3, five_clients(), 9);
    for (std::size_t i = 0; i < 5; ++i) {
        for (const auto& m : run.received[i]) {
            CHECK(!m.contains("decisions"));
            CHECK(!m.contains("positions"));
            CHECK(!m.contains("infected_all"));
            if (m.at("type") == "round_result") {
                CHECK(m.at("decision").is_string());
                CHECK(m.at("history").size() <= 5);
            }
        }
        const auto starts = of_type(run.received[i], "round_start");
        CHECK(starts.size() == 40);
        const auto results = of_type(run.received[i], "round_result");
        CHECK(results.size() == 40);
    }
    // Every history entry a client saw is its own: positions match the
    // round_start it received for that round.
    for (std::size_t i = 0; i < 5; ++i) {
        std::map<int, int> pos;
        for (const auto& m : of_type(run.received[i], "round_start")) pos[m.at("round")] = m.at("position");
        for (const auto& m : of_type(run.received[i], "round_result"))
            for (const auto& h : m.at("history")) CHECK(h.at("position") == pos.at(h.at("round")));
    }
}

TEST_CASE("one human plus bot fill finishes") {
    auto opts = star_options();
    opts.bot_policy = AgentPolicy::equilibrium();
    std::vector<ScriptedClient> one(1);
    one[0].name = "solo";
    const auto run = run_simulated_session(opts, "s-3", 21, one, 2);
    CHECK(run.final_state.phase == Phase::Finished);
    const auto log = SessionLog::from_jsonl(run.log_jsonl);
    const auto roster = log.roster();
    REQUIRE(roster.size() == 5);
    CHECK(!roster[0].bot);
    for (std::size_t k = 1; k < 5; ++k) {
        CHECK(roster[k].bot);
        CHECK(roster[k].policy == AgentPolicy::equilibrium());
    }
    CHECK(replay(log).payments == log.payments());
    CHECK(of_type(run.received[0], "session_end").size() == 1);
    // The group formed when the lobby wait expired.
    const auto formed = of_type(run.received[0], "group_formed");
    REQUIRE(formed.size() == 1);
    CHECK(formed[0].at("group_size") == 5);
}

TEST_CASE("three missed decisions disqualify and a bot takes over") {
    auto clients = five_clients();
    clients[2].silent_rounds = {3, 4, 5};
    const auto run = run_simulated_session(star_options(), "s-4", 8, clients, 4);
    CHECK(run.final_state.phase == Phase::Finished);
    const auto log = SessionLog::from_jsonl(run.log_jsonl);
    CHECK(log.disqualified() == std::set<std::size_t>{2});
    bool record = false;
    for (const auto& r : log.records())
        if (r.at("event") == "disqualified") {
            record = true;
            CHECK(r.at("round") == 5);
            CHECK(r.at("replacement") == "NeverDistance");
        }
    CHECK(record);
    const auto rounds = log.rounds();
    for (int r = 3; r <= 5; ++r) {
        CHECK(rounds[r - 1].decisions[2] == Decision::Timeout);
        CHECK(rounds[r - 1].points[2] <= -100.0);
    }
    for (int r = 6; r <= 40; ++r) CHECK(rounds[r - 1].decisions[2] == Decision::No);
    CHECK(of_type(run.received[2], "disqualified").size() == 1);
    const auto end = of_type(run.received[2], "session_end");
    REQUIRE(end.size() == 1);
    CHECK(end[0].at("disqualified") == true);
    CHECK(end[0].at("total_cents") == 0);
    CHECK(replay(log).payments == log.payments());
}

TEST_CASE("a client that drops and rejoins with its token keeps its seat") {
    auto clients = five_clients();
    clients[1].disconnect_after_round = 7;
    clients[1].reconnect_after_ms = 1'000;
    const auto run = run_simulated_session(star_options(), "s-5", 12, clients, 6);
    CHECK(run.final_state.phase == Phase::Finished);
    const auto log = SessionLog::from_jsonl(run.log_jsonl);
    CHECK(log.disqualified().empty());
    const auto& got = run.received[1];
    CHECK(of_type(got, "group_formed").size() == 2);  // original plus resync
    CHECK(of_type(got, "session_end").size() == 1);
    int timeouts = 0;
    for (const auto& o : log.rounds()) timeouts += o.decisions[1] == Decision::Timeout;
    CHECK(timeouts <= 1);
}

TEST_CASE("decision validation") {
    auto opts = star_options();
    opts.bot_fill = false;
    Driver d(opts);
    d.submit(1, 1, Decision::Yes);  // not seated
    CHECK(d.to(1).back().at("ok") == false);
    for (ClientId c = 1; c <= 5; ++c) d.join(c);
    CHECK(d.st.phase == Phase::RoundDecision);
    CHECK(d.st.core.round() == 1);
    d.join(1);
    CHECK(d.to(1).back().at("type") == "error");

    d.submit(1, 2, Decision::Yes);
    CHECK(d.to(1).back().at("ok") == false);  // wrong round
    d.submit(1, 1, Decision::Yes);
    CHECK(d.to(1).back().at("ok") == true);
    d.submit(1, 1, Decision::No);
    CHECK(d.to(1).back().at("ok") == false);  // duplicate
    d.say(1, "garbage");
    CHECK(d.to(1).back().at("type") == "error");

    // Lobby closed to newcomers once the group formed.
    d.join(6);
    CHECK(d.to(6).back().at("type") == "error");

    // Timer expiry resolves the round with timeouts for the missing four.
    d.fire();
    CHECK(d.st.phase == Phase::RoundReview);
    const auto rounds = d.log.rounds();
    REQUIRE(rounds.size() == 1);
    CHECK(rounds[0].decisions[0] == Decision::Yes);
    for (int k = 1; k < 5; ++k) CHECK(rounds[0].decisions[k] == Decision::Timeout);

    // Stale timer ids change nothing.
    const auto before = d.log.records().size();
    d.step(TimerEvent{9999});
    CHECK(d.log.records().size() == before);
    CHECK(d.st.phase == Phase::RoundReview);

    d.fire();  // review over
    CHECK(d.st.phase == Phase::RoundDecision);
    CHECK(d.st.core.round() == 2);
}

TEST_CASE("intervention briefing between the parts") {
    auto opts = star_options();
    opts.session.protocol.rounds_per_part = 2;
    opts.session.protocol.paid_rounds_per_part = 1;
    opts.bot_fill = false;
    Driver d(opts);
    for (ClientId c = 1; c <= 5; ++c) d.join(c);
    for (int r = 1; r <= 2; ++r) {
        for (ClientId c = 1; c <= 5; ++c) d.submit(c, r, Decision::No);
        d.fire();
    }
    CHECK(d.st.phase == Phase::InterventionBriefing);
    const auto brief = of_type(d.to(3), "intervention_start");
    REQUIRE(brief.size() == 1);
    CHECK(brief[0].at("kind") == "fine");
    CHECK(brief[0].at("fine") == 15.0);
    d.fire();
    CHECK(d.st.phase == Phase::RoundDecision);
    CHECK(of_type(d.to(1), "round_start").back().at("params").at("fine") == 15.0);
    for (int r = 3; r <= 4; ++r) {
        for (ClientId c = 1; c <= 5; ++c) d.submit(c, r, Decision::Yes);
        d.fire();
    }
    CHECK(d.st.phase == Phase::Finished);
    CHECK(replay(d.log).payments == d.log.payments());
}

TEST_CASE("invalid options are refused") {
    auto opts = star_options();
    opts.session.params.alpha = 1.5;
    CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_session(opts, "x", 1), std::invalid_argument);
    opts = star_options();
    opts.lobby_wait_ms = -1;
    CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
    CHECK(options_from_json(options_to_json(star_options())).session == star_options().session);
}

TEST_CASE("session ids and seeds") {
    CHECK(session_id("live", 0) == "live-0001");
    CHECK(session_seed(5, 0) != session_seed(5, 1));
    CHECK(session_seed(5, 3) == session_seed(5, 3));
}

}
