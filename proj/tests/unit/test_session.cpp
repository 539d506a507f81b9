#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "sdgame/format.hpp"
#include "sdgame/session.hpp"

using namespace sdgame;

namespace {

std::vector<RoundOutcome> flat_rounds(double points, std::size_t n = 5) {
    std::vector<RoundOutcome> rounds;
    for (int r = 1; r <= 40; ++r) {
        RoundOutcome o;
        o.round = r;
        o.part = r <= 20 ? Part::Baseline : Part::Intervention;
        o.decisions.assign(n, Decision::Yes);
        o.infected.assign(n, false);
        o.points.assign(n, points);
        rounds.push_back(o);
    }
    return rounds;
}

SessionConfig star_config() {
    SessionConfig c;
    c.session_id = "t";
    c.params.alpha = 0.65;
    return c;
}

}  // namespace

TEST_SUITE("session") {

TEST_CASE("points to cents") {
    CHECK(part_bonus_cents(260, 115) == 226);
    CHECK(format_cents(part_bonus_cents(260, 115)) == "2.26");
    CHECK(part_bonus_cents(-140, 115) == 0);     // never negative
    CHECK(part_bonus_cents(0.5, 100) == 1);  // half a cent rounds away from zero
    CHECK(part_bonus_cents(0.25, 100) == 0);
    CHECK(part_bonus_cents(0, 115) == 0);
    CHECK_THROWS_AS(part_bonus_cents(10, 0), std::invalid_argument);
}

TEST_CASE("payment draws four distinct rounds per part") {
    ProtocolParams proto;
    auto rounds = flat_rounds(65);
    Rng rng(1);
    const auto pay = compute_payment(rounds, {}, 5, proto, rng, 115, 100);
    REQUIRE(pay.size() == 5);
    for (const auto& p : pay) {
        for (int part = 0; part < 2; ++part) {
            const auto& d = p.drawn_rounds[part];
            REQUIRE(d.size() == 4);
            CHECK(std::set<int>(d.begin(), d.end()).size() == 4);
            for (int r : d) CHECK((part == 0 ? (r >= 1 && r <= 20) : (r >= 21 && r <= 40)));
            CHECK(p.drawn_points[part] == 260.0);
            CHECK(p.bonus_cents[part] == 226);
        }
        CHECK(p.total_cents == 100 + 2 * 226);
    }
}

TEST_CASE("payment uses the drawn rounds' points and zeroes disqualified participants") {
    ProtocolParams proto;
    auto rounds = flat_rounds(0);
    for (auto& r : rounds)
        for (std::size_t k = 0; k < 5; ++k) r.points[k] = r.round * 10.0 + k;
    Rng rng(9);
    const auto pay = compute_payment(rounds, {3}, 5, proto, rng, 115, 100);
    for (const auto& p : pay) {
        for (int part = 0; part < 2; ++part) {
            double sum = 0;
            for (int r : p.drawn_rounds[part]) sum += r * 10.0 + p.participant;
            CHECK(p.drawn_points[part] == sum);
        }
        CHECK(p.disqualified == (p.participant == 3));
        if (p.participant == 3) CHECK(p.total_cents == 0);
    }
    // Every 4-subset is reachable; check the draw covers all rounds.
    std::set<int> seen;
    for (int t = 0; t < 200; ++t) {
        for (const auto& p : compute_payment(rounds, {}, 5, proto, rng, 115, 100))
            for (int r : p.drawn_rounds[0]) seen.insert(r);
    }
    CHECK(seen.size() == 20);
    rounds.pop_back();
    CHECK_THROWS_AS(compute_payment(rounds, {}, 5, proto, rng, 115, 100), std::invalid_argument);
}

TEST_CASE("three missed decisions in a row disqualify") {
    GroupSession s(star_config(), 4);
    std::vector<Decision> d(5, Decision::No);
    for (int r = 1; r <= 2; ++r) {
        s.begin_round();
        d[2] = Decision::Timeout;
        CHECK(s.resolve_round(d).newly_disqualified.empty());
    }
    s.begin_round();
    d[2] = Decision::No;  // streak broken
    CHECK(s.resolve_round(d).newly_disqualified.empty());
    CHECK(s.timeout_streak(2) == 0);
    for (int r = 0; r < 2; ++r) {
        s.begin_round();
        d[2] = Decision::Timeout;
        s.resolve_round(d);
    }
    s.begin_round();
    const auto res = s.resolve_round(d);
    CHECK(res.newly_disqualified == std::vector<std::size_t>{2});
    CHECK(s.disqualified(2));
    CHECK(res.outcome.points[2] <= -100.0);
}

TEST_CASE("group session bookkeeping") {
    GroupSession s(star_config(), 8);
    CHECK_THROWS_AS(s.resolve_round(std::vector<Decision>(5, Decision::No)), std::logic_error);
    for (int r = 1; r <= 40; ++r) {
        const auto& pos = s.begin_round();
        CHECK(pos.size() == 5);
        CHECK(s.round() == r);
        CHECK(s.part() == (r <= 20 ? Part::Baseline : Part::Intervention));
        const auto obs = s.observation(1);
        CHECK(obs.params.fine == (r <= 20 ? 0.0 : 15.0));
        CHECK(obs.history.size() == static_cast<std::size_t>(std::min(r - 1, 5)));
        CHECK_THROWS_AS(s.begin_round(), std::logic_error);
        s.resolve_round(std::vector<Decision>(5, Decision::Yes));
    }
    CHECK(s.finished());
    CHECK_THROWS_AS(s.begin_round(), std::logic_error);
}

TEST_CASE("nudge sessions never fine") {
    auto cfg = star_config();
    cfg.intervention = Intervention::Nudge;
    CHECK(cfg.params_for(Part::Intervention).fine == 0.0);
    cfg.intervention = Intervention::Fine;
    CHECK(cfg.params_for(Part::Intervention).fine == 15.0);
    CHECK(cfg.params_for(Part::Baseline).fine == 0.0);
}

TEST_CASE("simulation is deterministic and replays") {
    const auto cfg = star_config();
    const std::vector<AgentPolicy> pol(5, AgentPolicy::logit(0.1, 1.0, 0.0, 0.5));
    const auto a = run_session_sim(cfg, pol, 42);
    const auto b = run_session_sim(cfg, pol, 42);
    const auto c = run_session_sim(cfg, pol, 43);
    CHECK(a.to_jsonl() == b.to_jsonl());
    CHECK(a.to_jsonl() != c.to_jsonl());
    CHECK(a.finished());
    CHECK(a.rounds().size() == 40);

    const auto r = replay(SessionLog::from_jsonl(a.to_jsonl()));
    CHECK(r.finished);
    CHECK(r.seed == 42);
    CHECK(r.payments == a.payments());
    CHECK(r.rounds == a.rounds());

    // Payments recomputed from the payment stream match the log.
    Rng pay_rng(mix_seed(42, kPaymentStream));
    CHECK(compute_payment(a, pay_rng, 115, 100) == a.payments());
}

TEST_CASE("replay rejects tampered logs and names the line") {
    const auto log = run_session_sim(star_config(), std::vector<AgentPolicy>(5, AgentPolicy::equilibrium()), 5);
    auto recs = log.records();
    std::size_t line = 0;
    for (std::size_t i = 0; i < recs.size(); ++i)
        if (recs[i].at("event") == "round_outcome" && recs[i].at("round") == 3) {
            auto& inf = recs[i]["infected"];
            inf[0] = !inf[0].get<bool>();
            line = i + 1;
            break;
        }
    REQUIRE(line > 0);
    SessionLog bad;
    for (auto& r : recs) bad.append(r);
    try {
        replay(bad);
        FAIL("tampered log accepted");
    } catch (const LogError& e) {
        CHECK(e.line() == line);
    }
    CHECK_THROWS_AS(SessionLog::from_jsonl("not json\n"), LogError);
    CHECK_THROWS_AS(SessionLog::from_jsonl("{\"event\":\"join\"}\n"), LogError);
    // Truncated log: replay reports it incomplete or throws, never invents data.
    SessionLog cut;
    for (std::size_t i = 0; i < log.records().size() / 2; ++i) cut.append(log.records()[i]);
    CHECK_THROWS_AS(replay(cut), LogError);
}

TEST_CASE("decision CSV and config JSON") {
    const auto log = run_session_sim(star_config(), std::vector<AgentPolicy>(5, AgentPolicy::equilibrium()), 6);
    const auto csv = decision_csv(log);
    CHECK(csv.rfind("session,network,alpha,intervention,participant,round,part,position,role,decision,timeout,"
                    "infected,points\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 200);
    CHECK(decision_csv(log, false).find("session,") != 0);
    const auto cfg = star_config();
    CHECK(config_from_json(config_to_json(cfg)) == cfg);
    CHECK_THROWS(config_from_json(nlohmann::json{{"params", {{"alpha", 3}}}}));
}

TEST_CASE("atomic writes leave no temporary file") {
    const auto dir = std::filesystem::temp_directory_path() / "sdgame_atomic_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "out.txt").string();
    write_file_atomic(path, "one");
    write_file_atomic(path, "two");
    std::ifstream in(path);
    std::string s;
    std::getline(in, s);
    CHECK(s == "two");
    CHECK(!std::filesystem::exists(path + ".tmp"));
    std::filesystem::remove_all(dir);
}

}
