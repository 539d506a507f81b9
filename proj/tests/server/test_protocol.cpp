#include <doctest.h>

#include <algorithm>

#include "sdgame/server/protocol.hpp"

using namespace sdgame;
using namespace sdgame::server;

TEST_SUITE("protocol") {

TEST_CASE("client messages parse and re-encode") {
    auto m = parse_client_message(R"({"type":"join","name":"ann"})");
    REQUIRE(std::holds_alternative<JoinMsg>(m));
    CHECK(std::get<JoinMsg>(m).name == "ann");
    CHECK(!std::get<JoinMsg>(m).participant_id);
    CHECK(parse_client_message(encode(m)) == m);

    m = parse_client_message(R"({"type":"join","name":"bo","participant_id":"abc"})");
    CHECK(std::get<JoinMsg>(m).participant_id == "abc");

    m = parse_client_message(R"({"type":"submit_decision","round":3,"decision":"Yes"})");
    REQUIRE(std::holds_alternative<SubmitDecisionMsg>(m));
    CHECK(std::get<SubmitDecisionMsg>(m).round == 3);
    CHECK(std::get<SubmitDecisionMsg>(m).decision == Decision::Yes);
    CHECK(parse_client_message(encode(m)) == m);
}

TEST_CASE("malformed client messages") {
    for (const char* bad : {"", "not json", "[]", R"({"name":"x"})", R"({"type":"dance"})",
                            R"({"type":"join","name":7})",
                            R"({"type":"submit_decision","round":1})",
                            R"({"type":"submit_decision","round":"one","decision":"Yes"})",
                            R"({"type":"submit_decision","round":1,"decision":"Timeout"})",
                            R"({"type":"submit_decision","round":1,"decision":"Maybe"})"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_client_message(bad), ProtocolError);
    }
    const std::string long_name(65, 'x');
    CHECK_THROWS_AS(parse_client_message(R"({"type":"join","name":")" + long_name + "\"}"), ProtocolError);
}

TEST_CASE("server message shapes") {
    const auto net = Network::star(5);
    std::vector<nlohmann::json> all = {
        msg::lobby_update(2, 5),
        msg::group_formed("s-1", "tok", 2, 5),
        msg::round_start(4, Part::Baseline, net, 0, GameParams{}, 1000, false),
        msg::decision_ack(4, Decision::Yes),
        msg::decision_rejected(4, "late"),
        msg::round_result(4, Part::Baseline, Decision::No, true, 0.0, {}, 2000),
        msg::intervention_start(Intervention::Fine, 15, 3000),
        msg::disqualified(5),
        msg::error("nope"),
    };
    for (const auto& m : all) {
        REQUIRE(m.contains("type"));
        CHECK(std::find(kServerMessageTypes.begin(), kServerMessageTypes.end(), m.at("type").get<std::string>()) !=
              kServerMessageTypes.end());
    }
    const auto rs = all[2];
    CHECK(rs.at("position") == 0);
    CHECK(rs.at("role") == "superspreader");
    CHECK(rs.at("deadline_ms") == 1000);
    CHECK(all[3].at("ok") == true);
    CHECK(all[4].at("ok") == false);
    CHECK(all[6].at("fine") == 15.0);
    CHECK(!msg::intervention_start(Intervention::Nudge, 15, 3000).contains("fine"));
}

}
