#include <doctest.h>

#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "sdgame/analysis/report.hpp"
#include "sdgame/session.hpp"

using namespace sdgame;
using namespace sdgame::analysis;

namespace {

std::vector<SessionLog> design(int per_cell, std::uint64_t seed) {
    std::vector<SessionLog> logs;
    std::uint64_t i = 0;
    for (const char* net : {"complete", "star"})
        for (double alpha : {0.15, 0.65})
            for (auto iv : {Intervention::Fine, Intervention::Nudge})
                for (int s = 0; s < per_cell; ++s, ++i) {
                    SessionConfig c;
                    c.network = network_by_name(net);
                    c.params.alpha = alpha;
                    c.intervention = iv;
                    c.session_id = std::string(net) + "-" + std::to_string(i);
                    logs.push_back(run_session_sim(c, std::vector<AgentPolicy>(5, AgentPolicy::logit(0.15, 1, 0, 0.5)),
                                                   mix_seed(seed, i)));
                }
    return logs;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("panel from logs mirrors the logged decisions") {
    const auto logs = design(1, 2);
    const auto panel = DecisionPanel::from_logs(logs);
    REQUIRE(panel.groups.size() == logs.size());
    CHECK_NOTHROW(panel.validate());
    for (std::size_t g = 0; g < logs.size(); ++g) {
        const auto rounds = logs[g].rounds();
        const auto& grp = panel.groups[g];
        CHECK(grp.subjects.size() == 5);
        for (const auto& s : grp.subjects) {
            REQUIRE(s.decisions.size() == 40);
            for (const auto& o : rounds) {
                CHECK(s.decisions[o.round - 1] == distances(o.decisions[s.participant]));
                CHECK(s.roles[o.round - 1] == node_role(logs[g].config().network, o.positions[s.participant]));
            }
        }
    }
}

TEST_CASE("CSV round trip") {
    const auto logs = design(1, 3);
    std::string csv;
    for (std::size_t i = 0; i < logs.size(); ++i) csv += decision_csv(logs[i], true);  // repeated headers
    const auto a = DecisionPanel::from_logs(logs);
    const auto b = DecisionPanel::from_csv(csv);
    REQUIRE(a.groups.size() == b.groups.size());
    for (std::size_t g = 0; g < a.groups.size(); ++g) {
        CHECK(a.groups[g].id == b.groups[g].id);
        CHECK(a.groups[g].treatment == b.groups[g].treatment);
        for (std::size_t s = 0; s < 5; ++s) {
            CHECK(a.groups[g].subjects[s].decisions == b.groups[g].subjects[s].decisions);
            CHECK(a.groups[g].subjects[s].roles == b.groups[g].subjects[s].roles);
        }
    }
    CHECK_THROWS(DecisionPanel::from_csv(csv.substr(0, csv.size() / 2)));  // missing rounds
    CHECK_THROWS(DecisionPanel::from_csv("session,network\nx,y\n"));
}

TEST_CASE("group aggregates over a window") {
    const auto logs = design(1, 4);
    const auto panel = DecisionPanel::from_logs(logs);
    const auto agg = aggregate_group_distancing(panel, Part::Intervention, {11, 20});
    REQUIRE(agg.size() == logs.size());
    for (std::size_t g = 0; g < logs.size(); ++g) {
        double yes = 0, n = 0;
        for (const auto& o : logs[g].rounds())
            if (o.round >= 31 && o.round <= 40)
                for (auto d : o.decisions) {
                    yes += distances(d);
                    n += 1;
                }
        CHECK(agg[g].value == doctest::Approx(yes / n));
        CHECK(agg[g].observations == 50);
    }
    // Superspreader rows exist only for star groups.
    const auto hubs = aggregate_group_distancing(panel, Part::Baseline, {1, 20}, NodeRole::Superspreader);
    for (const auto& h : hubs) CHECK(h.treatment.network == "star");
    CHECK(hubs.size() == logs.size() / 2);
    CHECK_THROWS_AS(aggregate_group_distancing(panel, Part::Baseline, {0, 5}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_group_distancing(panel, Part::Baseline, {5, 21}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_group_distancing(panel, Part::Baseline, {6, 5}), std::invalid_argument);

    const auto series = round_series(panel, {0});
    REQUIRE(series.size() == 40);
    const auto r1 = logs[0].rounds()[0];
    double y = 0;
    for (auto d : r1.decisions) y += distances(d);
    CHECK(series[0] == doctest::Approx(y / 5));
}

TEST_CASE("hypothesis table layout") {
    const auto panel = DecisionPanel::from_logs(design(3, 5));
    const auto rows = hypothesis_table(panel);
    std::set<int> parts;
    for (const auto& r : rows) parts.insert(r.part_no);
    CHECK(parts == std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    for (const auto& r : rows) {
        if (r.part_no == 2 || r.part_no == 3) {
            CHECK(r.test == "WSR");
            CHECK(r.alternative == Alternative::Greater);
        }
        if (r.part_no == 1) {
            CHECK(r.test == "MW");
            CHECK(r.alternative == Alternative::TwoSided);
        }
        if (r.result) {
            CHECK(r.result->p_value >= 0.0);
            CHECK(r.result->p_value <= 1.0);
        } else {
            CHECK(!r.note.empty());
        }
    }
    const auto param = hypothesis_table(panel, {{11, 20}, true});
    for (const auto& r : param) CHECK((r.test == "UT" || r.test == "PT"));
    CHECK(render_table(rows, "caption").find("caption") == 0);
}

TEST_CASE("full analysis report") {
    const auto panel = DecisionPanel::from_logs(design(2, 6));
    AnalyzeOptions opts;
    opts.breaks.permutations = 99;
    const auto rep = analyze_panel(panel, opts);
    CHECK(rep.groups == 16);
    const auto j = rep.to_json();
    for (const char* key : {"hypothesis_tests", "robustness_all_rounds", "robustness_parametric", "structural_breaks",
                            "convergence"})
        CHECK(j.contains(key));
    std::set<std::string> subsets;
    for (const auto& b : rep.breaks) subsets.insert(b.subset);
    CHECK(subsets.count("all"));
    CHECK(subsets.count("fine"));
    CHECK(subsets.count("star/nudge"));
    // Baseline and intervention convergence rows.
    CHECK(rep.convergence.rows.size() == 3 + 9);
    CHECK(!rep.to_text().empty());
}

TEST_CASE("significance stars") {
    ReportRow r;
    CHECK(r.significance().empty());
    r.result = TestResult{};
    r.result->p_value = 0.009;
    CHECK(r.significance() == "***");
    r.result->p_value = 0.04;
    CHECK(r.significance() == "**");
    r.result->p_value = 0.07;
    CHECK(r.significance() == "*");
    r.result->p_value = 0.2;
    CHECK(r.significance().empty());
}

}
