#include <doctest.h>

#include <random>

#include "sdgame/analysis/convergence.hpp"

using namespace sdgame;
using namespace sdgame::analysis;

namespace {

struct Candidate {
    Pattern pattern;
    bool action;
    int phase;
};

// Prescribed action per round, or nothing if the strategy does not apply.
std::optional<std::vector<bool>> prescribe(const Candidate& c, const std::vector<NodeRole>& roles) {
    std::vector<bool> out;
    int peripheral_seen = 0;
    for (auto r : roles) {
        if (c.pattern == Pattern::Constant) {
            out.push_back(c.action);
            continue;
        }
        if (r == NodeRole::Superspreader) {
            out.push_back(c.action);
        } else if (r == NodeRole::Peripheral) {
            if (c.pattern == Pattern::Complement)
                out.push_back(!c.action);
            else
                out.push_back(((c.phase + peripheral_seen) % 2) == 1);
            ++peripheral_seen;
        } else {
            return std::nullopt;
        }
    }
    return out;
}

int earliest(const std::vector<bool>& d, const std::vector<bool>& target, int k, int a) {
    const int T = static_cast<int>(d.size());
    for (int n = k; n <= T; ++n) {
        bool ok = true;
        for (int t = n - k; t < n && ok; ++t) ok = d[t] == target[t];
        int run = 0;
        for (int t = n; t < T && ok; ++t) {
            run = d[t] == target[t] ? 0 : run + 1;
            ok = run <= a;
        }
        if (ok) return n;
    }
    return 0;
}

ConvergenceResult brute(const std::vector<bool>& d, const std::vector<NodeRole>& roles, int k, int a) {
    std::vector<Candidate> cands;
    for (bool act : {true, false}) cands.push_back({Pattern::Constant, act, 0});
    for (bool act : {true, false}) cands.push_back({Pattern::Complement, act, 0});
    for (bool act : {true, false})
        for (int ph : {1, 0}) cands.push_back({Pattern::Alternating, act, ph});
    ConvergenceResult best;
    for (const auto& c : cands) {
        auto target = prescribe(c, roles);
        if (!target) continue;
        const int n = earliest(d, *target, k, a);
        if (n == 0) continue;
        if (!best.converged || n < best.round) {
            best.converged = true;
            best.round = n;
            best.pattern = c.pattern;
            best.action = c.action;
            best.phase = c.pattern == Pattern::Alternating ? c.phase : 0;
        }
    }
    return best;
}

std::vector<bool> span_copy(const std::vector<bool>& v, std::unique_ptr<bool[]>& buf) {
    buf = std::make_unique<bool[]>(v.size());
    std::copy(v.begin(), v.end(), buf.get());
    return v;
}

ConvergenceResult detect(const std::vector<bool>& d, const std::vector<NodeRole>& roles, int k, int a) {
    std::unique_ptr<bool[]> buf;
    span_copy(d, buf);
    return detect_convergence({buf.get(), d.size()}, roles, k, a);
}

}  // namespace

TEST_SUITE("convergence") {

TEST_CASE("an all-constant subject converges at round k") {
    const std::vector<NodeRole> ck(20, NodeRole::CloseKnit);
    for (bool act : {true, false}) {
        const auto r = detect(std::vector<bool>(20, act), ck, 4, 2);
        CHECK(r.converged);
        CHECK(r.round == 4);
        CHECK(r.pattern == Pattern::Constant);
        CHECK(r.action == act);
    }
}

TEST_CASE("deviations up to the allowance are tolerated") {
    const std::vector<NodeRole> ck(20, NodeRole::CloseKnit);
    std::vector<bool> d(20, true);
    d[11] = d[12] = d[13] = false;  // rounds 12-14
    // A run of three exceeds a = 2: convergence only after it.
    auto r = detect(d, ck, 4, 2);
    CHECK(r.round == 18);
    // With a = 3 the run is absorbed.
    r = detect(d, ck, 4, 3);
    CHECK(r.round == 4);
    d.assign(20, true);
    d[5] = d[6] = false;
    CHECK(detect(d, ck, 4, 2).round == 4);
}

TEST_CASE("star strategies") {
    // Roles alternate between superspreader and peripheral.
    std::vector<NodeRole> roles;
    for (int t = 0; t < 20; ++t) roles.push_back(t % 3 == 0 ? NodeRole::Superspreader : NodeRole::Peripheral);
    std::vector<bool> complement;
    for (auto r : roles) complement.push_back(r == NodeRole::Superspreader);
    auto res = detect(complement, roles, 4, 0);
    CHECK(res.pattern == Pattern::Complement);
    CHECK(res.action == true);
    CHECK(res.round == 4);

    std::vector<bool> alt;
    int seen = 0;
    for (auto r : roles) alt.push_back(r == NodeRole::Superspreader ? false : (seen++ % 2 == 0));
    res = detect(alt, roles, 4, 0);
    CHECK(res.pattern == Pattern::Alternating);
    CHECK(res.action == false);
    CHECK(res.phase == 1);

    // Complete-graph roles cannot use star patterns.
    const std::vector<NodeRole> ck(20, NodeRole::CloseKnit);
    CHECK(!detect(alt, ck, 4, 0).converged);
}

TEST_CASE("agrees with a brute-force search") {
    std::mt19937 gen(31);
    for (int trial = 0; trial < 3000; ++trial) {
        const bool star = trial % 2 == 0;
        std::vector<NodeRole> roles;
        for (int t = 0; t < 20; ++t)
            roles.push_back(star ? (gen() % 5 == 0 ? NodeRole::Superspreader : NodeRole::Peripheral)
                                 : NodeRole::CloseKnit);
        std::vector<bool> d(20);
        const double bias = (gen() % 100) / 100.0;
        for (int t = 0; t < 20; ++t) d[t] = (gen() % 1000) / 1000.0 < bias;
        const int k = 1 + static_cast<int>(gen() % 6), a = static_cast<int>(gen() % 4);
        const auto want = brute(d, roles, k, a);
        const auto got = detect(d, roles, k, a);
        CAPTURE(trial);
        REQUIRE(got.converged == want.converged);
        if (!want.converged) continue;
        CHECK(got.round == want.round);
        CHECK(got.pattern == want.pattern);
        CHECK(got.action == want.action);
        CHECK(got.phase == want.phase);
    }
}

TEST_CASE("monotone in the allowance") {
    std::mt19937 gen(77);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<NodeRole> roles(20, trial % 2 ? NodeRole::CloseKnit : NodeRole::Peripheral);
        for (auto& r : roles)
            if (trial % 2 == 0 && gen() % 5 == 0) r = NodeRole::Superspreader;
        std::vector<bool> d(20);
        for (int t = 0; t < 20; ++t) d[t] = gen() % 3 != 0;
        int last = 1000;
        bool was = false;
        for (int a = 0; a <= 6; ++a) {
            const auto r = detect(d, roles, 4, a);
            if (was) CHECK(r.converged);
            if (r.converged) {
                CHECK(r.round <= last);
                last = r.round;
            }
            was = r.converged;
        }
    }
}

TEST_CASE("argument checks and shares") {
    const std::vector<NodeRole> ck(5, NodeRole::CloseKnit);
    CHECK_THROWS_AS(detect(std::vector<bool>(5, true), ck, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(detect(std::vector<bool>(5, true), ck, 2, -1), std::invalid_argument);
    CHECK_THROWS_AS(detect(std::vector<bool>(4, true), ck, 2, 1), std::invalid_argument);
    std::vector<ConvergenceResult> rs(4);
    rs[0].converged = true;
    rs[0].round = 2;
    rs[1].converged = true;
    rs[1].round = 4;
    const auto share = convergence_share_by_round(rs, 5);
    CHECK(share == std::vector<double>{0.0, 0.25, 0.25, 0.5, 0.5});
    CHECK(pattern_from_string(to_string(Pattern::Alternating)) == Pattern::Alternating);
}

}
