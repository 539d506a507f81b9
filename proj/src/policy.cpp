#include "sdgame/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sdgame/contagion.hpp"
#include "sdgame/equilibrium.hpp"

namespace sdgame {

AgentPolicy AgentPolicy::logit(double precision, double risk, double altruism, double belief) {
    AgentPolicy p{PolicyKind::LogitResponse};
    p.precision = precision;
    p.risk = risk;
    p.altruism = altruism;
    p.belief = belief;
    p.validate();
    return p;
}

void AgentPolicy::validate() const {
    if (kind != PolicyKind::LogitResponse) return;
    if (!(precision >= 0.0)) throw std::invalid_argument("logit precision must be non-negative");
    if (!(risk > 0.0 && risk <= 1.5)) throw std::invalid_argument("risk exponent must lie in (0, 1.5]");
    if (!(altruism >= 0.0 && altruism <= 1.0)) throw std::invalid_argument("altruism weight must lie in [0, 1]");
    if (!(belief >= 0.0 && belief <= 1.0)) throw std::invalid_argument("belief must lie in [0, 1]");
}

std::string to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::AlwaysDistance: return "AlwaysDistance";
        case PolicyKind::NeverDistance: return "NeverDistance";
        case PolicyKind::StaticEquilibrium: return "StaticEquilibrium";
        case PolicyKind::LogitResponse: return "LogitResponse";
    }
    throw std::invalid_argument("unknown policy kind");
}

PolicyKind policy_kind_from_string(const std::string& s) {
    if (s == "AlwaysDistance") return PolicyKind::AlwaysDistance;
    if (s == "NeverDistance") return PolicyKind::NeverDistance;
    if (s == "StaticEquilibrium") return PolicyKind::StaticEquilibrium;
    if (s == "LogitResponse") return PolicyKind::LogitResponse;
    throw std::invalid_argument("unknown policy kind '" + s + "'");
}

nlohmann::json policy_to_json(const AgentPolicy& p) {
    nlohmann::json j{{"kind", to_string(p.kind)}};
    if (p.kind == PolicyKind::StaticEquilibrium)
        j["selection"] = p.selection == EquilibriumSelection::LexSmallest ? "lex_smallest" : "lex_largest";
    if (p.kind == PolicyKind::LogitResponse) {
        j["precision"] = p.precision;
        j["risk"] = p.risk;
        j["altruism"] = p.altruism;
        j["belief"] = p.belief;
    }
    return j;
}

AgentPolicy policy_from_json(const nlohmann::json& j) {
    if (j.is_string()) return AgentPolicy{policy_kind_from_string(j.get<std::string>())};
    AgentPolicy p{policy_kind_from_string(j.at("kind").get<std::string>())};
    if (j.contains("selection")) {
        auto s = j.at("selection").get<std::string>();
        if (s == "lex_smallest")
            p.selection = EquilibriumSelection::LexSmallest;
        else if (s == "lex_largest")
            p.selection = EquilibriumSelection::LexLargest;
        else
            throw std::invalid_argument("unknown equilibrium selection '" + s + "'");
    }
    p.precision = j.value("precision", p.precision);
    p.risk = j.value("risk", p.risk);
    p.altruism = j.value("altruism", p.altruism);
    p.belief = j.value("belief", p.belief);
    p.validate();
    return p;
}

LogitUtilities logit_utilities(const AgentPolicy& policy, const Network& net, NodeId position,
                               const GameParams& params) {
    const auto n = net.node_count();
    if (n > kMaxSolverNodes) throw std::length_error("logit utilities support at most 20 nodes");
    if (position >= n) throw std::out_of_range("position out of range");

    // Shift so that the worst outcome (-c or -f) maps to zero.
    const double shift = std::max(params.cost, params.fine);
    auto u = [&](double points) { return std::pow(std::max(0.0, points + shift), policy.risk); };
    auto expected_u = [&](bool distancing, double p_infected) {
        const double healthy = params.benefit - (distancing ? params.cost : params.fine);
        const double sick = -(distancing ? params.cost : params.fine);
        return (1.0 - p_infected) * u(healthy) + p_infected * u(sick);
    };

    std::vector<NodeId> others;
    for (NodeId v = 0; v < n; ++v)
        if (v != position) others.push_back(v);

    LogitUtilities out;
    const std::uint64_t count = std::uint64_t{1} << others.size();
    for (std::uint64_t m = 0; m < count; ++m) {
        DistancingProfile profile(n);
        std::size_t k = 0;
        for (std::size_t b = 0; b < others.size(); ++b)
            if ((m >> b) & 1U) {
                profile.set(others[b], true);
                ++k;
            }
        const double weight = std::pow(policy.belief, static_cast<double>(k)) *
                              std::pow(1.0 - policy.belief, static_cast<double>(others.size() - k));
        if (weight == 0.0) continue;
        for (bool own : {true, false}) {
            auto full = profile.with(position, own);
            auto p = infection_probabilities(net, full, params);
            double value = expected_u(own, p[position]);
            if (policy.altruism > 0.0)
                for (auto j : others) value += policy.altruism * expected_u(full[j], p[j]);
            (own ? out.distance : out.stay) += weight * value;
        }
    }
    return out;
}

DistancingProfile selected_equilibrium(const Network& net, const GameParams& params, EquilibriumSelection sel) {
    auto eq = enumerate_equilibria(net, params);
    if (!eq.empty()) return sel == EquilibriumSelection::LexSmallest ? eq.front() : eq.back();
    DistancingProfile fallback(net.node_count());
    const auto nobody = DistancingProfile::none(net.node_count());
    for (NodeId v = 0; v < net.node_count(); ++v) fallback.set(v, best_response(net, nobody, v, params));
    return fallback;
}

double distance_probability(const AgentPolicy& policy, const Observation& obs) {
    if (obs.network == nullptr) throw std::invalid_argument("observation has no network");
    switch (policy.kind) {
        case PolicyKind::AlwaysDistance: return 1.0;
        case PolicyKind::NeverDistance: return 0.0;
        case PolicyKind::StaticEquilibrium:
            return selected_equilibrium(*obs.network, obs.params, policy.selection)[obs.position] ? 1.0 : 0.0;
        case PolicyKind::LogitResponse: {
            auto util = logit_utilities(policy, *obs.network, obs.position, obs.params);
            const double z = policy.precision * (util.distance - util.stay);
            return 1.0 / (1.0 + std::exp(-z));
        }
    }
    throw std::invalid_argument("unknown policy kind");
}

Decision policy_decide(const AgentPolicy& policy, const Observation& obs, Rng& rng) {
    const double p = distance_probability(policy, obs);
    if (policy.kind != PolicyKind::LogitResponse) return p >= 0.5 ? Decision::Yes : Decision::No;
    return rng.bernoulli(p) ? Decision::Yes : Decision::No;
}

Decision Agent::decide(const Observation& obs) {
    const auto key = std::make_tuple(obs.position, obs.params.alpha, obs.params.fine);
    auto it = memo_.find(key);
    if (it == memo_.end()) it = memo_.emplace(key, distance_probability(policy_, obs)).first;
    if (policy_.kind != PolicyKind::LogitResponse) return it->second >= 0.5 ? Decision::Yes : Decision::No;
    return rng_.bernoulli(it->second) ? Decision::Yes : Decision::No;
}

}  // namespace sdgame
