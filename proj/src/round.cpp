#include "sdgame/round.hpp"

#include <deque>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sdgame {

std::string to_string(Decision d) {
    switch (d) {
        case Decision::Yes: return "Yes";
        case Decision::No: return "No";
        case Decision::Timeout: return "Timeout";
    }
    return "No";
}

std::string to_string(Part p) { return p == Part::Baseline ? "baseline" : "intervention"; }

std::string to_string(Intervention i) { return i == Intervention::Fine ? "fine" : "nudge"; }

Decision decision_from_string(const std::string& s) {
    if (s == "Yes") return Decision::Yes;
    if (s == "No") return Decision::No;
    if (s == "Timeout") return Decision::Timeout;
    throw std::invalid_argument("unknown decision '" + s + "'");
}

Part part_from_string(const std::string& s) {
    if (s == "baseline") return Part::Baseline;
    if (s == "intervention") return Part::Intervention;
    throw std::invalid_argument("unknown part '" + s + "'");
}

Intervention intervention_from_string(const std::string& s) {
    if (s == "fine") return Intervention::Fine;
    if (s == "nudge") return Intervention::Nudge;
    throw std::invalid_argument("unknown intervention '" + s + "'");
}

void ProtocolParams::validate() const {
    if (rounds_per_part < 1) throw std::invalid_argument("rounds_per_part must be positive");
    if (paid_rounds_per_part < 1 || paid_rounds_per_part > rounds_per_part)
        throw std::invalid_argument("paid_rounds_per_part must lie in [1, rounds_per_part]");
    if (timeout_penalty < 0) throw std::invalid_argument("timeout_penalty must be non-negative");
    if (disqualify_after < 1) throw std::invalid_argument("disqualify_after must be positive");
    if (decision_ms < 0 || review_ms < 0 || instructions_ms < 0 || briefing_ms < 0)
        throw std::invalid_argument("timers must be non-negative");
    if (history_length < 0) throw std::invalid_argument("history_length must be non-negative");
    if (!(points_per_dollar > 0)) throw std::invalid_argument("points_per_dollar must be positive");
    if (fee_cents < 0) throw std::invalid_argument("fee must be non-negative");
}

nlohmann::json protocol_to_json(const ProtocolParams& p) {
    return {{"rounds_per_part", p.rounds_per_part},   {"paid_rounds_per_part", p.paid_rounds_per_part},
            {"timeout_penalty", p.timeout_penalty},   {"disqualify_after", p.disqualify_after},
            {"decision_ms", p.decision_ms},           {"review_ms", p.review_ms},
            {"instructions_ms", p.instructions_ms},   {"briefing_ms", p.briefing_ms},
            {"history_length", p.history_length},     {"points_per_dollar", p.points_per_dollar},
            {"fee_cents", p.fee_cents}};
}

ProtocolParams protocol_from_json(const nlohmann::json& j, ProtocolParams p) {
    p.rounds_per_part = j.value("rounds_per_part", p.rounds_per_part);
    p.paid_rounds_per_part = j.value("paid_rounds_per_part", p.paid_rounds_per_part);
    p.timeout_penalty = j.value("timeout_penalty", p.timeout_penalty);
    p.disqualify_after = j.value("disqualify_after", p.disqualify_after);
    p.decision_ms = j.value("decision_ms", p.decision_ms);
    p.review_ms = j.value("review_ms", p.review_ms);
    p.instructions_ms = j.value("instructions_ms", p.instructions_ms);
    p.briefing_ms = j.value("briefing_ms", p.briefing_ms);
    p.history_length = j.value("history_length", p.history_length);
    p.points_per_dollar = j.value("points_per_dollar", p.points_per_dollar);
    p.fee_cents = j.value("fee_cents", p.fee_cents);
    p.validate();
    return p;
}

std::vector<NodeId> assign_positions(Rng& rng, std::size_t participants, const Network& net) {
    if (participants != net.node_count())
        throw std::invalid_argument("participant count must equal node count");
    std::vector<NodeId> pos(participants);
    std::iota(pos.begin(), pos.end(), NodeId{0});
    rng.shuffle(std::span<NodeId>(pos));
    return pos;
}

ContagionDraw sample_contagion(Rng& rng, const Network& net, const std::vector<bool>& distancing, double gamma,
                               double alpha) {
    const auto n = net.node_count();
    if (distancing.size() != n) throw std::invalid_argument("distancing vector length mismatch");
    ContagionDraw draw;
    draw.infected.assign(n, false);
    draw.patient_zero = static_cast<NodeId>(rng.below(n));
    if (distancing[draw.patient_zero]) {
        draw.coin = rng.bernoulli(gamma);
        draw.infected[draw.patient_zero] = *draw.coin;
        return draw;
    }
    draw.infected[draw.patient_zero] = true;
    std::deque<NodeId> frontier{draw.patient_zero};
    while (!frontier.empty()) {
        const auto u = frontier.front();
        frontier.pop_front();
        for (auto v : net.neighbors(u)) {
            if (distancing[v] || draw.infected[v]) continue;
            if (rng.bernoulli(alpha)) {
                draw.infected[v] = true;
                frontier.push_back(v);
            }
        }
    }
    return draw;
}

double score_points(Decision d, bool infected, const GameParams& params, const ProtocolParams& protocol) {
    double points = infected ? 0.0 : params.benefit;
    points -= distances(d) ? params.cost : params.fine;
    if (d == Decision::Timeout) points -= protocol.timeout_penalty;
    return points;
}

std::vector<double> score_round(const RoundOutcome& outcome, const GameParams& part_params,
                                const ProtocolParams& protocol) {
    if (outcome.decisions.size() != outcome.infected.size())
        throw std::invalid_argument("malformed round outcome");
    std::vector<double> points(outcome.decisions.size());
    for (std::size_t k = 0; k < points.size(); ++k)
        points[k] = score_points(outcome.decisions[k], outcome.infected[k], part_params, protocol);
    return points;
}

RoundOutcome sample_round(Rng& rng, const Network& net, const std::vector<NodeId>& positions,
                          const std::vector<Decision>& decisions, const GameParams& part_params,
                          const ProtocolParams& protocol, int round, Part part) {
    const auto n = net.node_count();
    if (positions.size() != n || decisions.size() != n)
        throw std::invalid_argument("one position and one decision per participant required");
    std::vector<bool> distancing(n, false);
    std::vector<std::size_t> occupant(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        distancing[positions[k]] = distances(decisions[k]);
        occupant[positions[k]] = k;
    }
    for (auto who : occupant)
        if (who == n) throw std::invalid_argument("positions are not a bijection onto nodes");

    auto draw = sample_contagion(rng, net, distancing, part_params.gamma, part_params.alpha);
    RoundOutcome out;
    out.round = round;
    out.part = part;
    out.positions = positions;
    out.decisions = decisions;
    out.patient_zero = occupant[draw.patient_zero];
    out.coin = draw.coin;
    out.infected.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.infected[k] = draw.infected[positions[k]];
    out.points = score_round(out, part_params, protocol);
    return out;
}

nlohmann::json RoundOutcome::to_json() const {
    std::vector<std::string> dec;
    for (auto d : decisions) dec.push_back(sdgame::to_string(d));
    return {{"round", round},
            {"part", sdgame::to_string(part)},
            {"positions", positions},
            {"decisions", dec},
            {"patient_zero", patient_zero},
            {"coin", coin ? nlohmann::json(*coin) : nlohmann::json(nullptr)},
            {"infected", infected},
            {"points", points}};
}

RoundOutcome RoundOutcome::from_json(const nlohmann::json& j) {
    RoundOutcome o;
    o.round = j.at("round").get<int>();
    o.part = part_from_string(j.at("part").get<std::string>());
    o.positions = j.at("positions").get<std::vector<NodeId>>();
    for (const auto& d : j.at("decisions")) o.decisions.push_back(decision_from_string(d.get<std::string>()));
    o.patient_zero = j.at("patient_zero").get<std::size_t>();
    if (!j.at("coin").is_null()) o.coin = j.at("coin").get<bool>();
    o.infected = j.at("infected").get<std::vector<bool>>();
    o.points = j.at("points").get<std::vector<double>>();
    return o;
}

}  // namespace sdgame
