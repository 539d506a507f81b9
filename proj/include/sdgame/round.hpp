#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sdgame/game.hpp"
#include "sdgame/network.hpp"
#include "sdgame/rng.hpp"

namespace sdgame {

enum class Decision { Yes, No, Timeout };
enum class Part { Baseline, Intervention };
enum class Intervention { Fine, Nudge };

std::string to_string(Decision d);
std::string to_string(Part p);
std::string to_string(Intervention i);
Decision decision_from_string(const std::string& s);
Part part_from_string(const std::string& s);
Intervention intervention_from_string(const std::string& s);

inline bool distances(Decision d) { return d == Decision::Yes; }

// Experiment protocol constants.
struct ProtocolParams {
    int rounds_per_part = 20;
    int paid_rounds_per_part = 4;
    double timeout_penalty = 200.0;
    int disqualify_after = 3;          // consecutive missed decisions
    int decision_ms = 20'000;
    int review_ms = 15'000;
    int instructions_ms = 0;
    int briefing_ms = 30'000;          // intervention screen
    int history_length = 5;
    double points_per_dollar = 115.0;
    std::int64_t fee_cents = 100;

    int total_rounds() const { return 2 * rounds_per_part; }
    Part part_of(int round) const { return round <= rounds_per_part ? Part::Baseline : Part::Intervention; }
    void validate() const;
    bool operator==(const ProtocolParams&) const = default;
};

nlohmann::json protocol_to_json(const ProtocolParams& p);
ProtocolParams protocol_from_json(const nlohmann::json& j, ProtocolParams defaults = {});

// Uniform random bijection: result[k] is the node occupied by participant k.
std::vector<NodeId> assign_positions(Rng& rng, std::size_t participants, const Network& net);

// One contagion draw over nodes.
struct ContagionDraw {
    NodeId patient_zero = 0;
    std::optional<bool> coin;      // present iff patient zero distanced
    std::vector<bool> infected;    // per node
};

// Patient zero uniform; a distancing patient zero is infected with
// probability gamma, otherwise surely. Spread runs breadth-first from an
// infected non-distancing patient zero, testing each edge to a healthy
// non-distancing neighbour once with probability alpha.
ContagionDraw sample_contagion(Rng& rng, const Network& net, const std::vector<bool>& distancing,
                               double gamma, double alpha);

struct RoundOutcome {
    int round = 0;                     // 1-based
    Part part = Part::Baseline;
    std::vector<NodeId> positions;     // per participant
    std::vector<Decision> decisions;   // per participant
    std::size_t patient_zero = 0;      // participant index
    std::optional<bool> coin;
    std::vector<bool> infected;        // per participant
    std::vector<double> points;        // per participant

    nlohmann::json to_json() const;
    static RoundOutcome from_json(const nlohmann::json& j);
    bool operator==(const RoundOutcome&) const = default;
};

// Points for one participant. `params.fine` is whatever applies in the
// round's part (0 in the baseline and under the nudge).
double score_points(Decision d, bool infected, const GameParams& params, const ProtocolParams& protocol);

// Fills outcome.points.
std::vector<double> score_round(const RoundOutcome& outcome, const GameParams& part_params,
                                const ProtocolParams& protocol);

// Positions are given; draws the contagion and scores it.
RoundOutcome sample_round(Rng& rng, const Network& net, const std::vector<NodeId>& positions,
                          const std::vector<Decision>& decisions, const GameParams& part_params,
                          const ProtocolParams& protocol, int round, Part part);

}  // namespace sdgame
