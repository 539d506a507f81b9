#pragma once

#include <cstdint>
#include <vector>

#include "sdgame/game.hpp"
#include "sdgame/network.hpp"

namespace sdgame {

// Exact contagion probabilities by enumerating every open/closed
// assignment of the edges among non-distancing nodes. Networks whose
// participating subgraph has more than this many edges are refused.
inline constexpr std::size_t kMaxParticipatingEdges = 20;
inline constexpr std::size_t kMaxExactNodes = 64;

// Probability that `target` is reachable from `source` when each edge with
// both endpoints in `open_nodes` is independently open with probability
// `alpha`. Throws std::domain_error if source or target is not open.
double two_terminal_reliability(const Network& net, const std::vector<bool>& open_nodes,
                                NodeId source, NodeId target, double alpha);

// p_{i|S}: gamma/n for a distancing agent, otherwise
// (1/n) * sum over non-distancing j of reliability(j -> i).
double infection_probability(const Network& net, const DistancingProfile& profile, NodeId i,
                             const GameParams& params);

// All p_{i|S} from a single enumeration pass.
std::vector<double> infection_probabilities(const Network& net, const DistancingProfile& profile,
                                            const GameParams& params);

struct OutcomeEntry {
    std::vector<bool> infected;
    double probability = 0.0;
};

// Exact law of the final infection set, marginalizing over patient zero,
// the gamma coin and the edge openings. Entries are sorted by infection
// set (lexicographic, node 0 first) and have strictly positive mass.
struct OutcomeDistribution {
    std::vector<OutcomeEntry> entries;

    double total_probability() const;
    double marginal(NodeId i) const;
    // Mass on the given infection set (0 if absent).
    double probability_of(const std::vector<bool>& infected) const;
};

OutcomeDistribution outcome_distribution(const Network& net, const DistancingProfile& profile,
                                         const GameParams& params);

// Expected points of agent i: (1 - gamma/n) b - c when distancing,
// (1 - p_{i|S}) b - f otherwise.
double expected_payoff(const Network& net, const DistancingProfile& profile, NodeId i,
                       const GameParams& params);
std::vector<double> expected_payoffs(const Network& net, const DistancingProfile& profile,
                                     const GameParams& params);
double welfare(const Network& net, const DistancingProfile& profile, const GameParams& params);

}  // namespace sdgame
