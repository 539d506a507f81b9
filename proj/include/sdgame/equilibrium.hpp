#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sdgame/contagion.hpp"
#include "sdgame/game.hpp"
#include "sdgame/network.hpp"

namespace sdgame {

inline constexpr std::size_t kMaxSolverNodes = 20;
// Absolute tolerance for welfare ties and payoff indifference (points).
inline constexpr double kPayoffTolerance = 1e-9;

// Payoffs of agent i from distancing and from not distancing, holding the
// other agents' choices in `others` fixed (the entry for i is ignored).
struct DeviationPayoffs {
    double distance = 0.0;
    double stay = 0.0;
};
DeviationPayoffs deviation_payoffs(const Network& net, const DistancingProfile& others, NodeId i,
                                   const GameParams& params);

// True iff distancing is a best response for i. Indifference resolves
// toward distancing.
bool best_response(const Network& net, const DistancingProfile& others, NodeId i,
                   const GameParams& params);

// No agent has a unilateral deviation gaining more than kPayoffTolerance.
bool is_equilibrium(const Network& net, const DistancingProfile& profile, const GameParams& params);

// Every pure Nash equilibrium, in lexicographic profile order.
std::vector<DistancingProfile> enumerate_equilibria(const Network& net, const GameParams& params);

// Every welfare maximizer (ties within kPayoffTolerance), lexicographic.
std::vector<DistancingProfile> enumerate_efficient(const Network& net, const GameParams& params);

struct ProfileWelfare {
    DistancingProfile profile;
    double welfare = 0.0;
};

struct EquilibriumReport {
    Network network;
    GameParams params;
    std::vector<DistancingProfile> equilibria;
    std::vector<DistancingProfile> efficient;
    std::vector<ProfileWelfare> welfare;  // all 2^n profiles, mask order
    double max_welfare = 0.0;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

EquilibriumReport solve(const Network& net, const GameParams& params);

// Describes a profile by the roles of its members, e.g. "none", "S",
// "3P", "S+2P", "4C"; for role-less networks the node labels are used.
std::string role_pattern(const Network& net, const DistancingProfile& profile);

struct NamedNetwork {
    std::string name;
    Network network;
};

struct RegionCell {
    std::vector<DistancingProfile> equilibria;
    std::vector<DistancingProfile> efficient;
    double max_welfare = 0.0;

    // Sorted, de-duplicated role patterns joined by ';' ("none" if empty set
    // is the sole member, "-" if there are no profiles at all).
    std::string equilibrium_summary(const Network& net) const;
    std::string efficient_summary(const Network& net) const;
};

struct RegionBoundary {
    std::string network;
    std::string kind;  // "equilibrium" or "efficient"
    double alpha = 0.0;  // midpoint between the two grid points
    double lower = 0.0;
    double upper = 0.0;
    std::string before;
    std::string after;
};

struct RegionTable {
    std::vector<double> alphas;
    std::vector<NamedNetwork> networks;
    GameParams params;  // template; alpha varies along the grid
    // cells[k][a]: network k at grid point a.
    std::vector<std::vector<RegionCell>> cells;
    std::vector<RegionBoundary> boundaries;

    // First grid alpha whose equilibrium set contains a profile with this
    // role pattern, if any.
    std::optional<double> first_alpha_with_equilibrium(const std::string& network,
                                                       const std::string& pattern) const;
    // Midpoint boundary at which the pattern first enters the equilibrium set.
    std::optional<double> equilibrium_entry_boundary(const std::string& network,
                                                     const std::string& pattern) const;

    std::string to_csv() const;
    nlohmann::json to_json() const;
    // Distancer count on the vertical axis, alpha on the horizontal, one
    // panel per network: 'E' equilibrium, 'O' efficient, '*' both.
    std::string to_ascii_chart(std::size_t columns = 41) const;
};

// Uniform grid from 0 to 1 inclusive.
std::vector<double> alpha_grid(double step);

// Throws std::domain_error on an empty grid or one that is not strictly
// increasing inside [0, 1].
RegionTable sweep_alpha(const std::vector<NamedNetwork>& networks, const GameParams& params,
                        const std::vector<double>& grid, unsigned threads = 0);
RegionTable sweep_alpha(const Network& net, const GameParams& params, const std::vector<double>& grid);

}  // namespace sdgame
