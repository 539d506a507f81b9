#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sdgame/network.hpp"

namespace sdgame {

// Payoff and contagion parameters of one stage game. Defaults are the
// experiment's: b = 100, c = 35, gamma = 0.5, no fine.
struct GameParams {
    double benefit = 100.0;     // b: points for staying healthy
    double cost = 35.0;         // c: cost of distancing
    double gamma = 0.5;         // infection probability of a distancing patient zero
    double alpha = 0.65;        // per-edge contagion rate
    double fine = 0.0;          // f: charged to every non-distancing agent

    // Throws std::invalid_argument on 0 < c < b, gamma in (0,1),
    // alpha in [0,1], fine >= 0 violations.
    void validate() const;

    GameParams with_alpha(double a) const {
        auto p = *this;
        p.alpha = a;
        return p;
    }
    GameParams with_fine(double f) const {
        auto p = *this;
        p.fine = f;
        return p;
    }

    bool operator==(const GameParams&) const = default;
};

GameParams params_from_json(const nlohmann::json& j, GameParams defaults = {});
nlohmann::json params_to_json(const GameParams& p);

// The set S of distancing agents as a fixed-length boolean vector.
class DistancingProfile {
public:
    DistancingProfile() = default;
    explicit DistancingProfile(std::size_t n) : distancing_(n, false) {}
    explicit DistancingProfile(std::vector<bool> distancing) : distancing_(std::move(distancing)) {}

    static DistancingProfile none(std::size_t n) { return DistancingProfile(n); }
    static DistancingProfile all(std::size_t n) { return DistancingProfile(std::vector<bool>(n, true)); }
    static DistancingProfile of(std::size_t n, std::initializer_list<NodeId> members);
    // Bit v of mask set <=> node v distances.
    static DistancingProfile from_mask(std::size_t n, std::uint64_t mask);

    std::size_t size() const { return distancing_.size(); }
    bool operator[](NodeId v) const { return distancing_.at(v); }
    bool distancing(NodeId v) const { return distancing_.at(v); }
    void set(NodeId v, bool d) { distancing_.at(v) = d; }
    DistancingProfile with(NodeId v, bool d) const {
        auto p = *this;
        p.set(v, d);
        return p;
    }
    std::size_t count() const;
    std::uint64_t mask() const;
    std::vector<NodeId> members() const;
    const std::vector<bool>& values() const { return distancing_; }

    // "{0,2,3}" with node indices, or labels when a network is given.
    std::string to_string() const;
    std::string to_string(const Network& net) const;

    bool operator==(const DistancingProfile&) const = default;
    // Lexicographic over nodes 0..n-1 with false < true.
    bool operator<(const DistancingProfile& other) const { return distancing_ < other.distancing_; }

private:
    std::vector<bool> distancing_;
};

}  // namespace sdgame
