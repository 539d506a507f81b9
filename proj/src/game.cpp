#include "sdgame/game.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sdgame {

void GameParams::validate() const {
    if (!(cost > 0.0 && cost < benefit))
        throw std::invalid_argument("game parameters require 0 < c < b");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0, 1)");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("alpha must lie in [0, 1]");
    if (!(fine >= 0.0)) throw std::invalid_argument("fine must be non-negative");
}

GameParams params_from_json(const nlohmann::json& j, GameParams p) {
    p.benefit = j.value("b", p.benefit);
    p.cost = j.value("c", p.cost);
    p.gamma = j.value("gamma", p.gamma);
    p.alpha = j.value("alpha", p.alpha);
    p.fine = j.value("fine", p.fine);
    p.validate();
    return p;
}

nlohmann::json params_to_json(const GameParams& p) {
    return {{"b", p.benefit}, {"c", p.cost}, {"gamma", p.gamma}, {"alpha", p.alpha}, {"fine", p.fine}};
}

DistancingProfile DistancingProfile::of(std::size_t n, std::initializer_list<NodeId> members) {
    DistancingProfile p(n);
    for (auto v : members) p.set(v, true);
    return p;
}

DistancingProfile DistancingProfile::from_mask(std::size_t n, std::uint64_t mask) {
    if (n > 64) throw std::invalid_argument("mask profiles support at most 64 nodes");
    DistancingProfile p(n);
    for (NodeId v = 0; v < n; ++v) p.set(v, (mask >> v) & 1U);
    return p;
}

std::size_t DistancingProfile::count() const {
    return static_cast<std::size_t>(std::count(distancing_.begin(), distancing_.end(), true));
}

std::uint64_t DistancingProfile::mask() const {
    if (size() > 64) throw std::length_error("profile too large for a 64-bit mask");
    std::uint64_t m = 0;
    for (NodeId v = 0; v < size(); ++v)
        if (distancing_[v]) m |= std::uint64_t{1} << v;
    return m;
}

std::vector<NodeId> DistancingProfile::members() const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < size(); ++v)
        if (distancing_[v]) out.push_back(v);
    return out;
}

std::string DistancingProfile::to_string() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (auto v : members()) {
        if (!first) os << ',';
        os << v;
        first = false;
    }
    os << '}';
    return os.str();
}

std::string DistancingProfile::to_string(const Network& net) const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (auto v : members()) {
        if (!first) os << ',';
        os << net.label(v);
        first = false;
    }
    os << '}';
    return os.str();
}

}  // namespace sdgame
