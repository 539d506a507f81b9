#include "sdgame/contagion.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sdgame {

namespace {

using NodeMask = std::uint64_t;

void check_profile(const Network& net, const DistancingProfile& profile) {
    if (profile.size() != net.node_count())
        throw std::invalid_argument("profile length does not match node count");
}

void check_node(const Network& net, NodeId v) {
    if (v >= net.node_count()) throw std::out_of_range("node index out of range");
}

// The edges of the subgraph induced by `open` and the probability weight
// of every open-edge subset.
class PercolationSpace {
public:
    PercolationSpace(const Network& net, NodeMask open, double alpha) : node_count_(net.node_count()) {
        if (node_count_ > kMaxExactNodes)
            throw std::length_error("exact contagion supports at most 64 nodes");
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
        for (auto [u, v] : net.edges())
            if (((open >> u) & 1U) && ((open >> v) & 1U)) edges_.emplace_back(u, v);
        if (edges_.size() > kMaxParticipatingEdges)
            throw std::length_error("exact contagion refuses " + std::to_string(edges_.size()) +
                                    " participating edges (limit " +
                                    std::to_string(kMaxParticipatingEdges) + ")");
        const auto m = edges_.size();
        open_pow_.resize(m + 1);
        closed_pow_.resize(m + 1);
        open_pow_[0] = closed_pow_[0] = 1.0;
        for (std::size_t k = 1; k <= m; ++k) {
            open_pow_[k] = open_pow_[k - 1] * alpha;
            closed_pow_[k] = closed_pow_[k - 1] * (1.0 - alpha);
        }
    }

    std::size_t subset_count() const { return std::size_t{1} << edges_.size(); }

    double weight(std::uint32_t subset) const {
        const auto k = static_cast<std::size_t>(std::popcount(subset));
        return open_pow_[k] * closed_pow_[edges_.size() - k];
    }

    // Component root per node for the given open-edge subset.
    void components(std::uint32_t subset, std::vector<NodeId>& root) const {
        root.resize(node_count_);
        std::iota(root.begin(), root.end(), NodeId{0});
        auto find = [&root](NodeId v) {
            while (root[v] != v) v = root[v] = root[root[v]];
            return v;
        };
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            if (!((subset >> e) & 1U)) continue;
            auto a = find(edges_[e].first);
            auto b = find(edges_[e].second);
            if (a != b) root[std::max(a, b)] = std::min(a, b);
        }
        for (NodeId v = 0; v < node_count_; ++v) root[v] = find(v);
    }

    // Calls visit(weight, root) for every open-edge subset of positive mass.
    template <class Visit>
    void for_each(Visit&& visit) const {
        std::vector<NodeId> root;
        for (std::uint32_t s = 0; s < subset_count(); ++s) {
            const double w = weight(s);
            if (w == 0.0) continue;
            components(s, root);
            visit(w, root);
        }
    }

private:
    std::size_t node_count_;
    std::vector<Edge> edges_;
    std::vector<double> open_pow_;
    std::vector<double> closed_pow_;
};

NodeMask open_mask_of(const DistancingProfile& profile) {
    NodeMask m = 0;
    for (NodeId v = 0; v < profile.size(); ++v)
        if (!profile[v]) m |= NodeMask{1} << v;
    return m;
}

}  // namespace

double two_terminal_reliability(const Network& net, const std::vector<bool>& open_nodes,
                                NodeId source, NodeId target, double alpha) {
    if (open_nodes.size() != net.node_count())
        throw std::invalid_argument("open-node set length does not match node count");
    check_node(net, source);
    check_node(net, target);
    if (!open_nodes[source] || !open_nodes[target])
        throw std::domain_error("source and target must both be open nodes");
    if (source == target) return 1.0;
    if (net.node_count() > kMaxExactNodes)
        throw std::length_error("exact contagion supports at most 64 nodes");

    NodeMask open = 0;
    for (NodeId v = 0; v < net.node_count(); ++v)
        if (open_nodes[v]) open |= NodeMask{1} << v;
    PercolationSpace space(net, open, alpha);
    double total = 0.0;
    space.for_each([&](double w, const std::vector<NodeId>& root) {
        if (root[source] == root[target]) total += w;
    });
    return std::clamp(total, 0.0, 1.0);
}

std::vector<double> infection_probabilities(const Network& net, const DistancingProfile& profile,
                                            const GameParams& params) {
    check_profile(net, profile);
    const auto n = net.node_count();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> p(n, 0.0);
    PercolationSpace space(net, open_mask_of(profile), params.alpha);

    // For a non-distancing i, sum_j reliability(j, i) is the expected size
    // of i's open component.
    std::vector<std::size_t> size(n);
    space.for_each([&](double w, const std::vector<NodeId>& root) {
        std::fill(size.begin(), size.end(), 0);
        for (NodeId v = 0; v < n; ++v)
            if (!profile[v]) ++size[root[v]];
        for (NodeId v = 0; v < n; ++v)
            if (!profile[v]) p[v] += w * static_cast<double>(size[root[v]]);
    });
    for (NodeId v = 0; v < n; ++v)
        p[v] = profile[v] ? params.gamma / static_cast<double>(n) : std::clamp(p[v] * inv_n, 0.0, 1.0);
    return p;
}

double infection_probability(const Network& net, const DistancingProfile& profile, NodeId i,
                             const GameParams& params) {
    check_profile(net, profile);
    check_node(net, i);
    if (profile[i]) return params.gamma / static_cast<double>(net.node_count());
    return infection_probabilities(net, profile, params)[i];
}

OutcomeDistribution outcome_distribution(const Network& net, const DistancingProfile& profile,
                                         const GameParams& params) {
    check_profile(net, profile);
    const auto n = net.node_count();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::map<NodeMask, double> mass;

    for (NodeId j = 0; j < n; ++j) {
        if (!profile[j]) continue;
        mass[NodeMask{1} << j] += params.gamma * inv_n;
        mass[0] += (1.0 - params.gamma) * inv_n;
    }

    PercolationSpace space(net, open_mask_of(profile), params.alpha);
    std::vector<NodeMask> component(n);
    space.for_each([&](double w, const std::vector<NodeId>& root) {
        std::fill(component.begin(), component.end(), 0);
        for (NodeId v = 0; v < n; ++v)
            if (!profile[v]) component[root[v]] |= NodeMask{1} << v;
        for (NodeId j = 0; j < n; ++j)
            if (!profile[j]) mass[component[root[j]]] += w * inv_n;
    });

    OutcomeDistribution dist;
    for (auto [m, prob] : mass) {
        if (prob <= 0.0) continue;
        OutcomeEntry e;
        e.infected.resize(n);
        for (NodeId v = 0; v < n; ++v) e.infected[v] = (m >> v) & 1U;
        e.probability = prob;
        dist.entries.push_back(std::move(e));
    }
    std::sort(dist.entries.begin(), dist.entries.end(),
              [](const OutcomeEntry& a, const OutcomeEntry& b) { return a.infected < b.infected; });
    return dist;
}

double OutcomeDistribution::total_probability() const {
    double t = 0.0;
    for (const auto& e : entries) t += e.probability;
    return t;
}

double OutcomeDistribution::marginal(NodeId i) const {
    double t = 0.0;
    for (const auto& e : entries)
        if (e.infected.at(i)) t += e.probability;
    return t;
}

double OutcomeDistribution::probability_of(const std::vector<bool>& infected) const {
    for (const auto& e : entries)
        if (e.infected == infected) return e.probability;
    return 0.0;
}

std::vector<double> expected_payoffs(const Network& net, const DistancingProfile& profile,
                                     const GameParams& params) {
    auto p = infection_probabilities(net, profile, params);
    std::vector<double> payoff(p.size());
    for (NodeId v = 0; v < p.size(); ++v)
        payoff[v] = profile[v] ? (1.0 - p[v]) * params.benefit - params.cost
                               : (1.0 - p[v]) * params.benefit - params.fine;
    return payoff;
}

double expected_payoff(const Network& net, const DistancingProfile& profile, NodeId i,
                       const GameParams& params) {
    check_profile(net, profile);
    check_node(net, i);
    const double p = infection_probability(net, profile, i, params);
    return profile[i] ? (1.0 - p) * params.benefit - params.cost : (1.0 - p) * params.benefit - params.fine;
}

double welfare(const Network& net, const DistancingProfile& profile, const GameParams& params) {
    auto payoff = expected_payoffs(net, profile, params);
    return std::accumulate(payoff.begin(), payoff.end(), 0.0);
}

}  // namespace sdgame
