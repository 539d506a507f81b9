#include "sdgame/network.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sdgame {

namespace {

const char* const kDefaultLabels[] = {"P", "E", "C", "M", "Q"};

}  // namespace

Network::Network(std::size_t node_count, std::vector<Edge> edges,
                 std::vector<std::string> labels)
    : node_count_(node_count), labels_(std::move(labels)) {
    if (node_count == 0) throw std::invalid_argument("network must have at least one node");
    if (!labels_.empty() && labels_.size() != node_count)
        throw std::invalid_argument("label count does not match node count");
    for (auto [u, v] : edges) {
        if (u >= node_count || v >= node_count)
            throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self-loops are not allowed");
        edges_.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw std::invalid_argument("duplicate edge");

    adjacency_.assign(node_count, {});
    for (auto [u, v] : edges_) {
        adjacency_[u].push_back(v);
        adjacency_[v].push_back(u);
    }
    for (auto& row : adjacency_) std::sort(row.begin(), row.end());
}

Network Network::complete(std::size_t n) {
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return Network(n, std::move(edges));
}

Network Network::star(std::size_t n) {
    std::vector<Edge> edges;
    for (NodeId v = 1; v < n; ++v) edges.emplace_back(0, v);
    return Network(n, std::move(edges));
}

Network Network::path(std::size_t n) {
    std::vector<Edge> edges;
    for (NodeId v = 1; v < n; ++v) edges.emplace_back(v - 1, v);
    return Network(n, std::move(edges));
}

bool Network::has_edge(NodeId u, NodeId v) const {
    const auto& row = adjacency_.at(u);
    return std::binary_search(row.begin(), row.end(), v);
}

std::string Network::label(NodeId v) const {
    if (v >= node_count_) throw std::out_of_range("node index out of range");
    if (!labels_.empty()) return labels_[v];
    if (node_count_ <= std::size(kDefaultLabels)) return kDefaultLabels[v];
    return std::to_string(v);
}

bool Network::is_complete() const {
    return edges_.size() == node_count_ * (node_count_ - 1) / 2;
}

std::optional<NodeId> Network::star_hub() const {
    if (node_count_ < 3 || edges_.size() != node_count_ - 1) return std::nullopt;
    for (NodeId v = 0; v < node_count_; ++v)
        if (degree(v) == node_count_ - 1) return v;
    return std::nullopt;
}

std::string Network::kind() const {
    if (node_count_ >= 3 && is_complete()) return "complete";
    if (star_hub()) return "star";
    return "custom";
}

Network Network::permuted(const std::vector<NodeId>& perm) const {
    if (perm.size() != node_count_) throw std::invalid_argument("permutation size mismatch");
    std::vector<Edge> edges;
    edges.reserve(edges_.size());
    for (auto [u, v] : edges_) edges.emplace_back(perm[u], perm[v]);
    std::vector<std::string> labels;
    if (!labels_.empty()) {
        labels.resize(node_count_);
        for (NodeId v = 0; v < node_count_; ++v) labels[perm[v]] = labels_[v];
    }
    return Network(node_count_, std::move(edges), std::move(labels));
}

NodeRole node_role(const Network& net, NodeId v) {
    if (v >= net.node_count()) throw std::out_of_range("node index out of range");
    if (net.node_count() >= 3 && net.is_complete()) return NodeRole::CloseKnit;
    if (auto hub = net.star_hub()) return *hub == v ? NodeRole::Superspreader : NodeRole::Peripheral;
    return NodeRole::Other;
}

std::string to_string(NodeRole role) {
    switch (role) {
        case NodeRole::CloseKnit: return "close-knit";
        case NodeRole::Superspreader: return "superspreader";
        case NodeRole::Peripheral: return "peripheral";
        case NodeRole::Other: return "other";
    }
    return "other";
}

Network network_by_name(const std::string& name, std::size_t n) {
    if (name == "star") return Network::star(n);
    if (name == "complete") return Network::complete(n);
    if (name == "path") return Network::path(n);
    throw std::invalid_argument("unknown network kind '" + name + "'");
}

Network network_from_json(const nlohmann::json& j) {
    if (j.is_string()) return network_by_name(j.get<std::string>());
    if (!j.is_object()) throw std::invalid_argument("network must be a string or an object");
    if (!j.contains("node_count")) {
        if (!j.contains("kind")) throw std::invalid_argument("network needs 'kind' or 'node_count'");
        auto n = j.value("n", std::size_t{5});
        auto net = network_by_name(j.at("kind").get<std::string>(), n);
        if (j.contains("labels"))
            return Network(net.node_count(), net.edges(), j.at("labels").get<std::vector<std::string>>());
        return net;
    }
    auto node_count = j.at("node_count").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw std::invalid_argument("edge must be a pair");
        edges.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
    }
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return Network(node_count, std::move(edges), std::move(labels));
}

nlohmann::json network_to_json(const Network& net) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [u, v] : net.edges()) edges.push_back({u, v});
    nlohmann::json labels = nlohmann::json::array();
    for (NodeId v = 0; v < net.node_count(); ++v) labels.push_back(net.label(v));
    return {{"node_count", net.node_count()}, {"edges", edges}, {"labels", labels}, {"kind", net.kind()}};
}

}  // namespace sdgame
