#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sdgame {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

// Undirected, unweighted interaction graph. Edges are stored normalized
// (first < second) and sorted, so two networks with the same edge set
// compare equal regardless of construction order.
class Network {
public:
    Network() = default;
    Network(std::size_t node_count, std::vector<Edge> edges,
            std::vector<std::string> labels = {});

    static Network complete(std::size_t n);
    // Node 0 is the hub.
    static Network star(std::size_t n);
    static Network path(std::size_t n);

    std::size_t node_count() const { return node_count_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<NodeId>& neighbors(NodeId v) const { return adjacency_.at(v); }
    std::size_t degree(NodeId v) const { return adjacency_.at(v).size(); }
    bool has_edge(NodeId u, NodeId v) const;
    std::string label(NodeId v) const;

    // Some name for display/logging: "complete", "star" or "custom".
    std::string kind() const;
    bool is_complete() const;
    std::optional<NodeId> star_hub() const;

    // Relabel: node v of this network becomes node perm[v].
    Network permuted(const std::vector<NodeId>& perm) const;

    bool operator==(const Network& other) const {
        return node_count_ == other.node_count_ && edges_ == other.edges_;
    }

private:
    std::size_t node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::string> labels_;
    std::vector<std::vector<NodeId>> adjacency_;
};

enum class NodeRole { CloseKnit, Superspreader, Peripheral, Other };

// Roles exist only for complete graphs and stars (n >= 3); anything else
// is Other.
NodeRole node_role(const Network& net, NodeId v);
std::string to_string(NodeRole role);

// Accepts {"kind": "star"|"complete"|"path", "n": 5} or
// {"node_count": n, "edges": [[u,v],...], "labels": [...]}.
// A bare string "star"/"complete" means n = 5.
Network network_from_json(const nlohmann::json& j);
nlohmann::json network_to_json(const Network& net);

Network network_by_name(const std::string& name, std::size_t n = 5);

}  // namespace sdgame
