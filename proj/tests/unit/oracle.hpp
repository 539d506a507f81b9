#pragma once
// Brute-force reference computations for the tests. Written from the model
// definitions, sharing no code with the library.

#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using EdgeList = std::vector<std::pair<int, int>>;

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void join(int a, int b) { parent[find(a)] = find(b); }
};

// P(target reachable from source) when each edge among open nodes is open
// independently with probability alpha; enumerates every edge subset.
inline double reliability(int n, const EdgeList& edges, const std::vector<bool>& open, int s, int t,
                          double alpha) {
    EdgeList live;
    for (auto [u, v] : edges)
        if (open[u] && open[v]) live.push_back({u, v});
    const int m = static_cast<int>(live.size());
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        UnionFind uf(n);
        double pr = 1.0;
        for (int e = 0; e < m; ++e) {
            if (mask >> e & 1) {
                pr *= alpha;
                uf.join(live[e].first, live[e].second);
            } else {
                pr *= 1.0 - alpha;
            }
        }
        if (uf.find(s) == uf.find(t)) total += pr;
    }
    return total;
}

// Infection probability of every node: patient zero uniform; distancing
// patient zero infected w.p. gamma and never transmits; otherwise spread
// over non-distancing nodes.
inline std::vector<double> infection(int n, const EdgeList& edges, const std::vector<bool>& distancing,
                                     double gamma, double alpha) {
    std::vector<bool> open(n);
    for (int v = 0; v < n; ++v) open[v] = !distancing[v];
    std::vector<double> p(n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (distancing[i]) {
            p[i] = gamma / n;
            continue;
        }
        for (int j = 0; j < n; ++j)
            if (!distancing[j]) p[i] += reliability(n, edges, open, j, i, alpha) / n;
    }
    return p;
}

inline EdgeList complete(int n) {
    EdgeList e;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) e.push_back({u, v});
    return e;
}

inline EdgeList star(int n) {
    EdgeList e;
    for (int v = 1; v < n; ++v) e.push_back({0, v});
    return e;
}

// Expected points: distancing (1 - gamma/n) b - c, else (1 - p) b - f.
inline std::vector<double> payoffs(int n, const EdgeList& edges, const std::vector<bool>& d, double b, double c,
                                   double gamma, double alpha, double f) {
    auto p = infection(n, edges, d, gamma, alpha);
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = (1.0 - p[i]) * b - (d[i] ? c : f);
    return u;
}

}  // namespace oracle
