#include "gsr/graph.hpp"

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "gsr/errors.hpp"

namespace gsr {

void Graph::validate() const {
    if (n <= 0) throw InvalidArgument("graph must have at least one node");
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : edges) {
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
            throw InvalidArgument("edge (" + std::to_string(e.src) + "," +
                                  std::to_string(e.dst) + ") out of range for n=" +
                                  std::to_string(n));
        if (!std::isfinite(e.weight))
            throw InvalidArgument("non-finite weight on edge (" + std::to_string(e.src) +
                                  "," + std::to_string(e.dst) + ")");
        auto key = std::make_pair(e.src, e.dst);
        auto rkey = std::make_pair(e.dst, e.src);
        if (seen.count(key) || (!directed && seen.count(rkey)))
            throw InvalidArgument("duplicate edge (" + std::to_string(e.src) + "," +
                                  std::to_string(e.dst) + ")");
        seen.insert(key);
    }
}

bool Graph::is_connected() const {
    if (n <= 0) return false;
    std::vector<std::vector<int>> adj(n);
    for (const Edge& e : edges) {
        adj[e.src].push_back(e.dst);
        adj[e.dst].push_back(e.src);
    }
    std::vector<char> seen(n, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n;
}

Graph Graph::scaled(double factor) const {
    Graph g = *this;
    for (Edge& e : g.edges) e.weight *= factor;
    return g;
}

RealMatrix adjacency_matrix(const Graph& g) {
    RealMatrix A = RealMatrix::Zero(g.n, g.n);
    for (const Edge& e : g.edges) {
        A(e.dst, e.src) = e.weight;
        if (!g.directed) A(e.src, e.dst) = e.weight;
    }
    return A;
}

RealMatrix laplacian_matrix(const Graph& g) {
    if (g.directed) throw InvalidArgument("Laplacian requires an undirected graph");
    RealMatrix A = adjacency_matrix(g);
    RealMatrix L = -A;
    L.diagonal() += A.rowwise().sum();
    return L;
}

}  // namespace gsr
