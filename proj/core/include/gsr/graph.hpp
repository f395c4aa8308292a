#ifndef GSR_GRAPH_HPP
#define GSR_GRAPH_HPP

#include <vector>

#include "gsr/types.hpp"

namespace gsr {

struct Edge {
    int src = 0;
    int dst = 0;
    double weight = 1.0;
};

/// Weighted graph as an edge list. For undirected graphs each edge is
/// stored once; matrix builders symmetrize.
struct Graph {
    int n = 0;
    bool directed = false;
    std::vector<Edge> edges;

    /// Throws InvalidArgument on out-of-range indices, duplicate edges,
    /// or non-finite weights.
    void validate() const;

    /// Weak connectivity (edge direction ignored).
    bool is_connected() const;

    /// Copy with every edge weight multiplied by `factor`.
    Graph scaled(double factor) const;
};

/// Dense adjacency matrix A with A(j, i) = w for edge (i -> j).
RealMatrix adjacency_matrix(const Graph& g);

/// Combinatorial Laplacian L = D - W. Undirected graphs only.
RealMatrix laplacian_matrix(const Graph& g);

}  // namespace gsr

#endif  // GSR_GRAPH_HPP
