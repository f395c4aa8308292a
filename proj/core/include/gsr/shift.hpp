#ifndef GSR_SHIFT_HPP
#define GSR_SHIFT_HPP

#include <optional>

#include "gsr/graph.hpp"
#include "gsr/types.hpp"

namespace gsr {

enum class ShiftKind {
    Adjacency,
    Laplacian,
    /// S = I - alpha * L; with alpha omitted, alpha = 1 / lambda_max(L).
    NormalizedLaplacianShift,
};

/// Graph-shift operator: a matrix whose off-diagonal entry (j, i) can be
/// nonzero only if (i, j) is an edge, so one application is a one-hop
/// local operation.
struct ShiftOperator {
    Matrix matrix;
    ShiftKind kind = ShiftKind::Adjacency;
    Graph graph;
    double alpha = 0.0;  // only meaningful for NormalizedLaplacianShift

    int size() const { return static_cast<int>(matrix.rows()); }

    /// Checks the sparsity invariant against the graph's edge set.
    bool sparsity_ok(double tol = 0.0) const;
};

/// Builds the requested shift. Laplacian kinds require an undirected graph.
ShiftOperator build_shift(const Graph& g, ShiftKind kind,
                          std::optional<double> alpha = std::nullopt);

const char* shift_kind_name(ShiftKind kind);
ShiftKind shift_kind_from_name(const std::string& name);

}  // namespace gsr

#endif  // GSR_SHIFT_HPP
