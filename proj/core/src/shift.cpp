#include "gsr/shift.hpp"

#include <string>

#include <Eigen/Eigenvalues>

#include "gsr/errors.hpp"

namespace gsr {

ShiftOperator build_shift(const Graph& g, ShiftKind kind, std::optional<double> alpha) {
    g.validate();
    ShiftOperator s;
    s.kind = kind;
    s.graph = g;
    switch (kind) {
        case ShiftKind::Adjacency:
            s.matrix = adjacency_matrix(g).cast<Complex>();
            break;
        case ShiftKind::Laplacian:
            s.matrix = laplacian_matrix(g).cast<Complex>();
            break;
        case ShiftKind::NormalizedLaplacianShift: {
            RealMatrix L = laplacian_matrix(g);
            double a;
            if (alpha) {
                a = *alpha;
            } else {
                Eigen::SelfAdjointEigenSolver<RealMatrix> es(L);
                const double lmax = es.eigenvalues().maxCoeff();
                if (lmax <= 0.0)
                    throw InvalidArgument("normalized Laplacian shift needs a nonempty graph");
                a = 1.0 / lmax;
            }
            s.alpha = a;
            s.matrix = (RealMatrix::Identity(g.n, g.n) - a * L).cast<Complex>();
            break;
        }
    }
    if (!s.matrix.allFinite()) throw InvalidArgument("shift matrix has non-finite entries");
    return s;
}

bool ShiftOperator::sparsity_ok(double tolerance) const {
    const int n = size();
    RealMatrix allowed = RealMatrix::Zero(n, n);
    allowed.diagonal().setOnes();
    for (const Edge& e : graph.edges) {
        allowed(e.dst, e.src) = 1.0;
        if (!graph.directed) allowed(e.src, e.dst) = 1.0;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (allowed(j, i) == 0.0 && std::abs(matrix(j, i)) > tolerance) return false;
    return true;
}

const char* shift_kind_name(ShiftKind kind) {
    switch (kind) {
        case ShiftKind::Adjacency: return "adjacency";
        case ShiftKind::Laplacian: return "laplacian";
        case ShiftKind::NormalizedLaplacianShift: return "normalized-laplacian";
    }
    return "adjacency";
}

ShiftKind shift_kind_from_name(const std::string& name) {
    if (name == "adjacency") return ShiftKind::Adjacency;
    if (name == "laplacian") return ShiftKind::Laplacian;
    if (name == "normalized-laplacian") return ShiftKind::NormalizedLaplacianShift;
    throw InvalidArgument("unknown shift kind: " + name);
}

}  // namespace gsr
