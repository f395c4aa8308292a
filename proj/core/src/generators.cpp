#include "gsr/generators.hpp"

#include "gsr/errors.hpp"

namespace gsr {

Graph gen_er(int n, double p, Rng& rng, bool directed) {
    if (n < 1) throw InvalidArgument("gen_er: n must be >= 1");
    if (p < 0.0 || p > 1.0) throw InvalidArgument("gen_er: p must be in [0, 1]");
    Graph g;
    g.n = n;
    g.directed = directed;
    for (int i = 0; i < n; ++i) {
        for (int j = directed ? 0 : i + 1; j < n; ++j) {
            if (j == i) continue;
            if (rng.uniform() < p) g.edges.push_back({i, j, 1.0});
        }
    }
    return g;
}

Graph gen_cycle(int n) {
    if (n < 1) throw InvalidArgument("gen_cycle: n must be >= 1");
    Graph g;
    g.n = n;
    g.directed = true;
    for (int i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n, 1.0});
    return g;
}

Vector random_bandlimited(const SpectralBasis& basis, int K, Rng& rng, SpectrumLaw law,
                          Vector* xhatK_out) {
    if (K < 1 || K > basis.n()) throw InvalidArgument("random_bandlimited: K out of range");
    (void)law;  // UnitGaussian is the only law
    Vector xhatK(K);
    for (int k = 0; k < K; ++k) xhatK[k] = Complex(rng.normal(), 0.0);
    if (xhatK_out) *xhatK_out = xhatK;
    return basis.V.leftCols(K) * xhatK;
}

}  // namespace gsr
