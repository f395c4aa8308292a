#ifndef GSR_GENERATORS_HPP
#define GSR_GENERATORS_HPP

#include "gsr/graph.hpp"
#include "gsr/rng.hpp"
#include "gsr/spectral.hpp"

namespace gsr {

/// Erdos-Renyi graph: each pair independently with probability p
/// (unordered pairs when undirected, ordered when directed).
Graph gen_er(int n, double p, Rng& rng, bool directed = false);

/// Directed cycle with edges (i, (i+1) mod n).
Graph gen_cycle(int n);

/// Zachary's karate club: 34 nodes, 78 undirected unit-weight edges.
Graph karate();

enum class SpectrumLaw { UnitGaussian };

/// Random K-bandlimited signal x = V_K xhat_K with iid unit-variance real
/// Gaussian spectrum. `xhatK_out`, when given, receives the drawn spectrum.
Vector random_bandlimited(const SpectralBasis& basis, int K, Rng& rng,
                          SpectrumLaw law = SpectrumLaw::UnitGaussian,
                          Vector* xhatK_out = nullptr);

}  // namespace gsr

#endif  // GSR_GENERATORS_HPP
