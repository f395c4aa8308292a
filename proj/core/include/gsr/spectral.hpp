#ifndef GSR_SPECTRAL_HPP
#define GSR_SPECTRAL_HPP

#include <optional>
#include <utility>
#include <vector>

#include "gsr/shift.hpp"
#include "gsr/types.hpp"

namespace gsr {

/// Eigendecomposition S = V diag(lambda) V^-1 with a deterministic
/// frequency ordering: descending |lambda|; magnitude ties broken by
/// descending argument taken in (-2*pi, 0]; remaining ties by input index.
/// On the directed cycle this reproduces the classical DFT ordering
/// lambda_k = exp(-2*pi*j*k/N).
///
/// Eigenvector columns have unit 2-norm and their first entry of largest
/// magnitude rotated onto the positive real axis.
struct SpectralBasis {
    Matrix V;
    Matrix Vinv;
    Vector eigenvalues;
    double cond_V = 1.0;
    double residual = 0.0;   // ||S - V diag(lambda) Vinv||_F / ||S||_F
    double eig_scale = 0.0;  // max |lambda|

    int n() const { return static_cast<int>(eigenvalues.size()); }

    /// First K eigenvector columns (the active frequency basis).
    Matrix VK(int K) const { return V.leftCols(K); }

    /// Frequency content of the canonical basis vector e_node: how strongly
    /// the node expresses each graph frequency.
    Vector node_spectrum(int node) const { return Vinv.col(node); }

    /// True iff |lambda_K| and |lambda_{K+1}| tie within the equality
    /// threshold, so the choice of the K active frequencies is ambiguous.
    bool bandwidth_tie(int K, double eps = tol::kEigenEqual) const;
};

/// Throws NonDiagonalizable when the eigenvector matrix is numerically
/// singular (sigma_min < 1e-12 * sigma_max) or the reconstruction residual
/// exceeds `residual_tol` relative to ||S||_F.
SpectralBasis decompose(const ShiftOperator& shift, double residual_tol = tol::kEigenResidual);

/// n x m matrix with entry (i, l) = eigenvalues[i]^l, l = 0..m-1.
Matrix vandermonde(const Vector& eigenvalues, int cols);

FrequencySignal gft(const SpectralBasis& basis, const Vector& x);
Vector igft(const SpectralBasis& basis, const Vector& xhat);

/// Equality of eigenvalues at the library-wide relative threshold.
bool eig_equal(Complex a, Complex b, double scale, double eps = tol::kEigenEqual);

/// Counts governing feasibility of the seeding schemes:
///   D  - distinct eigenvalues among the inactive ones (k > K)
///   D1 - repeated-value count among the active ones (k <= K)
///   U1 - zero entries of e-hat(node) among the active frequencies
///   U2 - zero entries of e-hat(node) among the inactive frequencies
///   K_U - inactive indices the node expresses (nonzero e-hat entries)
///   D2 - repeated-value count among eigenvalues indexed by K_U
/// Node-dependent fields require `node`; without it they are zero/empty.
struct SpectrumCensus {
    int D = 0;
    int D1 = 0;
    int D2 = 0;
    int U1 = 0;
    int U2 = 0;
    std::vector<int> K_U;
};

SpectrumCensus spectrum_census(const SpectralBasis& basis, int K,
                               std::optional<int> node = std::nullopt,
                               double eps = tol::kEigenEqual);

/// Condition (i) of the recovery propositions: no active eigenvalue equals
/// an inactive one.
bool condition_i_holds(const SpectralBasis& basis, int K, double eps = tol::kEigenEqual);

/// The offending (active, inactive) index pairs, for diagnostics.
std::vector<std::pair<int, int>> condition_i_collisions(const SpectralBasis& basis, int K,
                                                        double eps = tol::kEigenEqual);

}  // namespace gsr

#endif  // GSR_SPECTRAL_HPP
