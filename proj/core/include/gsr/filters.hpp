#ifndef GSR_FILTERS_HPP
#define GSR_FILTERS_HPP

#include <vector>

#include "gsr/spectral.hpp"
#include "gsr/types.hpp"

namespace gsr {

enum class FilterMode { KernelLowpass, ProductAnnihilating, Explicit };

/// A graph filter H = sum_l h_l S^l described by its coefficients and its
/// frequency response hhat = Psi h (one value per graph frequency).
struct FilterDesign {
    Vector coeffs;    // h, ascending powers of S
    Vector response;  // hhat over all n frequencies
    FilterMode mode = FilterMode::Explicit;

    /// ProductAnnihilating only: annihilated eigenvalues in application
    /// order, and the leading factor a0 of a0 * prod (S - root * I).
    std::vector<Complex> roots;
    Complex leading = 1.0;

    /// KernelLowpass diagnostics: ratio of the second-smallest to smallest
    /// singular value of the annihilator system (large = well-isolated
    /// kernel), and a warning flag for coefficient blow-up.
    double kernel_gap = 0.0;
    bool coeff_overflow = false;

    int length() const { return static_cast<int>(coeffs.size()); }
    int degree() const { return length() - 1; }
};

/// Annihilating low-pass design of bandwidth K: with
/// L = D + 1 taps, h is the unit-norm kernel vector of the inactive-row
/// Vandermonde system, so the response vanishes on every frequency k > K.
///
/// Throws ConditionViolation when an active eigenvalue collides with an
/// inactive one (unless `override_condition_i`), and KernelDimension when
/// the numerical kernel is not one-dimensional.
FilterDesign design_lowpass_kernel(const SpectralBasis& basis, int K,
                                   bool override_condition_i = false);

/// Full numerical kernel basis of the inactive-row Vandermonde system with
/// L columns (L > D gives an (L - D)-dimensional kernel; any element is a
/// valid annihilator).
std::vector<Vector> lowpass_kernel_basis(const SpectralBasis& basis, int K, int L);

/// Product-form filter a0 * prod_{k in kill} (S - lambda_k I), applied as
/// successive annihilation. Repeated eigenvalues in the kill set are
/// collapsed to one factor per distinct value.
FilterDesign design_annihilating_product(const SpectralBasis& basis,
                                         const std::vector<int>& kill_indices,
                                         Complex a0 = Complex(1.0, 0.0));

/// Filter with ideal response (1 on the K active frequencies, 0 elsewhere),
/// realized by interpolation on the full spectrum. Requires the response to
/// be consistent (repeated eigenvalues must not straddle the band edge).
FilterDesign design_ideal_lowpass(const SpectralBasis& basis, int K);

/// Filter from explicitly given coefficients.
FilterDesign explicit_filter(const SpectralBasis& basis, const Vector& coeffs);

/// Applies sum_l h_l S^l x by L-1 successive shift applications (Horner);
/// never forms S^l.
Vector apply_filter_polynomial(const ShiftOperator& shift, const Vector& coeffs,
                               const Vector& x);

/// Applies prod_l (I - alpha_l L) x, one diffusion step per rate. With
/// alpha_l = 1/lambda_{k_l}(L) each step annihilates one Laplacian frequency.
Vector apply_diffusion_rate_filter(const RealMatrix& laplacian,
                                   const std::vector<double>& rates, const Vector& x);

}  // namespace gsr

#endif  // GSR_FILTERS_HPP
