#include "gsr/filters.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/SVD>

#include "gsr/errors.hpp"

namespace gsr {

namespace {

/// Phase-normalize so the first entry of largest magnitude is positive real.
void sign_normalize(Vector& h) {
    const double m = h.cwiseAbs().maxCoeff();
    if (m == 0.0) return;
    for (int i = 0; i < h.size(); ++i) {
        if (std::abs(h[i]) >= m * (1.0 - 1e-10)) {
            h *= std::conj(h[i]) / std::abs(h[i]);
            return;
        }
    }
}

std::string collision_message(const SpectralBasis& basis, int K) {
    std::ostringstream msg;
    msg << "condition (i) fails: active/inactive eigenvalue collisions at";
    for (auto [k1, k2] : condition_i_collisions(basis, K))
        msg << " (" << k1 << "," << k2 << ")";
    return msg.str();
}

}  // namespace

FilterDesign design_lowpass_kernel(const SpectralBasis& basis, int K,
                                   bool override_condition_i) {
    const int n = basis.n();
    if (K < 1 || K > n) throw InvalidArgument("design_lowpass_kernel: K out of range");
    if (!override_condition_i && !condition_i_holds(basis, K))
        throw ConditionViolation(collision_message(basis, K));

    FilterDesign f;
    f.mode = FilterMode::KernelLowpass;

    const SpectrumCensus census = spectrum_census(basis, K);
    const int L = census.D + 1;
    const Matrix psi = vandermonde(basis.eigenvalues, L);

    if (K == n) {
        f.coeffs = Vector::Ones(1);
        f.response = psi.col(0);
        f.kernel_gap = std::numeric_limits<double>::infinity();
        return f;
    }

    const Matrix B = psi.bottomRows(n - K);
    Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullV);
    const RealVector sv = svd.singularValues();
    const double smax = sv(0);
    // B has exact rank D and a one-dimensional kernel at L = D + 1. On
    // exponentially graded spectra the singular values decay continuously,
    // so the kernel is identified by the gap at position D rather than by
    // an absolute threshold.
    const int D = census.D;
    const double sigma_rank = sv(D - 1);
    const double sigma_kern = sv.size() > D ? sv(D) : 0.0;
    if (sigma_kern > 1e-6 * sigma_rank) {
        std::ostringstream msg;
        msg << "annihilator kernel is not one-dimensional at L=" << L << ", D=" << D
            << " (gap " << sigma_rank / std::max(sigma_kern, 1e-300)
            << "); singular values:";
        for (int i = 0; i < sv.size(); ++i) msg << " " << sv(i);
        throw KernelDimension(msg.str());
    }

    Vector h = svd.matrixV().col(L - 1);
    sign_normalize(h);
    f.coeffs = h;
    f.response = psi * h;
    f.kernel_gap = sigma_rank / std::max(sigma_kern, 1e-300);

    // Annihilation sanity check, scaled against the system rather than the
    // response: with condition (i) overridden the passband itself may
    // collapse and the response norm is no scale at all.
    const double scale = std::max(f.response.cwiseAbs().maxCoeff(), smax);
    if (f.response.tail(n - K).cwiseAbs().maxCoeff() > tol::kAnnihilate * scale) {
        std::ostringstream msg;
        msg << "kernel design failed to annihilate the inactive band (max residual "
            << f.response.tail(n - K).cwiseAbs().maxCoeff() / scale << ")";
        throw KernelDimension(msg.str());
    }
    return f;
}

std::vector<Vector> lowpass_kernel_basis(const SpectralBasis& basis, int K, int L) {
    const int n = basis.n();
    if (K < 1 || K > n) throw InvalidArgument("lowpass_kernel_basis: K out of range");
    if (L < 1) throw InvalidArgument("lowpass_kernel_basis: L must be positive");
    const Matrix psi = vandermonde(basis.eigenvalues, L);
    std::vector<Vector> out;
    if (K == n) {
        for (int i = 0; i < L; ++i) {
            Vector e = Vector::Zero(L);
            e[i] = 1.0;
            out.push_back(e);
        }
        return out;
    }
    const Matrix B = psi.bottomRows(n - K);
    Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullV);
    // rank of B equals the number of distinct inactive eigenvalues, so the
    // kernel is spanned by the trailing L - D right singular vectors
    const int D = spectrum_census(basis, K).D;
    for (int i = std::max(D, 0); i < L; ++i) {
        Vector h = svd.matrixV().col(i);
        sign_normalize(h);
        out.push_back(h);
    }
    return out;
}

FilterDesign design_annihilating_product(const SpectralBasis& basis,
                                         const std::vector<int>& kill_indices, Complex a0) {
    const int n = basis.n();
    std::vector<int> sorted = kill_indices;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Complex> roots;
    for (int k : sorted) {
        if (k < 0 || k >= n)
            throw InvalidArgument("design_annihilating_product: kill index out of range");
        const Complex v = basis.eigenvalues[k];
        bool dup = false;
        for (const Complex& r : roots)
            if (eig_equal(v, r, basis.eig_scale)) {
                dup = true;
                break;
            }
        if (!dup) roots.push_back(v);
    }

    std::vector<Complex> coeffs = {a0};
    for (const Complex& r : roots) {
        std::vector<Complex> next(coeffs.size() + 1, Complex(0.0, 0.0));
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            next[i] -= r * coeffs[i];
            next[i + 1] += coeffs[i];
        }
        coeffs = std::move(next);
    }

    FilterDesign f;
    f.mode = FilterMode::ProductAnnihilating;
    f.roots = roots;
    f.leading = a0;
    f.coeffs = Eigen::Map<Vector>(coeffs.data(), static_cast<int>(coeffs.size()));
    // evaluate the response in factored form: the annihilated frequencies
    // come out exactly zero, with none of the monomial-basis cancellation
    f.response = Vector::Constant(n, a0);
    for (int k = 0; k < n; ++k)
        for (const Complex& r : roots) f.response[k] *= basis.eigenvalues[k] - r;
    f.coeff_overflow = f.coeffs.cwiseAbs().maxCoeff() > 1e12;
    return f;
}

FilterDesign design_ideal_lowpass(const SpectralBasis& basis, int K) {
    const int n = basis.n();
    if (K < 1 || K > n) throw InvalidArgument("design_ideal_lowpass: K out of range");
    Vector target = Vector::Zero(n);
    target.head(K).setOnes();
    const Matrix psi = vandermonde(basis.eigenvalues, n);
    Vector h = psi.completeOrthogonalDecomposition().solve(target);
    Vector resp = psi * h;
    if ((resp - target).norm() > 1e-8 * std::sqrt(static_cast<double>(K)))
        throw ConditionViolation(
            "ideal low-pass response is inconsistent (repeated eigenvalues straddle the "
            "band edge)");
    FilterDesign f;
    f.mode = FilterMode::Explicit;
    f.coeffs = std::move(h);
    f.response = std::move(resp);
    return f;
}

FilterDesign explicit_filter(const SpectralBasis& basis, const Vector& coeffs) {
    if (coeffs.size() < 1) throw InvalidArgument("explicit_filter: empty coefficients");
    FilterDesign f;
    f.mode = FilterMode::Explicit;
    f.coeffs = coeffs;
    f.response = vandermonde(basis.eigenvalues, f.length()) * coeffs;
    return f;
}

Vector apply_filter_polynomial(const ShiftOperator& shift, const Vector& coeffs,
                               const Vector& x) {
    if (x.size() != shift.size())
        throw InvalidArgument("apply_filter_polynomial: dimension mismatch");
    if (coeffs.size() < 1) throw InvalidArgument("apply_filter_polynomial: empty filter");
    const int L = static_cast<int>(coeffs.size());
    Vector acc = coeffs[L - 1] * x;
    for (int l = L - 2; l >= 0; --l) acc = shift.matrix * acc + coeffs[l] * x;
    return acc;
}

Vector apply_diffusion_rate_filter(const RealMatrix& laplacian,
                                   const std::vector<double>& rates, const Vector& x) {
    if (x.size() != laplacian.rows() || laplacian.rows() != laplacian.cols())
        throw InvalidArgument("apply_diffusion_rate_filter: dimension mismatch");
    Vector z = x;
    for (double a : rates) z -= a * (laplacian * z).eval();
    return z;
}

}  // namespace gsr
