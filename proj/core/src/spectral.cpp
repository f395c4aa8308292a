#include "gsr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "gsr/errors.hpp"

namespace gsr {

namespace {

constexpr double kArgSnap = 1e-9;   // treat arguments this close to 0 as 0
constexpr double kPi2 = 6.283185307179586476925287;

/// Argument mapped into (-2*pi, 0]: zero for positive-real values, then
/// decreasing clockwise around the circle. Orders the directed-cycle
/// spectrum as exp(-2*pi*j*k/N), k = 0..N-1.
double mapped_arg(Complex z) {
    double a = std::arg(z);
    if (std::abs(a) <= kArgSnap) return 0.0;
    if (a > 0.0) a -= kPi2;
    return a;
}

/// Deterministic frequency order: descending |lambda| with magnitude ties
/// chained at eps * scale, ties by descending mapped argument, then index.
std::vector<int> frequency_order(const Vector& lam, double eps_rel) {
    const int n = static_cast<int>(lam.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    RealVector mag = lam.cwiseAbs();
    const double scale = std::max(mag.maxCoeff(), 1e-300);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (mag[a] != mag[b]) return mag[a] > mag[b];
        return a < b;
    });
    std::vector<int> out;
    out.reserve(n);
    std::size_t g0 = 0;
    for (std::size_t i = 1; i <= idx.size(); ++i) {
        const bool close = i < idx.size() && (mag[idx[i - 1]] - mag[idx[i]]) <= eps_rel * scale;
        if (close) continue;
        std::vector<int> group(idx.begin() + g0, idx.begin() + i);
        std::stable_sort(group.begin(), group.end(), [&](int a, int b) {
            const double aa = mapped_arg(lam[a]);
            const double ab = mapped_arg(lam[b]);
            if (aa != ab) return aa > ab;
            return a < b;
        });
        out.insert(out.end(), group.begin(), group.end());
        g0 = i;
    }
    return out;
}

/// Unit-norm columns with the first entry of largest magnitude rotated
/// onto the positive real axis.
void normalize_columns(Matrix& V) {
    for (int k = 0; k < V.cols(); ++k) {
        double nrm = V.col(k).norm();
        if (nrm > 0.0) V.col(k) /= nrm;
        const double m = V.col(k).cwiseAbs().maxCoeff();
        if (m == 0.0) continue;
        int pivot = 0;
        for (int i = 0; i < V.rows(); ++i) {
            if (std::abs(V(i, k)) >= m * (1.0 - 1e-10)) {
                pivot = i;
                break;
            }
        }
        const Complex p = V(pivot, k);
        if (std::abs(p) > 0.0) V.col(k) *= std::conj(p) / std::abs(p);
    }
}

bool is_real_matrix(const Matrix& M) {
    return M.imag().cwiseAbs().maxCoeff() == 0.0;
}

bool is_hermitian(const Matrix& M) {
    const double scale = std::max(M.cwiseAbs().maxCoeff(), 1e-300);
    return (M - M.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * scale;
}

}  // namespace

bool SpectralBasis::bandwidth_tie(int K, double eps) const {
    if (K <= 0 || K >= n()) return false;
    return std::abs(std::abs(eigenvalues[K - 1]) - std::abs(eigenvalues[K])) <=
           eps * std::max(eig_scale, 1e-300);
}

SpectralBasis decompose(const ShiftOperator& shift, double residual_tol) {
    const Matrix& S = shift.matrix;
    if (!S.allFinite()) throw InvalidArgument("shift matrix has non-finite entries");
    const int n = shift.size();

    Vector lam(n);
    Matrix V(n, n);
    bool orthonormal = false;
    if (is_real_matrix(S) && is_hermitian(S)) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(S.real());
        lam = es.eigenvalues().cast<Complex>();
        V = es.eigenvectors().cast<Complex>();
        orthonormal = true;
    } else if (is_real_matrix(S)) {
        Eigen::EigenSolver<RealMatrix> es(S.real());
        if (es.info() != Eigen::Success) throw NonDiagonalizable("eigensolver failed");
        lam = es.eigenvalues();
        V = es.eigenvectors();
    } else {
        Eigen::ComplexEigenSolver<Matrix> es(S);
        if (es.info() != Eigen::Success) throw NonDiagonalizable("eigensolver failed");
        lam = es.eigenvalues();
        V = es.eigenvectors();
    }

    const std::vector<int> order = frequency_order(lam, tol::kEigenEqual);
    Vector lam_sorted(n);
    Matrix V_sorted(n, n);
    for (int k = 0; k < n; ++k) {
        lam_sorted[k] = lam[order[k]];
        V_sorted.col(k) = V.col(order[k]);
    }
    normalize_columns(V_sorted);

    SpectralBasis basis;
    basis.eigenvalues = std::move(lam_sorted);
    basis.V = std::move(V_sorted);
    basis.eig_scale = basis.eigenvalues.cwiseAbs().maxCoeff();

    if (orthonormal) {
        basis.Vinv = basis.V.adjoint();
        basis.cond_V = 1.0;
    } else {
        Eigen::BDCSVD<Matrix> svd(basis.V);
        const double smax = svd.singularValues()(0);
        const double smin = svd.singularValues()(n - 1);
        if (smin < 1e-12 * smax) {
            std::ostringstream msg;
            msg << "shift is not diagonalizable: eigenvector matrix singular "
                << "(sigma_min/sigma_max = " << (smax > 0 ? smin / smax : 0.0) << ")";
            throw NonDiagonalizable(msg.str());
        }
        basis.cond_V = smax / smin;
        basis.Vinv = basis.V.colPivHouseholderQr().solve(Matrix::Identity(n, n));
    }

    const double s_norm = S.norm();
    const double diff =
        (S - basis.V * basis.eigenvalues.asDiagonal() * basis.Vinv).norm();
    basis.residual = s_norm > 0.0 ? diff / s_norm : diff;
    if (basis.residual > residual_tol) {
        std::ostringstream msg;
        msg << "shift is not diagonalizable: reconstruction residual " << basis.residual
            << " exceeds " << residual_tol;
        throw NonDiagonalizable(msg.str());
    }
    return basis;
}

Matrix vandermonde(const Vector& eigenvalues, int cols) {
    if (cols < 1) throw InvalidArgument("vandermonde needs at least one column");
    const int n = static_cast<int>(eigenvalues.size());
    Matrix psi(n, cols);
    psi.col(0).setOnes();
    for (int l = 1; l < cols; ++l)
        psi.col(l) = psi.col(l - 1).cwiseProduct(eigenvalues);
    return psi;
}

FrequencySignal gft(const SpectralBasis& basis, const Vector& x) {
    if (x.size() != basis.n()) throw InvalidArgument("gft: dimension mismatch");
    return FrequencySignal{basis.Vinv * x, basis.n()};
}

Vector igft(const SpectralBasis& basis, const Vector& xhat) {
    if (xhat.size() != basis.n()) throw InvalidArgument("igft: dimension mismatch");
    return basis.V * xhat;
}

bool eig_equal(Complex a, Complex b, double scale, double eps) {
    return std::abs(a - b) <= eps * std::max(scale, 1e-300);
}

namespace {

/// Number of distinct values (at eps-equality) in lam[first..last).
int count_distinct(const Vector& lam, const std::vector<int>& indices, double scale,
                   double eps) {
    std::vector<Complex> reps;
    for (int k : indices) {
        bool found = false;
        for (const Complex& r : reps)
            if (eig_equal(lam[k], r, scale, eps)) {
                found = true;
                break;
            }
        if (!found) reps.push_back(lam[k]);
    }
    return static_cast<int>(reps.size());
}

}  // namespace

SpectrumCensus spectrum_census(const SpectralBasis& basis, int K, std::optional<int> node,
                               double eps) {
    const int n = basis.n();
    if (K < 1 || K > n) throw InvalidArgument("spectrum_census: K out of range");
    SpectrumCensus c;
    std::vector<int> active, inactive;
    for (int k = 0; k < K; ++k) active.push_back(k);
    for (int k = K; k < n; ++k) inactive.push_back(k);
    c.D = count_distinct(basis.eigenvalues, inactive, basis.eig_scale, eps);
    c.D1 = K - count_distinct(basis.eigenvalues, active, basis.eig_scale, eps);
    if (node) {
        if (*node < 0 || *node >= n) throw InvalidArgument("spectrum_census: node out of range");
        const Vector ehat = basis.node_spectrum(*node);
        const double scale = std::max(ehat.norm(), 1e-300);
        for (int k = 0; k < K; ++k)
            if (std::abs(ehat[k]) <= eps * scale) ++c.U1;
        for (int k = K; k < n; ++k) {
            if (std::abs(ehat[k]) <= eps * scale)
                ++c.U2;
            else
                c.K_U.push_back(k);
        }
        c.D2 = static_cast<int>(c.K_U.size()) -
               count_distinct(basis.eigenvalues, c.K_U, basis.eig_scale, eps);
    }
    return c;
}

std::vector<std::pair<int, int>> condition_i_collisions(const SpectralBasis& basis, int K,
                                                        double eps) {
    std::vector<std::pair<int, int>> out;
    const int n = basis.n();
    for (int k1 = 0; k1 < K; ++k1)
        for (int k2 = K; k2 < n; ++k2)
            if (eig_equal(basis.eigenvalues[k1], basis.eigenvalues[k2], basis.eig_scale, eps))
                out.emplace_back(k1, k2);
    return out;
}

bool condition_i_holds(const SpectralBasis& basis, int K, double eps) {
    return condition_i_collisions(basis, K, eps).empty();
}

}  // namespace gsr
