#ifndef GSR_TYPES_HPP
#define GSR_TYPES_HPP

#include <complex>

#include <Eigen/Dense>

namespace gsr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// A graph signal is one complex value per node. All arithmetic in the
/// library is complex; real inputs are embedded with zero imaginary part.
using GraphSignal = Vector;

/// Frequency-domain representation x̂ = V⁻¹x together with the bandwidth
/// it is (claimed to be) limited to.
struct FrequencySignal {
    Vector coeffs;
    int bandwidth = 0;

    /// True when every coefficient above the bandwidth is negligible
    /// relative to the total energy.
    bool is_bandlimited(double eps = 1e-10) const {
        const int n = static_cast<int>(coeffs.size());
        if (bandwidth >= n) return true;
        const double scale = coeffs.norm();
        return coeffs.tail(n - bandwidth).cwiseAbs().maxCoeff() <= eps * std::max(scale, 1e-300);
    }
};

/// Relative size of the imaginary part of a signal expected to be real.
inline double imag_residue(const Vector& x) {
    const double nx = x.norm();
    if (nx == 0.0) return 0.0;
    return x.imag().norm() / nx;
}

namespace tol {
/// Relative threshold under which two eigenvalues count as equal.
inline constexpr double kEigenEqual = 1e-8;
/// Relative singular-value threshold for numerical rank decisions.
inline constexpr double kRank = 1e-9;
/// Relative residual bound for an accepted eigendecomposition.
inline constexpr double kEigenResidual = 1e-8;
/// Relative annihilation bound for low-pass designs.
inline constexpr double kAnnihilate = 1e-8;
/// Relative error under which a reconstruction counts as perfect.
inline constexpr double kRecovery = 1e-6;
/// Solver condition number above which recovery is not trusted.
inline constexpr double kCondMax = 1e8;
}  // namespace tol

}  // namespace gsr

#endif  // GSR_TYPES_HPP
