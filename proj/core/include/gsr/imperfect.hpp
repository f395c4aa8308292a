#ifndef GSR_IMPERFECT_HPP
#define GSR_IMPERFECT_HPP

#include <string>
#include <vector>

#include "gsr/seeding.hpp"
#include "gsr/types.hpp"

namespace gsr {

/// The K x (n*tau) operator Phi_K = diag(hhat*_K) E_K^T Theta (I (x) Psi)
/// mapping stacked seeding values to the active spectrum of the
/// reconstruction, plus the pieces every under-seeded solver needs.
struct ReconstructionOperator {
    Matrix phi;    // K x (n*tau)
    Matrix VK;     // n x K
    Vector hhatK;  // active filter response baked into phi
    int K = 0;
    int tau = 1;
    int n = 0;

    /// Columns of phi selected by a pattern (the operator Phi_K C^T).
    Matrix restricted(const SelectionPattern& pattern) const;

    static ReconstructionOperator build(const SpectralBasis& basis,
                                        const FilterDesign& filter, int K, int tau);

    /// Ideal active response (hhat*_K = 1): the numerically robust choice
    /// when only reconstruction errors matter, since for any low-pass
    /// filter the response weighting is invertible on the active band.
    static ReconstructionOperator build_ideal(const SpectralBasis& basis, int K, int tau);
};

enum class NoiseKind { ConstantSNR, FixedPower };

/// Injection-noise model. FixedPower: R_w = sigma^2 I. ConstantSNR: the
/// total noise energy is sigma^2 times the seeding energy, split evenly
/// over the P injections, R_w = (sigma^2 ||s_P||^2 / P) I.
struct NoiseModel {
    NoiseKind kind = NoiseKind::ConstantSNR;
    double sigma = 1e-3;

    double entry_std(const Vector& values) const;
};

struct LsSolution {
    Vector values;
    double error_energy = 0.0;  // squared residual of the projection
    double cond = 1.0;
};

/// Least-squares seeding values for a fixed pattern and filter;
/// error_energy is the analytic projection residual. Throws RankDeficient when
/// Phi_K C^T loses column rank.
LsSolution ls_seed_values(const ReconstructionOperator& op, const SelectionPattern& pattern,
                          const Vector& y_target);

struct JointDesign {
    Vector values;
    Vector h;
    double error_energy = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> objective_trace;
};

/// Alternating least squares for the bilinear seed/filter problem:
/// each half-step is an exact linear LS, so the objective is monotone
/// non-increasing. `init_filter` defaults to the kernel low-pass design.
JointDesign joint_seed_filter(const SpectralBasis& basis, int K,
                              const SelectionPattern& pattern, const Vector& y_target,
                              int max_iters = 50, double rel_tol = 1e-12,
                              const FilterDesign* init_filter = nullptr);

enum class SelectionMethod { Exhaustive, GreedyForward, L1Relaxed };

const char* selection_method_name(SelectionMethod m);

struct SelectionResult {
    SelectionPattern pattern;
    Vector values;
    double objective = 0.0;
    SelectionMethod method = SelectionMethod::GreedyForward;
    long candidates_evaluated = 0;
};

/// Sparse seeding-location design: residual plus gamma per used
/// slot. GreedyForward adds the column with the largest residual reduction
/// until the marginal gain drops below gamma; L1Relaxed runs iterative
/// soft-thresholding on the 1-norm surrogate, then debiases on the support.
SelectionResult sparse_location_design(const ReconstructionOperator& op, const Vector& y_target,
                                       double gamma, SelectionMethod method);

struct ErrorCovariance {
    Matrix R;          // n x n, Hermitian PSD
    double mse = 0.0;  // trace(R)
};

ErrorCovariance error_covariance(const ReconstructionOperator& op,
                                 const SelectionPattern& pattern, const NoiseModel& noise,
                                 const Vector& values);

/// Constant-SNR selection objective:
/// trace((Phi diag(c) Phi^H)^-1) * trace(Phi diag(c) Phi^H), +infinity when
/// the Gram matrix is numerically singular (the pattern cannot carry all K
/// active frequencies).
double constant_snr_objective(const ReconstructionOperator& op, const SelectionPattern& pattern);

/// Fixed-power selection objective: sum of squared norms of the
/// selected Phi columns.
double fixed_noise_objective(const ReconstructionOperator& op, const SelectionPattern& pattern);

/// Minimizes the constant-SNR objective over patterns of P slots. Exhaustive
/// enumeration refuses above 10^6 candidates; GreedyForward grows the
/// pattern one slot at a time. Throws BudgetTooSmall for P < K.
SelectionResult select_constant_snr(const ReconstructionOperator& op, int P,
                                    SelectionMethod method);

/// Minimizes the fixed-power objective. The objective is separable, so
/// GreedyForward returns the exact optimum (the P smallest-norm columns).
SelectionResult select_fixed_noise(const ReconstructionOperator& op, int P,
                                   SelectionMethod method);

long pattern_candidate_count(int slots, int P);

}  // namespace gsr

#endif  // GSR_IMPERFECT_HPP
