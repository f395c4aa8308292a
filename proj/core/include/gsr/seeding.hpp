#ifndef GSR_SEEDING_HPP
#define GSR_SEEDING_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsr/filters.hpp"
#include "gsr/spectral.hpp"
#include "gsr/types.hpp"

namespace gsr {

enum class Scheme { MNST, SNMT, MNMT };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// Which (node, time) slots of a tau-step seeding phase carry values.
///
/// The stacked seeding vector is node-major with per-node times in
/// descending order (t = tau-1 first), so the flat column index of the
/// pair (node i, time t) is i*tau + (tau-1-t). An injection at time t
/// percolates through tau-1-t shift applications before the phase ends.
struct SelectionPattern {
    int tau = 1;
    std::vector<std::pair<int, int>> pairs;  // (node, time), time in [0, tau)

    int P() const { return static_cast<int>(pairs.size()); }
    int column_index(int k) const {
        return pairs[k].first * tau + (tau - 1 - pairs[k].second);
    }

    /// Throws InvalidArgument on duplicates or out-of-range entries.
    void validate(int n) const;

    /// All nodes inject simultaneously at the single time of a tau=1 phase.
    static SelectionPattern single_time(const std::vector<int>& nodes);

    /// One node injects at every time of a tau=P phase.
    static SelectionPattern single_node(int node, int P);

    /// The binary P x (n*tau) selection matrix C (one 1 per row, at most
    /// one per column).
    RealMatrix selection_matrix(int n) const;
};

/// A selection pattern together with the values injected at its slots
/// (values[k] belongs to pairs[k]).
struct SeedingSchedule {
    SelectionPattern pattern;
    Vector values;
};

/// Per-proposition feasibility outcomes recorded by the designers.
struct FeasibilityFlags {
    bool condition_i = true;      // no active/inactive eigenvalue collision
    bool rank_ok = true;          // design matrix reaches rank K
    bool node_expresses = true;   // U1 == 0 (SN-MT)
    bool spectrum_simple = true;  // D1 == 0 (SN-MT)
    bool bandwidth_tie = false;   // |lambda_K| ties |lambda_{K+1}| (flag only)
};

struct ReconstructionPlan {
    SeedingSchedule schedule;
    FilterDesign filter;
    int K = 0;
    FeasibilityFlags flags;
    double solver_cond = 1.0;
};

/// Snapshots of the percolation and filtering phases, one state per
/// injection step and per annihilation stage.
struct ReconstructionTrace {
    std::vector<Vector> seeding_states;       // x^(0) .. x^(tau-1)
    std::vector<Vector> filter_states;        // after each product factor
    std::vector<int> annihilated_frequency;   // frequency index killed per stage
};

struct ReconstructionReport {
    Vector z;
    double relative_error = 0.0;            // ||z - y|| / ||y||
    RealVector per_frequency_residual;      // |V^-1 (z - y)| per frequency
    FeasibilityFlags flags;
    double solver_cond = 1.0;
    double cond_V = 1.0;
    double imag_residue = 0.0;
    std::optional<ReconstructionTrace> trace;
};

/// Runs the percolation dynamics x^(t) = S x^(t-1) + s^(t) and returns
/// x^(tau-1). A nonzero `x_init` is the signal already present on the
/// graph when the phase starts (it contributes S^(tau-1) x_init).
Vector simulate_seeding(const ShiftOperator& shift, const SeedingSchedule& schedule,
                        const Vector* x_init = nullptr,
                        std::vector<Vector>* states = nullptr);

/// Frequency-domain seeding operator Theta (I (x) Psi) C^T restricted to the
/// pattern: column k maps the value injected at pairs[k] to the spectrum of
/// the seeding-phase output. Assembled per node as diag(e-hat_i) Psi without
/// any N^2-sized intermediate.
Matrix seeding_operator(const SpectralBasis& basis, const SelectionPattern& pattern);

/// All n*tau columns (flat order).
Matrix seeding_operator_full(const SpectralBasis& basis, int tau);

/// MN-ST designer: tau = 1 values on `seed_nodes` recovering the
/// K-bandlimited target with spectrum `yhatK`. P > K uses the minimum-norm
/// solution. `filter` defaults to the kernel low-pass design.
ReconstructionPlan mnst_design(const SpectralBasis& basis, int K,
                               const std::vector<int>& seed_nodes, const Vector& yhatK,
                               const FilterDesign* filter = nullptr);

/// SN-MT designer: P successive values at one node.
ReconstructionPlan snmt_design(const SpectralBasis& basis, int K, int seed_node, int P,
                               const Vector& yhatK, const FilterDesign* filter = nullptr);

/// MN-MT designer: arbitrary (node, time) pattern.
ReconstructionPlan mnmt_design(const SpectralBasis& basis, int K,
                               const SelectionPattern& pattern, const Vector& yhatK,
                               const FilterDesign* filter = nullptr);

/// Degree-reduced designer: P > K seeding values zero out part of the
/// inactive spectrum so the filter only annihilates the rest. Resolves
/// active/inactive eigenvalue collisions by seeding when possible, and for
/// SN-MT realizes the minimal degree max(0, N - P - U2 - D2).
ReconstructionPlan degree_reduced_design(const SpectralBasis& basis, int K, Scheme scheme,
                                         const SelectionPattern& pattern,
                                         const Vector& yhatK);

/// Executes plan.schedule then plan.filter on `shift` and reports the
/// error against `y_target`. Product-form filters are applied factor by
/// factor; with `record_trace` the per-stage signals are kept.
ReconstructionReport reconstruct(const ShiftOperator& shift, const SpectralBasis& basis,
                                 const ReconstructionPlan& plan, const Vector& y_target,
                                 bool record_trace = false);

/// Target adjustment for a nonzero initial state: recovering
/// y_r = y_target - S^(tau-1) y_init on top of the percolating initial
/// signal yields y_target.
Vector adjust_for_initial_state(const ShiftOperator& shift, const Vector& y_init,
                                const Vector& y_target, int tau);

/// Diagnostic for seeding with the target's own values: the product
/// (V^-1 rows 1..K, seed columns) x (V rows seeds, columns 1..K) must be
/// diagonal for that to work. On the directed cycle with uniform seeds it
/// equals (K/N) I.
struct IdentitySeedingCheck {
    bool is_diagonal = false;
    double offdiag_norm = 0.0;
    Vector diag_values;
};

IdentitySeedingCheck identity_seeding_check(const SpectralBasis& basis, int K,
                                            const std::vector<int>& seed_nodes);

}  // namespace gsr

#endif  // GSR_SEEDING_HPP
