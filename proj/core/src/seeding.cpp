#include "gsr/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "gsr/errors.hpp"

namespace gsr {

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::MNST: return "mnst";
        case Scheme::SNMT: return "snmt";
        case Scheme::MNMT: return "mnmt";
    }
    return "mnst";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "mnst") return Scheme::MNST;
    if (name == "snmt") return Scheme::SNMT;
    if (name == "mnmt") return Scheme::MNMT;
    throw InvalidArgument("unknown scheme: " + name);
}

void SelectionPattern::validate(int n) const {
    if (tau < 1) throw InvalidArgument("selection pattern: tau must be >= 1");
    std::set<std::pair<int, int>> seen;
    for (const auto& [node, time] : pairs) {
        if (node < 0 || node >= n)
            throw InvalidArgument("selection pattern: node out of range");
        if (time < 0 || time >= tau)
            throw InvalidArgument("selection pattern: time out of range");
        if (!seen.insert({node, time}).second)
            throw InvalidArgument("selection pattern: duplicate (node, time) pair");
    }
}

SelectionPattern SelectionPattern::single_time(const std::vector<int>& nodes) {
    SelectionPattern p;
    p.tau = 1;
    for (int node : nodes) p.pairs.emplace_back(node, 0);
    return p;
}

SelectionPattern SelectionPattern::single_node(int node, int P) {
    SelectionPattern p;
    p.tau = P;
    for (int t = P - 1; t >= 0; --t) p.pairs.emplace_back(node, t);
    return p;
}

RealMatrix SelectionPattern::selection_matrix(int n) const {
    RealMatrix C = RealMatrix::Zero(P(), n * tau);
    for (int k = 0; k < P(); ++k) C(k, column_index(k)) = 1.0;
    return C;
}

Vector simulate_seeding(const ShiftOperator& shift, const SeedingSchedule& schedule,
                        const Vector* x_init, std::vector<Vector>* states) {
    const int n = shift.size();
    const SelectionPattern& pat = schedule.pattern;
    pat.validate(n);
    if (schedule.values.size() != pat.P())
        throw InvalidArgument("simulate_seeding: values/pattern size mismatch");
    if (x_init && x_init->size() != n)
        throw InvalidArgument("simulate_seeding: initial state size mismatch");

    std::vector<Vector> injections(pat.tau, Vector::Zero(n));
    for (int k = 0; k < pat.P(); ++k)
        injections[pat.pairs[k].second][pat.pairs[k].first] += schedule.values[k];

    Vector x = x_init ? *x_init : Vector::Zero(n);
    for (int t = 0; t < pat.tau; ++t) {
        if (t > 0) x = (shift.matrix * x).eval();
        x += injections[t];
        if (states) states->push_back(x);
    }
    return x;
}

Matrix seeding_operator(const SpectralBasis& basis, const SelectionPattern& pattern) {
    const int n = basis.n();
    pattern.validate(n);
    const Matrix powers = vandermonde(basis.eigenvalues, pattern.tau);
    Matrix A(n, pattern.P());
    for (int k = 0; k < pattern.P(); ++k) {
        const auto& [node, time] = pattern.pairs[k];
        A.col(k) = basis.Vinv.col(node).cwiseProduct(powers.col(pattern.tau - 1 - time));
    }
    return A;
}

Matrix seeding_operator_full(const SpectralBasis& basis, int tau) {
    const int n = basis.n();
    if (tau < 1) throw InvalidArgument("seeding_operator_full: tau must be >= 1");
    const Matrix powers = vandermonde(basis.eigenvalues, tau);
    Matrix A(n, n * tau);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < tau; ++l)
            A.col(i * tau + l) = basis.Vinv.col(i).cwiseProduct(powers.col(l));
    return A;
}

namespace {

std::string singular_values_message(const RealVector& sv) {
    std::ostringstream msg;
    msg << "singular values:";
    for (int i = 0; i < sv.size(); ++i) msg << " " << sv(i);
    return msg.str();
}

/// Shared exact-design core: solve diag(hhat*_K)^-1 yhat_K = A_K s_P with
/// the minimum-norm solution, after the rank and conditioning checks of
/// the recovery propositions.
ReconstructionPlan solve_exact(const SpectralBasis& basis, int K,
                               const SelectionPattern& pattern, const Vector& yhatK,
                               const FilterDesign* filter, FeasibilityFlags flags) {
    const int P = pattern.P();
    if (P < K)
        throw InvalidArgument("exact design needs P >= K seeding values; use "
                              "ls_seed_values for under-seeded instances");
    if (yhatK.size() != K) throw InvalidArgument("yhatK must have K entries");

    flags.condition_i = condition_i_holds(basis, K);
    flags.bandwidth_tie = basis.bandwidth_tie(K);
    if (!flags.condition_i) {
        std::ostringstream msg;
        msg << "condition (i) fails: active/inactive eigenvalue collisions at";
        for (auto [k1, k2] : condition_i_collisions(basis, K)) msg << " (" << k1 << "," << k2 << ")";
        msg << "; request the degree-reduced design to zero them via seeding";
        throw ConditionViolation(msg.str());
    }

    ReconstructionPlan plan;
    plan.K = K;
    plan.filter = filter ? *filter : design_lowpass_kernel(basis, K);

    const Matrix A = seeding_operator(basis, pattern).topRows(K);
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector sv = svd.singularValues();
    const double smax = sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol::kRank * smax) ++rank;
    if (rank < K) {
        flags.rank_ok = false;
        throw RankDeficient("seeding matrix rank " + std::to_string(rank) + " < K=" +
                            std::to_string(K) + "; " + singular_values_message(sv));
    }
    plan.solver_cond = smax / sv(K - 1);

    const Vector hhatK = plan.filter.response.head(K);
    if (hhatK.cwiseAbs().minCoeff() <=
        tol::kAnnihilate * plan.filter.response.cwiseAbs().maxCoeff())
        throw ConditionViolation(
            "filter response vanishes on an active frequency; the plan cannot express "
            "the target there");
    const Vector rhs = yhatK.cwiseQuotient(hhatK);

    plan.schedule.pattern = pattern;
    plan.schedule.values = svd.solve(rhs);
    plan.flags = flags;
    return plan;
}

}  // namespace

ReconstructionPlan mnst_design(const SpectralBasis& basis, int K,
                               const std::vector<int>& seed_nodes, const Vector& yhatK,
                               const FilterDesign* filter) {
    return solve_exact(basis, K, SelectionPattern::single_time(seed_nodes), yhatK, filter,
                       FeasibilityFlags{});
}

ReconstructionPlan snmt_design(const SpectralBasis& basis, int K, int seed_node, int P,
                               const Vector& yhatK, const FilterDesign* filter) {
    FeasibilityFlags flags;
    const SpectrumCensus census = spectrum_census(basis, K, seed_node);
    if (census.D1 > 0) {
        flags.spectrum_simple = false;
        throw DegenerateSpectrum("repeated eigenvalues among the K active frequencies (D1=" +
                                 std::to_string(census.D1) + ")");
    }
    if (census.U1 > 0) {
        flags.node_expresses = false;
        const Vector ehat = basis.node_spectrum(seed_node);
        const double scale = std::max(ehat.norm(), 1e-300);
        std::ostringstream msg;
        msg << "node " << seed_node << " cannot express active frequencies:";
        for (int k = 0; k < K; ++k)
            if (std::abs(ehat[k]) <= tol::kEigenEqual * scale) msg << " " << k;
        throw NodeCannotExpress(msg.str());
    }
    return solve_exact(basis, K, SelectionPattern::single_node(seed_node, P), yhatK, filter,
                       flags);
}

ReconstructionPlan mnmt_design(const SpectralBasis& basis, int K,
                               const SelectionPattern& pattern, const Vector& yhatK,
                               const FilterDesign* filter) {
    return solve_exact(basis, K, pattern, yhatK, filter, FeasibilityFlags{});
}

namespace {

struct InactiveGroup {
    Complex value;
    std::vector<int> rows;  // frequency indices sharing the eigenvalue
    bool collides_active = false;
};

}  // namespace

ReconstructionPlan degree_reduced_design(const SpectralBasis& basis, int K, Scheme scheme,
                                         const SelectionPattern& pattern,
                                         const Vector& yhatK) {
    const int n = basis.n();
    const int P = pattern.P();
    if (P < K) throw InvalidArgument("degree_reduced_design needs P >= K");
    if (yhatK.size() != K) throw InvalidArgument("yhatK must have K entries");
    pattern.validate(n);

    const Matrix A = seeding_operator(basis, pattern);  // n x P
    const Vector& lam = basis.eigenvalues;

    // Rows of A that vanish identically need no treatment (for SN-MT these
    // are the U2 frequencies the node does not express).
    const double row_scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
    std::vector<char> auto_zero(n, 0);
    for (int k = K; k < n; ++k)
        if (A.row(k).cwiseAbs().maxCoeff() <= 1e-12 * row_scale) auto_zero[k] = 1;

    // Group the remaining inactive frequencies by eigenvalue.
    std::vector<InactiveGroup> groups;
    for (int k = K; k < n; ++k) {
        if (auto_zero[k]) continue;
        bool placed = false;
        for (InactiveGroup& g : groups)
            if (eig_equal(lam[k], g.value, basis.eig_scale)) {
                g.rows.push_back(k);
                placed = true;
                break;
            }
        if (!placed) groups.push_back({lam[k], {k}, false});
    }
    for (InactiveGroup& g : groups)
        for (int k1 = 0; k1 < K; ++k1)
            if (eig_equal(lam[k1], g.value, basis.eig_scale)) g.collides_active = true;

    // For a single seeding node, rows sharing an eigenvalue are scalar
    // multiples of one another, so one zero-forcing equation covers the
    // whole group; a collision with an active frequency is then fatal
    // (forcing the group to zero would zero the active response too).
    const bool proportional_rows = scheme == Scheme::SNMT;
    if (proportional_rows) {
        for (const InactiveGroup& g : groups)
            if (g.collides_active) {
                std::ostringstream msg;
                msg << "frequencies";
                for (int k : g.rows) msg << " " << k;
                msg << " share an eigenvalue with an active frequency and the seeding node "
                       "expresses them; they cannot be zeroed";
                throw Infeasible(msg.str());
            }
    }

    const int budget = P - K;
    int used = 0;
    std::vector<char> seeded(groups.size(), 0);
    auto group_cost = [&](const InactiveGroup& g) {
        return proportional_rows ? 1 : static_cast<int>(g.rows.size());
    };
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        if (!groups[gi].collides_active) continue;
        used += group_cost(groups[gi]);
        seeded[gi] = 1;
    }
    if (used > budget) {
        std::ostringstream msg;
        msg << "P - K = " << budget << " zero-forcing equations cannot cover the " << used
            << " frequencies colliding with the active band; frequencies:";
        for (std::size_t gi = 0; gi < groups.size(); ++gi)
            if (seeded[gi])
                for (int k : groups[gi].rows) msg << " " << k;
        throw Infeasible(msg.str());
    }

    // Spend the remaining budget on the cheapest groups first: every seeded
    // group removes one annihilation factor from the filter.
    std::vector<std::size_t> optional_order;
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        if (!seeded[gi]) optional_order.push_back(gi);
    std::stable_sort(optional_order.begin(), optional_order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return group_cost(groups[a]) < group_cost(groups[b]);
                     });
    for (std::size_t gi : optional_order) {
        const int cost = group_cost(groups[gi]);
        if (used + cost > budget) continue;
        used += cost;
        seeded[gi] = 1;
    }

    std::vector<int> kill;
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        if (!seeded[gi]) kill.push_back(groups[gi].rows.front());
    std::sort(kill.begin(), kill.end());

    ReconstructionPlan plan;
    plan.K = K;
    plan.filter = design_annihilating_product(basis, kill);
    plan.flags.condition_i = condition_i_holds(basis, K);
    plan.flags.bandwidth_tie = basis.bandwidth_tie(K);

    // Seeding system: K target equations plus one zero-forcing row per
    // seeded frequency (one representative for proportional rows).
    std::vector<int> zero_rows;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        if (!seeded[gi]) continue;
        if (proportional_rows)
            zero_rows.push_back(groups[gi].rows.front());
        else
            for (int k : groups[gi].rows) zero_rows.push_back(k);
    }
    const int rows = K + static_cast<int>(zero_rows.size());
    Matrix M(rows, P);
    Vector b = Vector::Zero(rows);
    const Vector resp = plan.filter.response;
    for (int k = 0; k < K; ++k) {
        if (std::abs(resp[k]) <= tol::kAnnihilate * resp.cwiseAbs().maxCoeff())
            throw Infeasible("reduced filter annihilates active frequency " +
                             std::to_string(k));
        M.row(k) = resp[k] * A.row(k);
        b[k] = yhatK[k];
    }
    for (std::size_t r = 0; r < zero_rows.size(); ++r)
        M.row(K + static_cast<int>(r)) = A.row(zero_rows[r]);

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
    const Vector s = cod.solve(b);
    const double resid = (M * s - b).norm();
    if (resid > 1e-8 * (b.norm() + 1.0)) {
        std::ostringstream msg;
        msg << "split design system is inconsistent (residual " << resid
            << "); the pattern cannot zero the required frequencies";
        throw Infeasible(msg.str());
    }
    {
        Eigen::JacobiSVD<Matrix> svd(M);
        const RealVector sv = svd.singularValues();
        const int r = std::min<int>(rows, P);
        plan.solver_cond = sv(0) / std::max(sv(r - 1), 1e-300);
    }

    // End-to-end verification in the frequency domain.
    const Vector zhat = resp.cwiseProduct(A * s);
    Vector target = Vector::Zero(n);
    target.head(K) = yhatK;
    if ((zhat - target).norm() > 1e-6 * (yhatK.norm() + 1.0))
        throw Infeasible("reduced design does not reproduce the target spectrum");

    plan.schedule.pattern = pattern;
    plan.schedule.values = s;
    return plan;
}

ReconstructionReport reconstruct(const ShiftOperator& shift, const SpectralBasis& basis,
                                 const ReconstructionPlan& plan, const Vector& y_target,
                                 bool record_trace) {
    const int n = shift.size();
    if (y_target.size() != n) throw InvalidArgument("reconstruct: target size mismatch");

    ReconstructionReport report;
    report.flags = plan.flags;
    report.solver_cond = plan.solver_cond;
    report.cond_V = basis.cond_V;
    if (record_trace) report.trace.emplace();

    Vector x = simulate_seeding(shift, plan.schedule, nullptr,
                                record_trace ? &report.trace->seeding_states : nullptr);

    if (plan.filter.mode == FilterMode::ProductAnnihilating) {
        // Factor-by-factor application annihilates one frequency per stage.
        Vector z = x;
        for (std::size_t l = 0; l < plan.filter.roots.size(); ++l) {
            z = (shift.matrix * z - plan.filter.roots[l] * z).eval();
            if (record_trace) {
                report.trace->filter_states.push_back(z);
                for (int k = 0; k < n; ++k)
                    if (eig_equal(basis.eigenvalues[k], plan.filter.roots[l],
                                  basis.eig_scale)) {
                        report.trace->annihilated_frequency.push_back(k);
                        break;
                    }
            }
        }
        report.z = plan.filter.leading * z;
    } else {
        report.z = apply_filter_polynomial(shift, plan.filter.coeffs, x);
        if (record_trace) report.trace->filter_states.push_back(report.z);
    }

    const double ny = y_target.norm();
    const double diff = (report.z - y_target).norm();
    report.relative_error = ny > 0.0 ? diff / ny : diff;
    report.per_frequency_residual = (basis.Vinv * (report.z - y_target)).cwiseAbs();
    report.imag_residue = imag_residue(report.z);
    return report;
}

Vector adjust_for_initial_state(const ShiftOperator& shift, const Vector& y_init,
                                const Vector& y_target, int tau) {
    if (tau < 1) throw InvalidArgument("adjust_for_initial_state: tau must be >= 1");
    if (y_init.size() != shift.size() || y_target.size() != shift.size())
        throw InvalidArgument("adjust_for_initial_state: dimension mismatch");
    Vector drift = y_init;
    for (int t = 0; t < tau - 1; ++t) drift = (shift.matrix * drift).eval();
    return y_target - drift;
}

IdentitySeedingCheck identity_seeding_check(const SpectralBasis& basis, int K,
                                            const std::vector<int>& seed_nodes) {
    const int n = basis.n();
    if (static_cast<int>(seed_nodes.size()) != K)
        throw InvalidArgument("identity_seeding_check needs exactly K seed nodes");
    for (int s : seed_nodes)
        if (s < 0 || s >= n) throw InvalidArgument("identity_seeding_check: node out of range");

    Matrix left(K, K), right(K, K);
    for (int j = 0; j < K; ++j) {
        left.col(j) = basis.Vinv.col(seed_nodes[j]).head(K);
        right.row(j) = basis.V.row(seed_nodes[j]).head(K);
    }
    const Matrix M = left * right;

    IdentitySeedingCheck out;
    out.diag_values = M.diagonal();
    Matrix off = M;
    off.diagonal().setZero();
    out.offdiag_norm = off.norm();
    out.is_diagonal = out.offdiag_norm <= 1e-8 * std::max(M.norm(), 1e-300);
    return out;
}

}  // namespace gsr
