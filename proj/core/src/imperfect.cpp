#include "gsr/imperfect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "gsr/errors.hpp"

namespace gsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SelectionPattern pattern_from_columns(const std::vector<int>& cols, int tau) {
    SelectionPattern p;
    p.tau = tau;
    for (int c : cols) p.pairs.emplace_back(c / tau, tau - 1 - (c % tau));
    return p;
}

/// Lexicographic enumeration of all size-P column subsets; `fn` gets the
/// current subset. Returns the number of candidates visited.
template <typename Fn>
long for_each_subset(int slots, int P, Fn&& fn) {
    std::vector<int> c(P);
    std::iota(c.begin(), c.end(), 0);
    long count = 0;
    while (true) {
        fn(c);
        ++count;
        int i = P - 1;
        while (i >= 0 && c[i] == slots - P + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < P; ++j) c[j] = c[j - 1] + 1;
    }
    return count;
}

}  // namespace

long pattern_candidate_count(int slots, int P) {
    if (P < 0 || P > slots) return 0;
    long count = 1;
    for (int i = 0; i < P; ++i) {
        if (count > (1L << 58) / std::max(slots - i, 1)) return std::numeric_limits<long>::max();
        count = count * (slots - i) / (i + 1);
    }
    return count;
}

Matrix ReconstructionOperator::restricted(const SelectionPattern& pattern) const {
    Matrix B(K, pattern.P());
    for (int k = 0; k < pattern.P(); ++k) {
        if (pattern.tau != tau)
            throw InvalidArgument("pattern tau does not match the operator");
        B.col(k) = phi.col(pattern.column_index(k));
    }
    return B;
}

ReconstructionOperator ReconstructionOperator::build(const SpectralBasis& basis,
                                                     const FilterDesign& filter, int K,
                                                     int tau) {
    const int n = basis.n();
    if (K < 1 || K > n) throw InvalidArgument("ReconstructionOperator: K out of range");
    if (tau < 1) throw InvalidArgument("ReconstructionOperator: tau must be >= 1");
    ReconstructionOperator op;
    op.K = K;
    op.tau = tau;
    op.n = n;
    op.hhatK = filter.response.head(K);
    op.VK = basis.V.leftCols(K);
    const Matrix powersK = vandermonde(basis.eigenvalues.head(K).eval(), tau);
    op.phi.resize(K, n * tau);
    for (int i = 0; i < n; ++i) {
        const Vector w = op.hhatK.cwiseProduct(basis.Vinv.col(i).head(K));
        op.phi.block(0, i * tau, K, tau) = w.asDiagonal() * powersK;
    }
    return op;
}

ReconstructionOperator ReconstructionOperator::build_ideal(const SpectralBasis& basis, int K,
                                                           int tau) {
    FilterDesign ideal;
    ideal.mode = FilterMode::Explicit;
    ideal.coeffs = Vector::Ones(1);
    ideal.response = Vector::Zero(basis.n());
    ideal.response.head(K).setOnes();
    return build(basis, ideal, K, tau);
}

double NoiseModel::entry_std(const Vector& values) const {
    switch (kind) {
        case NoiseKind::FixedPower: return sigma;
        case NoiseKind::ConstantSNR: {
            const int P = static_cast<int>(values.size());
            if (P == 0) return 0.0;
            return sigma * values.norm() / std::sqrt(static_cast<double>(P));
        }
    }
    return sigma;
}

LsSolution ls_seed_values(const ReconstructionOperator& op, const SelectionPattern& pattern,
                          const Vector& y_target) {
    if (y_target.size() != op.n) throw InvalidArgument("ls_seed_values: target size mismatch");
    const Matrix B = op.restricted(pattern);
    const int P = pattern.P();
    Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector sv = svd.singularValues();
    const double smax = sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol::kRank * smax) ++rank;
    if (rank < std::min(P, op.K)) {
        std::ostringstream msg;
        msg << "Phi_K C^T has column rank " << rank << " < " << std::min(P, op.K);
        throw RankDeficient(msg.str());
    }
    const Vector b = op.VK.adjoint() * y_target;
    LsSolution out;
    out.values = svd.solve(b);
    out.error_energy = (b - B * out.values).squaredNorm();
    out.cond = smax / sv(std::min<int>(P, op.K) - 1);
    return out;
}

JointDesign joint_seed_filter(const SpectralBasis& basis, int K,
                              const SelectionPattern& pattern, const Vector& y_target,
                              int max_iters, double rel_tol,
                              const FilterDesign* init_filter) {
    if (pattern.P() == 0) throw InvalidArgument("joint_seed_filter: empty pattern");
    const FilterDesign init = init_filter ? *init_filter : design_lowpass_kernel(basis, K);
    const int L = init.length();
    const Matrix psiL = vandermonde(basis.eigenvalues, L);
    const Matrix G = seeding_operator(basis, pattern);  // n x P

    JointDesign out;
    out.h = init.coeffs;
    Vector s = Vector::Zero(pattern.P());
    double prev = kInf;
    for (int it = 0; it < max_iters; ++it) {
        const Vector w = psiL * out.h;
        const Matrix Ms = basis.V * (w.asDiagonal() * G);
        s = Ms.completeOrthogonalDecomposition().solve(y_target);
        const Vector u = G * s;
        const Matrix Mh = basis.V * (u.asDiagonal() * psiL);
        out.h = Mh.completeOrthogonalDecomposition().solve(y_target);
        const double obj = (y_target - Mh * out.h).squaredNorm();
        out.objective_trace.push_back(obj);
        out.iterations = it + 1;
        if (prev - obj <= rel_tol * std::max(prev, 1e-300)) {
            out.converged = true;
            prev = obj;
            break;
        }
        prev = obj;
    }
    out.values = s;
    out.error_energy = prev == kInf ? 0.0 : prev;
    return out;
}

ErrorCovariance error_covariance(const ReconstructionOperator& op,
                                 const SelectionPattern& pattern, const NoiseModel& noise,
                                 const Vector& values) {
    const Matrix B = op.restricted(pattern);
    const double std_entry = noise.entry_std(values);
    const Matrix VB = op.VK * B;
    ErrorCovariance out;
    out.R = (std_entry * std_entry) * (VB * VB.adjoint());
    out.mse = std_entry * std_entry * VB.squaredNorm();
    return out;
}

double constant_snr_objective(const ReconstructionOperator& op,
                              const SelectionPattern& pattern) {
    const Matrix B = op.restricted(pattern);
    const Matrix M = B * B.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    const RealVector ev = es.eigenvalues();
    const double emax = ev(op.K - 1);
    if (emax <= 0.0 || ev(0) <= 1e-12 * emax) return kInf;
    double tr = 0.0, trinv = 0.0;
    for (int i = 0; i < op.K; ++i) {
        tr += ev(i);
        trinv += 1.0 / ev(i);
    }
    return tr * trinv;
}

double fixed_noise_objective(const ReconstructionOperator& op,
                             const SelectionPattern& pattern) {
    return op.restricted(pattern).squaredNorm();
}

namespace {

/// Greedy score for partially built constant-SNR patterns: prefer higher
/// numerical rank, then smaller pseudo-inverse objective.
std::pair<int, double> constant_snr_partial_score(const ReconstructionOperator& op,
                                                  const Matrix& B) {
    const Matrix M = B * B.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    const RealVector ev = es.eigenvalues();
    const double emax = std::max(ev(op.K - 1), 0.0);
    int rank = 0;
    double tr = 0.0, trinv = 0.0;
    for (int i = 0; i < op.K; ++i) {
        tr += std::max(ev(i), 0.0);
        if (ev(i) > 1e-12 * std::max(emax, 1e-300)) {
            ++rank;
            trinv += 1.0 / ev(i);
        }
    }
    return {op.K - rank, tr * trinv};
}

SelectionResult greedy_select(const ReconstructionOperator& op, int P, bool constant_snr) {
    const int slots = op.n * op.tau;
    std::vector<int> chosen;
    std::vector<char> used(slots, 0);
    long evaluated = 0;
    for (int step = 0; step < P; ++step) {
        int best = -1;
        std::pair<int, double> best_score{std::numeric_limits<int>::max(), kInf};
        for (int c = 0; c < slots; ++c) {
            if (used[c]) continue;
            ++evaluated;
            std::pair<int, double> score;
            if (constant_snr) {
                Matrix B(op.K, static_cast<int>(chosen.size()) + 1);
                for (std::size_t i = 0; i < chosen.size(); ++i) B.col(i) = op.phi.col(chosen[i]);
                B.col(static_cast<int>(chosen.size())) = op.phi.col(c);
                score = constant_snr_partial_score(op, B);
            } else {
                double tr = 0.0;
                for (int prev : chosen) tr += op.phi.col(prev).squaredNorm();
                tr += op.phi.col(c).squaredNorm();
                score = {0, tr};
            }
            if (score < best_score) {
                best_score = score;
                best = c;
            }
        }
        used[best] = 1;
        chosen.push_back(best);
    }
    std::sort(chosen.begin(), chosen.end());
    SelectionResult out;
    out.pattern = pattern_from_columns(chosen, op.tau);
    out.method = SelectionMethod::GreedyForward;
    out.candidates_evaluated = evaluated;
    out.objective = constant_snr ? constant_snr_objective(op, out.pattern)
                                 : fixed_noise_objective(op, out.pattern);
    return out;
}

SelectionResult exhaustive_select(const ReconstructionOperator& op, int P, bool constant_snr,
                                  long guard) {
    const int slots = op.n * op.tau;
    const long count = pattern_candidate_count(slots, P);
    if (count > guard)
        throw InvalidArgument("exhaustive search over " + std::to_string(count) +
                              " candidates exceeds the guard (" + std::to_string(guard) +
                              "); use the greedy strategy");
    SelectionResult out;
    out.method = SelectionMethod::Exhaustive;
    double best = kInf;
    std::vector<int> best_cols;
    out.candidates_evaluated = for_each_subset(slots, P, [&](const std::vector<int>& cols) {
        const SelectionPattern pat = pattern_from_columns(cols, op.tau);
        const double obj =
            constant_snr ? constant_snr_objective(op, pat) : fixed_noise_objective(op, pat);
        if (obj < best) {
            best = obj;
            best_cols = cols;
        }
    });
    if (best_cols.empty())
        throw RankDeficient("no pattern of size " + std::to_string(P) +
                            " yields an invertible Gram matrix");
    out.pattern = pattern_from_columns(best_cols, op.tau);
    out.objective = best;
    return out;
}

}  // namespace

SelectionResult select_constant_snr(const ReconstructionOperator& op, int P,
                                    SelectionMethod method) {
    if (P < op.K)
        throw BudgetTooSmall("constant-SNR objective needs P >= K (P=" + std::to_string(P) +
                             ", K=" + std::to_string(op.K) + ")");
    if (P > op.n * op.tau) throw InvalidArgument("P exceeds the number of (node, time) slots");
    switch (method) {
        case SelectionMethod::Exhaustive: return exhaustive_select(op, P, true, 1000000);
        case SelectionMethod::GreedyForward: return greedy_select(op, P, true);
        case SelectionMethod::L1Relaxed:
            throw InvalidArgument("L1Relaxed applies to sparse_location_design only");
    }
    throw InvalidArgument("unknown selection method");
}

SelectionResult select_fixed_noise(const ReconstructionOperator& op, int P,
                                   SelectionMethod method) {
    if (P < 1) throw InvalidArgument("select_fixed_noise needs P >= 1");
    if (P > op.n * op.tau) throw InvalidArgument("P exceeds the number of (node, time) slots");
    switch (method) {
        case SelectionMethod::Exhaustive: return exhaustive_select(op, P, false, 1000000);
        case SelectionMethod::GreedyForward: return greedy_select(op, P, false);
        case SelectionMethod::L1Relaxed:
            throw InvalidArgument("L1Relaxed applies to sparse_location_design only");
    }
    throw InvalidArgument("unknown selection method");
}

namespace {

SelectionResult greedy_sparse(const ReconstructionOperator& op, const Vector& b,
                              double gamma) {
    const int slots = op.n * op.tau;
    std::vector<int> chosen;
    Matrix Q(op.K, 0);
    Vector r = b;
    long evaluated = 0;
    const double floor_gain = 1e-14 * b.squaredNorm();
    while (static_cast<int>(chosen.size()) < std::min(slots, op.K)) {
        int best = -1;
        double best_gain = 0.0;
        Vector best_q;
        for (int c = 0; c < slots; ++c) {
            if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
            ++evaluated;
            Vector col = op.phi.col(c);
            if (Q.cols() > 0) col -= Q * (Q.adjoint() * col).eval();
            const double n2 = col.squaredNorm();
            if (n2 <= 1e-24) continue;
            const double gain = std::norm(col.dot(r)) / n2;
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
                best_q = col / std::sqrt(n2);
            }
        }
        if (best < 0 || best_gain <= std::max(gamma, floor_gain)) break;
        chosen.push_back(best);
        Q.conservativeResize(op.K, Q.cols() + 1);
        Q.col(Q.cols() - 1) = best_q;
        r -= best_q * best_q.dot(r);
    }
    std::sort(chosen.begin(), chosen.end());
    SelectionResult out;
    out.method = SelectionMethod::GreedyForward;
    out.candidates_evaluated = evaluated;
    out.pattern = pattern_from_columns(chosen, op.tau);
    if (!chosen.empty()) {
        const Matrix B = op.restricted(out.pattern);
        out.values = B.completeOrthogonalDecomposition().solve(b);
        out.objective = (b - B * out.values).squaredNorm() + gamma * chosen.size();
    } else {
        out.objective = b.squaredNorm();
    }
    return out;
}

SelectionResult l1_sparse(const ReconstructionOperator& op, const Vector& b, double gamma) {
    const int slots = op.n * op.tau;
    Eigen::JacobiSVD<Matrix> svd(op.phi);
    const double lip = svd.singularValues()(0) * svd.singularValues()(0);
    const double step = lip > 0.0 ? 1.0 / lip : 1.0;
    const double thresh = 0.5 * gamma * step;

    Vector d = Vector::Zero(slots);
    const int max_iters = 10000;
    int used_iters = 0;
    for (int it = 0; it < max_iters; ++it) {
        const Vector grad = op.phi.adjoint() * (op.phi * d - b);
        Vector next = d - step * grad;
        for (int i = 0; i < slots; ++i) {
            const double m = std::abs(next[i]);
            next[i] = m <= thresh ? Complex(0, 0) : next[i] * ((m - thresh) / m);
        }
        const double delta = (next - d).norm();
        d = next;
        used_iters = it + 1;
        if (delta <= 1e-12 * std::max(1.0, d.norm())) break;
    }

    std::vector<int> support;
    const double dm = d.cwiseAbs().maxCoeff();
    for (int i = 0; i < slots; ++i)
        if (std::abs(d[i]) > 1e-10 * std::max(dm, 1e-300) && dm > 0.0) support.push_back(i);

    SelectionResult out;
    out.method = SelectionMethod::L1Relaxed;
    out.candidates_evaluated = used_iters;
    out.pattern = pattern_from_columns(support, op.tau);
    if (!support.empty()) {
        const Matrix B = op.restricted(out.pattern);
        out.values = B.completeOrthogonalDecomposition().solve(b);
        out.objective = (b - B * out.values).squaredNorm() + gamma * support.size();
    } else {
        out.objective = b.squaredNorm();
    }
    return out;
}

}  // namespace

SelectionResult sparse_location_design(const ReconstructionOperator& op,
                                       const Vector& y_target, double gamma,
                                       SelectionMethod method) {
    if (gamma < 0.0) throw InvalidArgument("sparse_location_design: gamma must be >= 0");
    if (y_target.size() != op.n)
        throw InvalidArgument("sparse_location_design: target size mismatch");
    const Vector b = op.VK.adjoint() * y_target;
    switch (method) {
        case SelectionMethod::GreedyForward: return greedy_sparse(op, b, gamma);
        case SelectionMethod::L1Relaxed: return l1_sparse(op, b, gamma);
        case SelectionMethod::Exhaustive:
            throw InvalidArgument("sparse_location_design supports greedy and l1 methods");
    }
    throw InvalidArgument("unknown selection method");
}

const char* selection_method_name(SelectionMethod m) {
    switch (m) {
        case SelectionMethod::Exhaustive: return "exhaustive";
        case SelectionMethod::GreedyForward: return "greedy";
        case SelectionMethod::L1Relaxed: return "l1";
    }
    return "greedy";
}

}  // namespace gsr
