#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "gsr/errors.hpp"
#include "gsr/filters.hpp"
#include "gsr/generators.hpp"
#include "gsr/imperfect.hpp"
#include "gsr/rng.hpp"
#include "gsr/seeding.hpp"

using namespace gsr;

namespace {

struct Fixture {
    ShiftOperator shift;
    SpectralBasis basis;
    FilterDesign filter;
    ReconstructionOperator op;
    int K = 0;
};

/// ER fixture with condition (i) satisfied and a kernel low-pass filter.
Fixture er_fixture(int n, double p, int K, int tau, std::uint64_t seed) {
    Rng rng(seed);
    for (int trial = 0;; ++trial) {
        Rng sub = rng.substream(trial);
        Fixture f;
        f.K = K;
        try {
            f.shift = build_shift(gen_er(n, p, sub), ShiftKind::Adjacency);
            f.basis = decompose(f.shift);
        } catch (const NonDiagonalizable&) {
            continue;
        }
        if (!condition_i_holds(f.basis, K)) continue;
        f.filter = design_lowpass_kernel(f.basis, K);
        f.op = ReconstructionOperator::build(f.basis, f.filter, K, tau);
        return f;
    }
}

Vector random_complex(int n, Rng& rng) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = Complex(rng.normal(), rng.normal());
    return v;
}

SelectionPattern random_pattern(int n, int tau, int P, Rng& rng) {
    std::vector<int> cols(n * tau);
    std::iota(cols.begin(), cols.end(), 0);
    for (int i = 0; i < P; ++i) {
        const int j = i + static_cast<int>(rng.next_u64() % (cols.size() - i));
        std::swap(cols[i], cols[j]);
    }
    SelectionPattern pat;
    pat.tau = tau;
    for (int i = 0; i < P; ++i)
        pat.pairs.emplace_back(cols[i] / tau, tau - 1 - (cols[i] % tau));
    return pat;
}

}  // namespace

TEST_CASE("reconstruction operator: restriction equals the full operator's columns") {
    const Fixture f = er_fixture(8, 0.4, 3, 2, 1);
    const Matrix full = seeding_operator_full(f.basis, 2);
    Rng rng(2);
    const SelectionPattern pat = random_pattern(8, 2, 5, rng);
    const Matrix B = f.op.restricted(pat);
    for (int k = 0; k < pat.P(); ++k) {
        const Vector expected =
            f.filter.response.head(3).cwiseProduct(full.col(pat.column_index(k)).head(3));
        CHECK((B.col(k) - expected).norm() <= 1e-12 * std::max(1.0, expected.norm()));
    }
}

TEST_CASE("ls_seed_values: P=K feasible pattern reduces to the exact solve") {
    const Fixture f = er_fixture(9, 0.4, 3, 1, 3);
    Rng rng(4);
    Vector yhatK = random_complex(3, rng);
    const Vector y = f.basis.VK(3) * yhatK;
    for (int attempt = 0; attempt < 6; ++attempt) {
        SelectionPattern pat = random_pattern(9, 1, 3, rng);
        LsSolution sol;
        try {
            sol = ls_seed_values(f.op, pat, y);
        } catch (const RankDeficient&) {
            continue;
        }
        if (sol.cond > 1e6) continue;
        CHECK(sol.error_energy <= 1e-10 * y.squaredNorm());
        return;
    }
    FAIL("no well-conditioned P=K pattern found");
}

TEST_CASE("ls_seed_values: error energy matches an SVD pseudo-inverse oracle") {
    const Fixture f = er_fixture(10, 0.35, 4, 2, 5);
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        Rng sub = rng.substream(trial);
        const int P = 1 + static_cast<int>(sub.next_u64() % 4);
        const SelectionPattern pat = random_pattern(10, 2, P, sub);
        Vector yhatK = random_complex(4, sub);
        const Vector y = f.basis.VK(4) * yhatK;
        LsSolution sol;
        try {
            sol = ls_seed_values(f.op, pat, y);
        } catch (const RankDeficient&) {
            continue;
        }
        // oracle: explicit pseudo-inverse through the full SVD
        const Matrix B = f.op.restricted(pat);
        Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vector b = f.op.VK.adjoint() * y;
        Vector s_oracle = Vector::Zero(P);
        for (int i = 0; i < svd.singularValues().size(); ++i) {
            const double sv = svd.singularValues()(i);
            if (sv > 1e-12 * svd.singularValues()(0))
                s_oracle += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(b) / sv);
        }
        CHECK((sol.values - s_oracle).norm() <= 1e-8 * std::max(1.0, s_oracle.norm()));
        const double direct = (b - B * s_oracle).squaredNorm();
        // identical up to rounding dust on exactly-solvable instances
        CHECK(std::abs(sol.error_energy - direct) <=
              1e-8 * std::max(direct, 1e-14 * y.squaredNorm()));
    }
}

TEST_CASE("ls_seed_values: analytic energy equals the realized pipeline energy") {
    const Fixture f = er_fixture(10, 0.35, 4, 2, 7);
    Rng rng(8);
    int done = 0;
    for (int trial = 0; done < 100 && trial < 300; ++trial) {
        Rng sub = rng.substream(trial);
        const int P = 1 + static_cast<int>(sub.next_u64() % 4);
        const SelectionPattern pat = random_pattern(10, 2, P, sub);
        Vector yhatK = random_complex(4, sub);
        const Vector y = f.basis.VK(4) * yhatK;
        LsSolution sol;
        try {
            sol = ls_seed_values(f.op, pat, y);
        } catch (const RankDeficient&) {
            continue;
        }
        if (sol.cond > 1e6) continue;
        ReconstructionPlan plan;
        plan.K = 4;
        plan.schedule = SeedingSchedule{pat, sol.values};
        plan.filter = f.filter;
        const ReconstructionReport rep = reconstruct(f.shift, f.basis, plan, y);
        const double realized = rep.relative_error * rep.relative_error * y.squaredNorm();
        CHECK(std::abs(sol.error_energy - realized) <=
              1e-8 * std::max({sol.error_energy, realized, 1e-12 * y.squaredNorm()}));
        ++done;
    }
    CHECK(done == 100);
}

TEST_CASE("ls_seed_values: no unit-scale perturbation beats the LS optimum") {
    const Fixture f = er_fixture(9, 0.4, 3, 1, 9);
    Rng rng(10);
    int done = 0;
    for (int trial = 0; done < 100 && trial < 300; ++trial) {
        Rng sub = rng.substream(trial);
        const int P = 1 + static_cast<int>(sub.next_u64() % 2);
        const SelectionPattern pat = random_pattern(9, 1, P, sub);
        Vector yhatK = random_complex(3, sub);
        const Vector y = f.basis.VK(3) * yhatK;
        LsSolution sol;
        try {
            sol = ls_seed_values(f.op, pat, y);
        } catch (const RankDeficient&) {
            continue;
        }
        const Matrix B = f.op.restricted(pat);
        const Vector b = f.op.VK.adjoint() * y;
        const double base = (b - B * sol.values).squaredNorm();
        Vector delta = random_complex(P, sub);
        delta *= 1e-3 * std::max(sol.values.norm(), 1.0) / delta.norm();
        const double perturbed = (b - B * (sol.values + delta)).squaredNorm();
        CHECK(perturbed >= base - 1e-12 * std::max(1.0, base));
        ++done;
    }
    CHECK(done == 100);
}

TEST_CASE("joint_seed_filter: feasible instance converges to zero error") {
    const Fixture f = er_fixture(9, 0.45, 3, 1, 11);
    Rng rng(12);
    Vector yhatK = random_complex(3, rng);
    const Vector y = f.basis.VK(3) * yhatK;
    for (int attempt = 0; attempt < 10; ++attempt) {
        const SelectionPattern pat = random_pattern(9, 1, 3, rng);
        try {
            const JointDesign jd = joint_seed_filter(f.basis, 3, pat, y, 50, 1e-12, &f.filter);
            if (jd.error_energy <= 1e-12 * y.squaredNorm()) {
                CHECK(jd.converged);
                return;
            }
        } catch (const FeasibilityError&) {
        }
    }
    FAIL("no pattern reached the zero-residual fixed point");
}

TEST_CASE("joint_seed_filter: objective is monotone and beats the fixed-filter error") {
    const Fixture f = er_fixture(10, 0.35, 4, 2, 13);
    Rng rng(14);
    int done = 0;
    for (int trial = 0; done < 50 && trial < 200; ++trial) {
        Rng sub = rng.substream(trial);
        const int P = 1 + static_cast<int>(sub.next_u64() % 3);
        const SelectionPattern pat = random_pattern(10, 2, P, sub);
        Vector yhatK = random_complex(4, sub);
        const Vector y = f.basis.VK(4) * yhatK;
        LsSolution fixed;
        try {
            fixed = ls_seed_values(f.op, pat, y);
        } catch (const RankDeficient&) {
            continue;
        }
        const JointDesign jd = joint_seed_filter(f.basis, 4, pat, y, 30, 1e-14, &f.filter);
        for (std::size_t i = 1; i < jd.objective_trace.size(); ++i)
            CHECK(jd.objective_trace[i] <=
                  jd.objective_trace[i - 1] + 1e-10 * std::max(1.0, jd.objective_trace[i - 1]));
        CHECK(jd.error_energy <= fixed.error_energy + 1e-8 * std::max(1.0, fixed.error_energy));
        ++done;
    }
    CHECK(done == 50);
}

TEST_CASE("sparse_location_design: greedy with gamma=0 reaches zero residual") {
    const Fixture f = er_fixture(9, 0.45, 3, 1, 15);
    Rng rng(16);
    Vector yhatK = random_complex(3, rng);
    const Vector y = f.basis.VK(3) * yhatK;
    const SelectionResult res = sparse_location_design(f.op, y, 0.0, SelectionMethod::GreedyForward);
    CHECK(res.pattern.P() <= 3);
    CHECK(res.objective <= 1e-12 * y.squaredNorm());
}

TEST_CASE("sparse_location_design: gamma beyond the signal energy selects nothing") {
    const Fixture f = er_fixture(9, 0.45, 3, 1, 17);
    Rng rng(18);
    Vector yhatK = random_complex(3, rng);
    const Vector y = f.basis.VK(3) * yhatK;
    const SelectionResult res =
        sparse_location_design(f.op, y, 10.0 * y.squaredNorm(), SelectionMethod::GreedyForward);
    CHECK(res.pattern.P() == 0);
    CHECK(res.objective == doctest::Approx(y.squaredNorm()));
}

TEST_CASE("sparse_location_design: support size is non-increasing in gamma") {
    const Fixture f = er_fixture(10, 0.35, 4, 2, 19);
    Rng rng(20);
    Vector yhatK = random_complex(4, rng);
    const Vector y = f.basis.VK(4) * yhatK;
    int prev = std::numeric_limits<int>::max();
    for (double gamma : {0.0, 1e-6, 1e-4, 1e-2, 0.1, 1.0, 10.0}) {
        const SelectionResult res =
            sparse_location_design(f.op, y, gamma * y.squaredNorm(), SelectionMethod::GreedyForward);
        CHECK(res.pattern.P() <= prev);
        prev = res.pattern.P();
    }
}

TEST_CASE("sparse_location_design: ISTA support recovers the signal after debiasing") {
    const Fixture f = er_fixture(8, 0.5, 2, 1, 21);
    Rng rng(22);
    Vector yhatK = random_complex(2, rng);
    const Vector y = f.basis.VK(2) * yhatK;
    const double gamma = 1e-6 * y.squaredNorm();
    const SelectionResult l1 = sparse_location_design(f.op, y, gamma, SelectionMethod::L1Relaxed);
    CHECK(l1.pattern.P() >= 2);
    // the debiased LS on the recovered support reaches the achievable residual
    const double residual = l1.objective - gamma * l1.pattern.P();
    CHECK(residual <= 1e-10 * y.squaredNorm());
}

TEST_CASE("error_covariance: zero noise, algebraic identity, Hermitian PSD") {
    const Fixture f = er_fixture(9, 0.4, 3, 2, 23);
    Rng rng(24);
    const SelectionPattern pat = random_pattern(9, 2, 4, rng);
    const Vector values = random_complex(4, rng);

    const ErrorCovariance zero =
        error_covariance(f.op, pat, NoiseModel{NoiseKind::FixedPower, 0.0}, values);
    CHECK(zero.R.norm() == 0.0);
    CHECK(zero.mse == 0.0);

    const double sigma = 0.37;
    const ErrorCovariance fp =
        error_covariance(f.op, pat, NoiseModel{NoiseKind::FixedPower, sigma}, values);
    // trace identity: mse = sigma^2 * trace(Phi diag(c) Phi^H) for an
    // orthonormal V_K (symmetric shift here)
    const Matrix B = f.op.restricted(pat);
    CHECK(fp.mse == doctest::Approx(sigma * sigma * B.squaredNorm()).epsilon(1e-10));
    CHECK((fp.R - fp.R.adjoint()).norm() <= 1e-12 * fp.R.norm());
    Eigen::SelfAdjointEigenSolver<Matrix> es(fp.R);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12 * fp.R.norm());
    CHECK(std::abs(fp.R.trace().imag()) <= 1e-10 * fp.mse);
}

TEST_CASE("error_covariance: Monte-Carlo MSE matches trace(R) within 5%") {
    const Fixture f = er_fixture(9, 0.4, 3, 2, 25);
    Rng rng(26);
    const SelectionPattern pat = random_pattern(9, 2, 4, rng);
    const Vector values = random_complex(4, rng);
    for (NoiseKind kind : {NoiseKind::ConstantSNR, NoiseKind::FixedPower}) {
        const NoiseModel noise{kind, 1e-2};
        const ErrorCovariance cov = error_covariance(f.op, pat, noise, values);
        const double std_entry = noise.entry_std(values);
        const Matrix VB = f.op.VK * f.op.restricted(pat);
        double acc = 0.0;
        const int draws = 10000;
        for (int d = 0; d < draws; ++d) {
            Vector w(pat.P());
            for (int i = 0; i < pat.P(); ++i) w[i] = Complex(rng.normal() * std_entry, 0.0);
            acc += (VB * w).squaredNorm();
        }
        acc /= draws;
        CHECK(std::abs(acc - cov.mse) <= 0.05 * cov.mse);
    }
}

TEST_CASE("select_constant_snr: directed cycle exhaustive finds the uniform patterns") {
    const int N = 8, K = 4;
    const SpectralBasis basis = decompose(build_shift(gen_cycle(N), ShiftKind::Adjacency));
    const ReconstructionOperator op = ReconstructionOperator::build_ideal(basis, K, 1);

    const SelectionResult best = select_constant_snr(op, 4, SelectionMethod::Exhaustive);
    CHECK(best.candidates_evaluated == 70);
    std::vector<int> nodes;
    for (const auto& [node, t] : best.pattern.pairs) nodes.push_back(node);
    std::sort(nodes.begin(), nodes.end());
    const bool evens = nodes == std::vector<int>{0, 2, 4, 6};
    const bool odds = nodes == std::vector<int>{1, 3, 5, 7};
    CHECK((evens || odds));
    CHECK(best.objective == doctest::Approx(16.0).epsilon(1e-10));

    // the two uniform patterns are the exact argmin over all 70 subsets
    int minimizers = 0;
    std::vector<int> c = {0, 1, 2, 3};
    while (true) {
        SelectionPattern pat = SelectionPattern::single_time(c);
        const double obj = constant_snr_objective(op, pat);
        if (obj <= best.objective * (1.0 + 1e-9)) {
            ++minimizers;
            const bool uniform = (c == std::vector<int>{0, 2, 4, 6}) ||
                                 (c == std::vector<int>{1, 3, 5, 7});
            CHECK(uniform);
        }
        int i = 3;
        while (i >= 0 && c[i] == 8 - 4 + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < 4; ++j) c[j] = c[j - 1] + 1;
    }
    CHECK(minimizers == 2);

    // trace(M) = K^2/N for the uniform pattern, to near machine precision
    const Matrix B = op.restricted(SelectionPattern::single_time({0, 2, 4, 6}));
    CHECK(std::abs((B * B.adjoint()).trace().real() - 2.0) <= 1e-12);
}

TEST_CASE("select_constant_snr: SN-MT objective on the cycle is node-independent") {
    const int N = 8, K = 4;
    const SpectralBasis basis = decompose(build_shift(gen_cycle(N), ShiftKind::Adjacency));
    const ReconstructionOperator op = ReconstructionOperator::build_ideal(basis, K, K);
    const double ref = constant_snr_objective(op, SelectionPattern::single_node(0, K));
    for (int node = 1; node < N; ++node) {
        const double obj = constant_snr_objective(op, SelectionPattern::single_node(node, K));
        CHECK(obj == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("select_constant_snr: greedy never beats exhaustive, budget guard") {
    const Fixture f = er_fixture(8, 0.45, 3, 1, 27);
    CHECK_THROWS_AS(select_constant_snr(f.op, 2, SelectionMethod::Exhaustive), BudgetTooSmall);
    const SelectionResult ex = select_constant_snr(f.op, 4, SelectionMethod::Exhaustive);
    const SelectionResult gr = select_constant_snr(f.op, 4, SelectionMethod::GreedyForward);
    CHECK(gr.objective >= ex.objective - 1e-10 * std::max(1.0, ex.objective));
}

TEST_CASE("select_fixed_noise: P=1 picks the smallest column, exhaustive agrees") {
    const int N = 8;
    const SpectralBasis basis = decompose(build_shift(gen_cycle(N), ShiftKind::Adjacency));
    const FilterDesign f = design_lowpass_kernel(basis, 3);
    const ReconstructionOperator op = ReconstructionOperator::build(basis, f, 3, 1);

    const SelectionResult one = select_fixed_noise(op, 1, SelectionMethod::GreedyForward);
    double best_norm = std::numeric_limits<double>::infinity();
    for (int c = 0; c < N; ++c) best_norm = std::min(best_norm, op.phi.col(c).squaredNorm());
    CHECK(one.objective == doctest::Approx(best_norm).epsilon(1e-12));

    const SelectionResult ex3 = select_fixed_noise(op, 3, SelectionMethod::Exhaustive);
    const SelectionResult gr3 = select_fixed_noise(op, 3, SelectionMethod::GreedyForward);
    CHECK(gr3.objective == doctest::Approx(ex3.objective).epsilon(1e-12));
}

TEST_CASE("select_fixed_noise: prefers the node that weakly expresses the active band") {
    // complete K4 plus a weakly attached satellite: the satellite barely
    // expresses the top frequencies, so fixed-power noise design picks it
    Graph g;
    g.n = 5;
    g.edges = {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {1, 2, 1.0},
               {1, 3, 1.0}, {2, 3, 1.0}, {3, 4, 0.01}};
    const SpectralBasis basis = decompose(build_shift(g, ShiftKind::Adjacency));
    const int K = 2;
    const ReconstructionOperator op = ReconstructionOperator::build_ideal(basis, K, 1);
    const SelectionResult res = select_fixed_noise(op, 1, SelectionMethod::GreedyForward);
    CHECK(res.pattern.pairs[0].first == 4);
    // and node 4 indeed has the smallest active-band expression
    double smallest = std::numeric_limits<double>::infinity();
    int argmin = -1;
    for (int i = 0; i < 5; ++i) {
        const double e = basis.node_spectrum(i).head(K).norm();
        if (e < smallest) {
            smallest = e;
            argmin = i;
        }
    }
    CHECK(argmin == 4);
}

TEST_CASE("constant_snr_objective: ranking matches Monte-Carlo MSE on the cycle") {
    // for every 4-subset of the 8-cycle, the selection objective must rank
    // patterns the same way as the empirically simulated reconstruction MSE
    const int N = 8, K = 4;
    const SpectralBasis basis = decompose(build_shift(gen_cycle(N), ShiftKind::Adjacency));
    const ReconstructionOperator op = ReconstructionOperator::build_ideal(basis, K, 1);
    const double sigma = 1e-2;
    Rng rng(99);

    std::vector<double> objective, empirical;
    std::vector<int> c = {0, 1, 2, 3};
    while (true) {
        const SelectionPattern pat = SelectionPattern::single_time(c);
        objective.push_back(constant_snr_objective(op, pat));
        const Matrix B = op.restricted(pat);
        const Matrix VB = op.VK * B;
        double acc = 0.0;
        const int draws = 10000;
        if (std::isfinite(objective.back())) {
            const auto lu = B.partialPivLu();
            for (int d = 0; d < draws; ++d) {
                Vector yhatK(K);
                for (int k = 0; k < K; ++k) yhatK[k] = Complex(rng.normal(), 0.0);
                const Vector s = lu.solve(yhatK);
                const double std_entry = sigma * s.norm() / std::sqrt(double(K));
                Vector w(K);
                for (int k = 0; k < K; ++k) w[k] = Complex(rng.normal() * std_entry, 0.0);
                acc += (VB * w).squaredNorm();
            }
            empirical.push_back(acc / draws);
        } else {
            empirical.push_back(std::numeric_limits<double>::infinity());
        }
        int i = 3;
        while (i >= 0 && c[i] == N - 4 + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < 4; ++j) c[j] = c[j - 1] + 1;
    }
    REQUIRE(objective.size() == 70);

    // Spearman rank correlation with fractional ranks: the cycle's
    // rotational symmetry makes many objectives exactly equal, and tied
    // entries must share their average rank
    auto ranks = [](const std::vector<double>& v) {
        std::vector<int> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        std::size_t i = 0;
        while (i < idx.size()) {
            std::size_t j = i;
            while (j + 1 < idx.size() &&
                   v[idx[j + 1]] <= v[idx[i]] * (1.0 + 1e-9) + 1e-300)
                ++j;
            const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j));
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    auto pearson = [](const std::vector<double>& a, const std::vector<double>& b) {
        const double n = static_cast<double>(a.size());
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            ma += a[i];
            mb += b[i];
        }
        ma /= n;
        mb /= n;
        double num = 0.0, da = 0.0, db = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            num += (a[i] - ma) * (b[i] - mb);
            da += (a[i] - ma) * (a[i] - ma);
            db += (b[i] - mb) * (b[i] - mb);
        }
        return num / std::sqrt(da * db);
    };
    const double spearman = pearson(ranks(objective), ranks(empirical));
    CHECK(spearman >= 0.95);
}

TEST_CASE("constant_snr_objective: singular patterns score infinity") {
    const int N = 6, K = 2;
    const SpectralBasis basis = decompose(build_shift(gen_cycle(N), ShiftKind::Adjacency));
    const ReconstructionOperator op = ReconstructionOperator::build_ideal(basis, K, 2);
    // two injections at the same node and consecutive times differ by one
    // shift power; picking times (1, 0) at one node spans rank... full rank
    // here, so build a genuinely singular case: same node, but P < K slots
    SelectionPattern pat;
    pat.tau = 2;
    pat.pairs = {{0, 1}};
    // K = 2 rows from one column: rank 1 < K
    CHECK(constant_snr_objective(op, pat) == std::numeric_limits<double>::infinity());
}
